#pragma once

#include "moyal_scatter/dynamics.hpp"

namespace msc {

struct ScatteringResult {
    OneParticleOperator T_sc;
    OneParticleOperator dT_sc;
    double hs_offdiag = 0.0;       // ||[p_+, T_sc]||_HS
    double hs_dT = 0.0;            // ||p_+ dT_sc p_-||_HS
    double unitarity_defect = 0.0; // ||T_sc^* T_sc - 1||_HS
    int points_per_dim = 0;
    double dt = 0.0;
    double margin = 0.0;
    std::string kind;
};

// Scattering operator, free-dressed across the potential's time support:
//   T_sc = e^{+i t- H0} T^(V)_{t-,t+} e^{-i t+ H0},  t- < lambda_- < lambda_+ < t+ ,
// i.e. the interaction-picture evolution taken from late to early times.
// This orientation is the one for which both d/dlambda T_sc^(lambda V) =
// i dT_sc and the Bogoliubov identity hold (see d_scattering).
OneParticleOperator scattering_operator(const PotentialProfile& profile,
                                        const SpectralData& sp,
                                        const IntegratorSpec& integ,
                                        double margin = 1.0);

// Same dressing applied to a single vector of momentum coefficients.
VectorXcd scattering_apply(const VectorXcd& what, const PotentialProfile& profile,
                           const SpectralData& sp, const IntegratorSpec& integ,
                           double margin = 1.0);

// dT_sc = -i d/dlambda|_0 T_sc^(lambda V)
//       = integral a~(t) e^{i t H0} v e^{-i t H0} dt   (trapezoid, step dt_quad);
// hermitian, anticommutes with C.
OneParticleOperator d_scattering(const PotentialProfile& profile, const SpectralData& sp,
                                 double dt_quad = 2e-3);

// Independent quadrature of the momentum-kernel formula for ||p_+ dT_sc p_-||_HS:
// per mode pair (k,u) the kernel is sqrt(2 pi) (Fa~)(-(|H(k)|+|H(u)|)) p+(k) v(k,u) p-(u).
double hs_dT_kernel_oracle(const PotentialProfile& profile, const SpectralData& sp,
                           double dt_quad = 2e-3);

ScatteringResult compute_scattering(const PotentialProfile& profile,
                                    const SpectralData& sp, const IntegratorSpec& integ,
                                    double margin = 1.0, double dt_quad = 2e-3);

struct ImplementabilityReport {
    std::vector<ScatteringResult> rows;
    std::vector<double> cauchy_offdiag;  // successive relative differences
    std::vector<double> cauchy_dT;
    bool implementable = false;  // all successive differences below 5%
};

ImplementabilityReport implementability_report(std::vector<ScatteringResult> results);

struct LmProbeRow {
    int n = 0;
    int nu = 0;
    double op_norm = 0.0;
    double hs_norm = 0.0;
};

struct LmProbeReport {
    std::vector<LmProbeRow> rows;
    // fitted constants for |(|H(k)|-|H(u)|)^n| <= alpha |k-u|^{2n} + beta, per n
    std::vector<double> alpha;
    std::vector<double> beta;
    bool bound_holds = true;
};

// Kernels of |H0|^{-nu} delta^n_{|H0|}(L_b) on the lattice, n <= n_max,
// nu <= nu_max; operator norms by power iteration, HS norms by Frobenius.
LmProbeReport lm_condition_probe(const GridFunction& b, const SpectralData& sp,
                                 int nu_max, int n_max);

struct BogoliubovReport {
    std::vector<double> lambdas;
    std::vector<double> e_values;    // e(lambda)
    double ratio = 0.0;              // e(lambda_max)/e(lambda_min)
    double extrapolated = 0.0;       // Richardson-extrapolated residual
    double rhs_norm = 0.0;
};

// Verifies d/dlambda|_0 T_sc^(lambda V) (P0 R0 f) = P0 R0 (V R0 f):
// e(lambda) = ||(T^lambda w - w)/lambda - rhs|| with w = P0 R0 f.
BogoliubovReport bogoliubov_derivative_check(const SpacetimeField& f,
                                             const PotentialProfile& profile,
                                             const SpectralData& sp,
                                             const IntegratorSpec& integ,
                                             const std::vector<double>& lambdas,
                                             double margin = 1.0);

struct MorphismCheck {
    double residual = 0.0;       // ||P0 R0 f^{G-} - T_sc (P0 R0 f)|| / ||...||
    double lhs_norm = 0.0;
};

// Realizes the scattering-morphism equivalence Q0 o U_V = T_sc o Q0 by the
// representative chain f -> f^{G+} -> f^{G-} through the potential.
MorphismCheck scattering_morphism_check(const SpacetimeField& f,
                                        const PotentialProfile& profile,
                                        const SpectralData& sp,
                                        const IntegratorSpec& integ,
                                        double margin = 1.0);

}  // namespace msc
