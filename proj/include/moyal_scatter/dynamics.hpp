#pragma once

#include "moyal_scatter/moyal.hpp"

namespace msc {

// Momentum-space spectral data of the free Hamiltonian.
//
// Conventions (fixed so that D_V R^pm_V f = f holds discretely, with
// D_V = -i gamma^mu d_mu + m + V):
//   Hhat(k) = gamma^0 gamma^j k_j + gamma^0 m   (hermitian, Hhat^2 = (|k|^2+m^2) 1)
//   solutions evolve by d/dt phi = -i H phi, free propagator T_t = e^{-i t H0}.
struct SpectralData {
    ModelParams model;
    DiracRep rep;
    SpatialGrid grid;
    long dim = 0;                  // modes * N
    std::vector<MatrixXcd> Hhat;   // per mode, N x N
    std::vector<double> absH;      // sqrt(|k|^2 + m^2) per mode
    std::vector<MatrixXcd> pplus;  // positive spectral projector per mode
    std::vector<MatrixXcd> pminus;
};

SpectralData build_spectral(const ModelParams& model, const SpatialGrid& grid,
                            const DiracRep& rep);

// Assembled block-diagonal operators.
OneParticleOperator operator_H0(const SpectralData& sp);
OneParticleOperator operator_abs_H0(const SpectralData& sp);
OneParticleOperator operator_eps(const SpectralData& sp);
OneParticleOperator projector_plus(const SpectralData& sp);
OneParticleOperator projector_minus(const SpectralData& sp);

// e^{i t Hhat(k)} blockwise = cos(|H|t) + i sin(|H|t) Hhat/|H|; unitary.
OneParticleOperator free_propagator(double t, const SpectralData& sp);

// In-place block phase e^{sign * i t Hhat(k)} on rows (vector or matrix).
void dress_rows(Eigen::Ref<MatrixXcd> X, double t, int sign, const SpectralData& sp);
void dress_cols(Eigen::Ref<MatrixXcd> X, double t, int sign, const SpectralData& sp);

// Smooth compactly supported time bump
//   a(t) = A exp(1 - 1/(1 - tau^2)), tau = (t - center)/half_width, |tau| < 1.
struct TimeBump {
    double center = 0.0;
    double half_width = 0.5;
    double amplitude = 0.0;
    double operator()(double t) const;
};

// Factorized potential c(t,x) = a(t) b(x) of a given kind; the effective
// time factor is a(t) for V0/Vi and a(t)^2 for Vii.
struct PotentialProfile {
    TimeBump a;
    GridFunction b_space;
    PotentialKind kind = PotentialKind::V0;
    // overall coupling lambda multiplying the potential V (not the bump a,
    // so that Vii scales linearly in lambda as well)
    double coupling = 1.0;

    double a_tilde(double t) const;
    double lambda_minus() const { return a.center - a.half_width; }
    double lambda_plus() const { return a.center + a.half_width; }
};

// Assembles the spatial operator v of the profile (gamma^0 included).
MatrixXcd potential_matrix(const PotentialProfile& profile, const SpectralData& sp);

struct IntegratorSpec {
    std::string method = "rk4-interaction-picture";  // or "dyson"
    double dt = 1e-3;
    int dyson_order = 6;
};

// Interaction-picture evolution of momentum coefficients (t_to may lie
// before t_from; the step direction follows).  vmat is the assembled
// potential operator.  Returns T^(V)_{t_to,t_from} vhat.
VectorXcd evolve_hat(const VectorXcd& vhat, double t_from, double t_to,
                     const PotentialProfile& profile, const MatrixXcd& vmat,
                     const SpectralData& sp, const IntegratorSpec& integ);

MatrixXcd evolve_matrix_hat(const MatrixXcd& X, double t_from, double t_to,
                            const PotentialProfile& profile, const MatrixXcd& vmat,
                            const SpectralData& sp, const IntegratorSpec& integ);

// Position-space front end.
GridSpinor evolve(const GridSpinor& v, double t_from, double t_to,
                  const PotentialProfile& profile, const SpectralData& sp,
                  const IntegratorSpec& integ);

// Full matrix of T^(V)_{t_to,t_from} in the momentum basis.
OneParticleOperator evolution_operator(double t_from, double t_to,
                                       const PotentialProfile& profile,
                                       const SpectralData& sp,
                                       const IntegratorSpec& integ);

// Uniformly sampled time-dependent spinor field (position space slices).
struct SpacetimeField {
    double t0 = 0.0;
    double dt = 0.0;
    int N = 0;
    std::vector<GridSpinor> slices;

    double time(int n) const { return t0 + n * dt; }
    int count() const { return static_cast<int>(slices.size()); }
    int index_of_time(double t) const;  // nearest slice; throws if outside
};

SpacetimeField make_field(const SpatialGrid& grid, int N, double t0, double dt,
                          int count);

// Advanced (+1) / retarded (-1) fundamental solution of D_V:
//   (R^pm_V f)(t) = pm i sum_{t'} dt theta(pm(t-t')) T^(V)_{t,t'} gamma^0 f(t'),
// trapezoid weights, exact one-sided time support.
SpacetimeField fundamental_solution(int sign, const SpacetimeField& f,
                                    const PotentialProfile& profile,
                                    const SpectralData& sp, const IntegratorSpec& integ);

// R_V f = R^+_V f - R^-_V f.
SpacetimeField causal_propagator(const SpacetimeField& f, const PotentialProfile& profile,
                                 const SpectralData& sp, const IntegratorSpec& integ);

// Pairing (f,h)_V = <f, i R_V h> by quadrature over the sampled window.
cplx pairing(const SpacetimeField& f, const SpacetimeField& h,
             const PotentialProfile& profile, const SpectralData& sp,
             const IntegratorSpec& integ);

// Cauchy-data map Q_0[f] = (R_V f)(t = 0) as momentum coefficients.
VectorXcd cauchy_data_map(const SpacetimeField& f, const PotentialProfile& profile,
                          const SpectralData& sp, const IntegratorSpec& integ);

// Discrete Dirac operator D_V (spectral in space, centered differences in
// time; first/last slices of the result are zeroed).  Pass amplitude-zero
// profile for D_0.
SpacetimeField dirac_apply(const SpacetimeField& phi, const PotentialProfile& profile,
                           const SpectralData& sp);

// Free solution slices phi(t) = e^{-i t H0} w for w given in momentum basis.
SpacetimeField free_solution(const VectorXcd& what, const SpectralData& sp, double t0,
                             double dt, int count);

// Normalized C-infinity transition derivative: chi'(t) for a cutoff rising
// 0 -> 1 over (tau0, tau1); integrates to 1.
double chi_prime(double t, double tau0, double tau1);

}  // namespace msc
