#pragma once

#include "moyal_scatter/scattering.hpp"

namespace msc {

// C-paired truncation of the one-particle space: num_modes lowest-|H(k)|
// momentum eigenmodes chi^+_j in ran p_+, partners chi^-_j = C chi^+_j in
// ran p_-.  The Fock space below has dimension 2^num_modes.
struct ModeSelection {
    int num_modes = 0;
    std::vector<VectorXcd> chi_plus;
    std::vector<VectorXcd> chi_minus;
    SpatialGrid grid;
};

ModeSelection select_modes(const SpectralData& sp, int num_modes);

// Truncated fermionic Fock space with Jordan-Wigner field matrices.
// Scaled CAR convention: psi(v) = A_s(p_+ C v) + A_s^+(p_+ v) with
// {A_s(f), A_s^+(g)} = 2 (f,g), so {psi(v)^*, psi(w)} = 2 (v,w) and
// psi(chi^-_j) = sqrt(2) a_j, psi(chi^+_j) = sqrt(2) a_j^+.
struct FockSpace {
    ModeSelection sel;
    long dim = 0;
    std::vector<MatrixXcd> a;  // annihilators
    VectorXcd vacuum;
    AntilinearOp C;

    // field operator of a one-particle vector given in the momentum basis
    MatrixXcd psi(const VectorXcd& vhat) const;
    // field operator of coefficients in the {chi^+_j, chi^-_j} basis
    MatrixXcd psi_compressed(const VectorXcd& coeffs) const;
};

FockSpace build_fock(const ModeSelection& sel, const SpectralData& sp);

// Compression of a one-particle operator to the selected basis
// (2 num_modes square, ordering chi^+_1.. chi^+_M, chi^-_1.. chi^-_M).
// *leakage (optional) receives the worst relative off-subspace residual.
MatrixXcd compress(const MatrixXcd& A, const ModeSelection& sel, double* leakage = nullptr);

// Normal-ordered bilinear :G(A): for A given in the compressed basis,
// normalized so that [:G(A):, psi(v)] = psi(A v) whenever CA = -AC:
//   :G(A): = -1/4 (G_raw - <Omega, G_raw Omega>),
//   G_raw  = sum_j psi(A chi^+_j)^* psi(chi^+_j) + psi(A chi^-_j)^* psi(chi^-_j).
MatrixXcd normal_ordered_bilinear(const MatrixXcd& A_compressed, const FockSpace& fock);

// Unitary implementer S on the truncated Fock space with
// S psi(v) S^-1 = psi(T v) for v in the selection; phase fixed by
// <Omega, S Omega> >= 0.  T_compressed must be unitary on the subspace.
struct ImplementerResult {
    MatrixXcd S;
    double kernel_gap = 0.0;       // second-lowest eigenvalue of the b^+b sum
    double unitarity_defect = 0.0; // ||S^* S - 1||
};

ImplementerResult implementer(const MatrixXcd& T_compressed, const FockSpace& fock,
                              double unitarity_tol = 1e-8);

struct WickReport {
    // Worst relative off-subspace leakage of B_c over the energy core of the
    // selection (lowest half of the retained modes).  The boundary modes of
    // any finite selection couple outward with O(1) relative weight, so they
    // are excluded from certification; refinement in num_modes pushes the
    // boundary away from the core.
    double truncation_residual = 0.0;
    double boundary_residual = 0.0;    // worst leakage including boundary modes
    double derivation_residual = 0.0;  // ||[:G(B_c):, psi] - psi(B_c .)|| / ||psi(B_c .)||
    double cross_check_rel = 0.0;      // ||B_c - compressed dT_sc|| / ||B_c||
};

// Wick-square derivation check: B_c v = -i Q_0 (c . R_0 f_v) assembled via
// the free causal propagator on the window [t0, t0 + (count-1) dt], then
// the commutator identity and the dT_sc cross-check on the truncation.
WickReport wick_square_check(const PotentialProfile& profile, const FockSpace& fock,
                             const SpectralData& sp, const IntegratorSpec& integ,
                             double t0, int count);

}  // namespace msc
