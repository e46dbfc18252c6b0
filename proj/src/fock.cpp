#include "moyal_scatter/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace msc {

ModeSelection select_modes(const SpectralData& sp, int num_modes) {
    if (num_modes < 1 || num_modes > 12)
        throw invalid_input("select_modes: num_modes must be in 1..12");
    const int N = sp.rep.N;
    std::vector<int> order(sp.grid.modes);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (sp.absH[a] != sp.absH[b]) return sp.absH[a] < sp.absH[b];
        return a < b;
    });
    const AntilinearOp C = charge_conjugation(sp.grid, sp.rep);
    const double wk = std::pow(sp.grid.dk, sp.grid.dimension);

    ModeSelection sel;
    sel.num_modes = num_modes;
    sel.grid = sp.grid;
    for (int j = 0; j < num_modes; ++j) {
        const int m = order[j];
        // positive-energy unit spinor at mode m: dominant column of p_+
        const MatrixXcd& P = sp.pplus[m];
        int col = 0;
        for (int c = 1; c < N; ++c)
            if (P.col(c).norm() > P.col(col).norm()) col = c;
        VectorXcd u = P.col(col);
        u /= u.norm();
        VectorXcd chi = VectorXcd::Zero(sp.dim);
        chi.segment(static_cast<long>(m) * N, N) = u / std::sqrt(wk);
        sel.chi_plus.push_back(chi);
        sel.chi_minus.push_back(C.apply(chi));
    }
    return sel;
}

namespace {

// Jordan-Wigner annihilators on num_modes fermion modes.
std::vector<MatrixXcd> jordan_wigner(int M) {
    const long dim = 1L << M;
    std::vector<MatrixXcd> a(M, MatrixXcd::Zero(dim, dim));
    for (int j = 0; j < M; ++j) {
        for (long s = 0; s < dim; ++s) {
            if (!(s >> j & 1)) continue;  // mode j occupied in source state
            long t = s & ~(1L << j);
            int parity = 0;
            for (int l = 0; l < j; ++l) parity ^= static_cast<int>(s >> l & 1);
            a[j](t, s) = parity ? -1.0 : 1.0;
        }
    }
    return a;
}

}  // namespace

MatrixXcd FockSpace::psi_compressed(const VectorXcd& coeffs) const {
    const int M = sel.num_modes;
    if (coeffs.size() != 2L * M) throw invalid_input("psi_compressed: basis mismatch");
    MatrixXcd out = MatrixXcd::Zero(dim, dim);
    const double r2 = std::sqrt(2.0);
    for (int j = 0; j < M; ++j) {
        if (coeffs[j] != 0.0) out += coeffs[j] * r2 * a[j].adjoint();
        if (coeffs[M + j] != 0.0) out += coeffs[M + j] * r2 * a[j];
    }
    return out;
}

MatrixXcd FockSpace::psi(const VectorXcd& vhat) const {
    const int M = sel.num_modes;
    const double wk = std::pow(sel.grid.dk, sel.grid.dimension);
    VectorXcd coeffs(2L * M);
    for (int j = 0; j < M; ++j) {
        coeffs[j] = wk * sel.chi_plus[j].dot(vhat);
        coeffs[M + j] = wk * sel.chi_minus[j].dot(vhat);
    }
    return psi_compressed(coeffs);
}

FockSpace build_fock(const ModeSelection& sel, const SpectralData& sp) {
    if (sel.num_modes > 12) throw invalid_input("build_fock: more than 12 modes");
    FockSpace f;
    f.sel = sel;
    f.dim = 1L << sel.num_modes;
    f.a = jordan_wigner(sel.num_modes);
    f.vacuum = VectorXcd::Zero(f.dim);
    f.vacuum[0] = 1.0;
    f.C = charge_conjugation(sp.grid, sp.rep);
    return f;
}

MatrixXcd compress(const MatrixXcd& A, const ModeSelection& sel, double* leakage) {
    const int M = sel.num_modes;
    const double wk = std::pow(sel.grid.dk, sel.grid.dimension);
    auto basis = [&](int beta) -> const VectorXcd& {
        return beta < M ? sel.chi_plus[beta] : sel.chi_minus[beta - M];
    };
    MatrixXcd out(2 * M, 2 * M);
    double worst = 0.0;
    for (int alpha = 0; alpha < 2 * M; ++alpha) {
        const VectorXcd col = A * basis(alpha);
        VectorXcd residual = col;
        for (int beta = 0; beta < 2 * M; ++beta) {
            out(beta, alpha) = wk * basis(beta).dot(col);
            residual -= out(beta, alpha) * basis(beta);
        }
        const double cn = col.norm();
        if (cn > 0.0) worst = std::max(worst, residual.norm() / cn);
    }
    if (leakage) *leakage = worst;
    return out;
}

MatrixXcd normal_ordered_bilinear(const MatrixXcd& A_compressed, const FockSpace& fock) {
    const int M = fock.sel.num_modes;
    if (A_compressed.rows() != 2 * M || A_compressed.cols() != 2 * M)
        throw invalid_input("normal_ordered_bilinear: basis mismatch");
    MatrixXcd G = MatrixXcd::Zero(fock.dim, fock.dim);
    for (int alpha = 0; alpha < 2 * M; ++alpha) {
        const MatrixXcd psiA = fock.psi_compressed(A_compressed.col(alpha));
        const MatrixXcd psiB =
            fock.psi_compressed(VectorXcd::Unit(2L * M, alpha));
        G += psiA.adjoint() * psiB;
    }
    const cplx vac = fock.vacuum.dot(G * fock.vacuum);
    G -= vac * MatrixXcd::Identity(fock.dim, fock.dim);
    return -0.25 * G;
}

ImplementerResult implementer(const MatrixXcd& T_compressed, const FockSpace& fock,
                              double unitarity_tol) {
    const int M = fock.sel.num_modes;
    if (T_compressed.rows() != 2 * M || T_compressed.cols() != 2 * M)
        throw invalid_input("implementer: basis mismatch");
    const MatrixXcd defect = T_compressed.adjoint() * T_compressed -
                             MatrixXcd::Identity(2 * M, 2 * M);
    if (defect.norm() > unitarity_tol * std::sqrt(2.0 * M) * 10)
        throw invalid_input("implementer: compressed operator is not unitary");

    // transformed ladder operators: b_j = psi(T chi^-_j)/sqrt(2) annihilate
    // the transformed vacuum, c_j^+ = psi(T chi^+_j)/sqrt(2) create on it
    const double r2 = std::sqrt(2.0);
    std::vector<MatrixXcd> b(M), cdag(M);
    for (int j = 0; j < M; ++j) {
        b[j] = fock.psi_compressed(T_compressed.col(M + j)) / r2;
        cdag[j] = fock.psi_compressed(T_compressed.col(j)) / r2;
    }
    MatrixXcd Q = MatrixXcd::Zero(fock.dim, fock.dim);
    for (int j = 0; j < M; ++j) Q += b[j].adjoint() * b[j];
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(Q);
    const auto& ev = es.eigenvalues();
    ImplementerResult res;
    res.kernel_gap = ev[1];
    if (ev[1] < 1e-6)
        throw numerical_error("implementer: transformed vacuum is not unique");
    const VectorXcd omegaT = es.eigenvectors().col(0);

    // transport the occupation basis: S(a^+_{j1}..a^+_{jk} Omega) =
    // c^+_{j1}..c^+_{jk} Omega_T, built by lowest-bit recursion
    std::vector<VectorXcd> cstate(fock.dim), astate(fock.dim);
    cstate[0] = omegaT;
    astate[0] = fock.vacuum;
    MatrixXcd S(fock.dim, fock.dim);
    for (long mask = 0; mask < fock.dim; ++mask) {
        if (mask > 0) {
            int low = 0;
            while (!(mask >> low & 1)) ++low;
            cstate[mask] = cdag[low] * cstate[mask & (mask - 1)];
            astate[mask] = fock.a[low].adjoint() * astate[mask & (mask - 1)];
        }
        // astate[mask] is +-1 times a single occupation basis vector
        long idx = 0;
        cplx sign = 0.0;
        for (long i = 0; i < fock.dim; ++i)
            if (std::abs(astate[mask][i]) > 0.5) {
                idx = i;
                sign = astate[mask][i];
                break;
            }
        S.col(idx) = cstate[mask] / sign;
    }
    // phase normalization <Omega, S Omega> >= 0
    const cplx ph = fock.vacuum.dot(S * fock.vacuum);
    if (std::abs(ph) > 1e-12) S *= std::conj(ph) / std::abs(ph);
    res.unitarity_defect =
        (S.adjoint() * S - MatrixXcd::Identity(fock.dim, fock.dim)).norm();
    res.S = std::move(S);
    return res;
}

WickReport wick_square_check(const PotentialProfile& profile, const FockSpace& fock,
                             const SpectralData& sp, const IntegratorSpec& integ,
                             double t0, int count) {
    const int M = fock.sel.num_modes;
    PotentialProfile zero = profile;
    zero.coupling = 0.0;
    PotentialProfile unit = profile;
    unit.coupling = 1.0;
    const MatrixXcd Vsp =
        blockdiag_spinor(sp.rep.gammas[0], sp.grid) * potential_matrix(unit, sp);
    const double wkw = std::pow(sp.grid.dk, sp.grid.dimension);
    auto basis = [&](int beta) -> const VectorXcd& {
        return beta < M ? fock.sel.chi_plus[beta] : fock.sel.chi_minus[beta - M];
    };

    // B_c columns: v -> -i Q_0 (c . R_0 f_v), with R_0 f_v the free solution
    // through the Cauchy datum v
    MatrixXcd Bc(2 * M, 2 * M);
    const int core = (M + 1) / 2;  // selection is energy-sorted
    double worst_core = 0.0, worst_all = 0.0;
    for (int alpha = 0; alpha < 2 * M; ++alpha) {
        const SpacetimeField phi = free_solution(basis(alpha), sp, t0, integ.dt, count);
        SpacetimeField g = make_field(sp.grid, sp.rep.N, t0, integ.dt, count);
        for (int n = 0; n < count; ++n) {
            const double at = unit.a_tilde(g.time(n));
            if (at == 0.0) continue;
            const VectorXcd hat = spinor_to_momentum(phi.slices[n], sp.grid);
            g.slices[n] =
                spinor_from_momentum(VectorXcd(at * (Vsp * hat)), sp.grid, sp.rep.N);
        }
        const VectorXcd u = -iu * cauchy_data_map(g, zero, sp, integ);
        VectorXcd residual = u;
        for (int beta = 0; beta < 2 * M; ++beta) {
            Bc(beta, alpha) = wkw * basis(beta).dot(u);
            residual -= Bc(beta, alpha) * basis(beta);
        }
        if (u.norm() > 0.0) {
            const double rel = residual.norm() / u.norm();
            worst_all = std::max(worst_all, rel);
            if (alpha % M < core) worst_core = std::max(worst_core, rel);
        }
    }
    WickReport rep;
    rep.truncation_residual = worst_core;
    rep.boundary_residual = worst_all;
    if (worst_core > 0.10)
        throw numerical_error("wick_square_check: truncation residual above 10%");

    const MatrixXcd G = normal_ordered_bilinear(Bc, fock);
    double dres = 0.0, scale = 0.0;
    for (int alpha = 0; alpha < 2 * M; ++alpha) {
        const MatrixXcd lhs =
            G * fock.psi_compressed(VectorXcd::Unit(2L * M, alpha)) -
            fock.psi_compressed(VectorXcd::Unit(2L * M, alpha)) * G;
        const MatrixXcd rhs = fock.psi_compressed(Bc.col(alpha));
        dres = std::max(dres, (lhs - rhs).norm());
        scale = std::max(scale, rhs.norm());
    }
    rep.derivation_residual = dres / std::max(scale, 1e-300);

    const MatrixXcd dT = d_scattering(unit, sp).mat;
    const MatrixXcd dTc = compress(dT, fock.sel, nullptr);
    rep.cross_check_rel = (Bc - dTc).norm() / std::max(Bc.norm(), 1e-300);
    return rep;
}

}  // namespace msc
