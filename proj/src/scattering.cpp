#include "moyal_scatter/scattering.hpp"

#include <algorithm>
#include <cmath>

namespace msc {

namespace {

// rows <- p_+/p_- blocks (sign +1/-1) applied per mode
MatrixXcd project_rows(const MatrixXcd& X, const SpectralData& sp, int sign) {
    const int N = sp.rep.N;
    MatrixXcd out(X.rows(), X.cols());
    for (int m = 0; m < sp.grid.modes; ++m) {
        const MatrixXcd& P = (sign > 0) ? sp.pplus[m] : sp.pminus[m];
        out.middleRows(static_cast<long>(m) * N, N) =
            P * X.middleRows(static_cast<long>(m) * N, N);
    }
    return out;
}

MatrixXcd project_cols(const MatrixXcd& X, const SpectralData& sp, int sign) {
    const int N = sp.rep.N;
    MatrixXcd out(X.rows(), X.cols());
    for (int m = 0; m < sp.grid.modes; ++m) {
        const MatrixXcd& P = (sign > 0) ? sp.pplus[m] : sp.pminus[m];
        out.middleCols(static_cast<long>(m) * N, N) =
            X.middleCols(static_cast<long>(m) * N, N) * P;
    }
    return out;
}

void check_margin(double margin) {
    if (margin <= 0.0) throw invalid_input("scattering: margin must be positive");
}

// trapezoid samples over the potential's time support
struct TimeQuad {
    std::vector<double> t;
    std::vector<double> w;  // weights including the step
};

TimeQuad support_quadrature(const PotentialProfile& profile, double dt_quad) {
    if (dt_quad <= 0.0) throw invalid_input("scattering: dt_quad must be positive");
    const double lm = profile.lambda_minus(), lp = profile.lambda_plus();
    const int nt = std::max(2, static_cast<int>(std::ceil((lp - lm) / dt_quad - 1e-12)));
    const double h = (lp - lm) / nt;
    TimeQuad q;
    q.t.resize(nt + 1);
    q.w.resize(nt + 1);
    for (int i = 0; i <= nt; ++i) {
        q.t[i] = lm + i * h;
        q.w[i] = (i == 0 || i == nt) ? h / 2 : h;
    }
    return q;
}

}  // namespace

OneParticleOperator scattering_operator(const PotentialProfile& profile,
                                        const SpectralData& sp,
                                        const IntegratorSpec& integ, double margin) {
    check_margin(margin);
    const double t_late = profile.lambda_plus() + margin;
    const double t_early = profile.lambda_minus() - margin;
    const MatrixXcd vmat = potential_matrix(profile, sp);
    MatrixXcd X = evolve_matrix_hat(MatrixXcd::Identity(sp.dim, sp.dim), t_late, t_early,
                                    profile, vmat, sp, integ);
    // undo the free dressing: T_sc = e^{+i t_early H0} T^(V) e^{-i t_late H0}
    dress_rows(X, t_early, +1, sp);
    dress_cols(X, t_late, -1, sp);
    OneParticleOperator op;
    op.mat = std::move(X);
    op.label = "T_sc";
    return op;
}

VectorXcd scattering_apply(const VectorXcd& what, const PotentialProfile& profile,
                           const SpectralData& sp, const IntegratorSpec& integ,
                           double margin) {
    check_margin(margin);
    const double t_late = profile.lambda_plus() + margin;
    const double t_early = profile.lambda_minus() - margin;
    const MatrixXcd vmat = potential_matrix(profile, sp);
    VectorXcd v = what;
    dress_rows(v, t_late, -1, sp);
    v = evolve_hat(v, t_late, t_early, profile, vmat, sp, integ);
    dress_rows(v, t_early, +1, sp);
    return v;
}

OneParticleOperator d_scattering(const PotentialProfile& profile, const SpectralData& sp,
                                 double dt_quad) {
    // dT is the lambda-derivative at lambda = 0: evaluate at unit coupling
    PotentialProfile unit = profile;
    unit.coupling = 1.0;
    const MatrixXcd vmat = potential_matrix(unit, sp);
    const TimeQuad q = support_quadrature(unit, dt_quad);
    MatrixXcd acc = MatrixXcd::Zero(sp.dim, sp.dim);
    for (size_t i = 0; i < q.t.size(); ++i) {
        const double at_unit = unit.a_tilde(q.t[i]);
        if (at_unit == 0.0) continue;
        MatrixXcd W = vmat;
        dress_rows(W, q.t[i], +1, sp);
        dress_cols(W, q.t[i], -1, sp);
        acc += (q.w[i] * at_unit) * W;
    }
    OneParticleOperator op;
    op.mat = std::move(acc);
    op.label = "dT_sc";
    return op;
}

double hs_dT_kernel_oracle(const PotentialProfile& profile_in, const SpectralData& sp,
                           double dt_quad) {
    PotentialProfile profile = profile_in;
    profile.coupling = 1.0;  // matches the unit-coupling normalization of dT
    const MatrixXcd vmat = potential_matrix(profile, sp);
    const TimeQuad q = support_quadrature(profile, dt_quad);
    const int nt = static_cast<int>(q.t.size());
    const int N = sp.rep.N;
    const int modes = sp.grid.modes;
    // per-mode phase table e^{+i t_i |H(m)|}
    std::vector<std::vector<cplx>> E(modes, std::vector<cplx>(nt));
    for (int m = 0; m < modes; ++m)
        for (int i = 0; i < nt; ++i) E[m][i] = std::exp(iu * (q.t[i] * sp.absH[m]));
    std::vector<double> aw(nt);
    for (int i = 0; i < nt; ++i) aw[i] = q.w[i] * profile.a_tilde(q.t[i]);

    double hs2 = 0.0;
    for (int mk = 0; mk < modes; ++mk) {
        for (int mu = 0; mu < modes; ++mu) {
            cplx z = 0.0;  // = sqrt(2 pi) (Fa~)(-(|H(k)|+|H(u)|))
            for (int i = 0; i < nt; ++i) z += aw[i] * E[mk][i] * E[mu][i];
            const MatrixXcd blk =
                sp.pplus[mk] *
                vmat.block(static_cast<long>(mk) * N, static_cast<long>(mu) * N, N, N) *
                sp.pminus[mu];
            hs2 += std::norm(z) * blk.squaredNorm();
        }
    }
    return std::sqrt(hs2);
}

ScatteringResult compute_scattering(const PotentialProfile& profile,
                                    const SpectralData& sp, const IntegratorSpec& integ,
                                    double margin, double dt_quad) {
    ScatteringResult res;
    res.T_sc = scattering_operator(profile, sp, integ, margin);
    res.dT_sc = d_scattering(profile, sp, dt_quad);
    const MatrixXcd& T = res.T_sc.mat;
    res.unitarity_defect =
        (T.adjoint() * T - MatrixXcd::Identity(sp.dim, sp.dim)).norm();
    res.hs_offdiag = (project_rows(T, sp, +1) - project_cols(T, sp, +1)).norm();
    res.hs_dT = project_cols(project_rows(res.dT_sc.mat, sp, +1), sp, -1).norm();
    res.points_per_dim = sp.grid.points_per_dim;
    res.dt = integ.dt;
    res.margin = margin;
    res.kind = to_string(profile.kind);
    return res;
}

ImplementabilityReport implementability_report(std::vector<ScatteringResult> results) {
    if (results.size() < 2)
        throw invalid_input("implementability_report: need at least 2 refinements");
    ImplementabilityReport rep;
    rep.rows = std::move(results);
    rep.implementable = true;
    for (size_t i = 1; i < rep.rows.size(); ++i) {
        const double d1 = std::abs(rep.rows[i].hs_offdiag - rep.rows[i - 1].hs_offdiag) /
                          std::max(rep.rows[i].hs_offdiag, 1e-300);
        const double d2 = std::abs(rep.rows[i].hs_dT - rep.rows[i - 1].hs_dT) /
                          std::max(rep.rows[i].hs_dT, 1e-300);
        rep.cauchy_offdiag.push_back(d1);
        rep.cauchy_dT.push_back(d2);
        if (d1 >= 0.05 || d2 >= 0.05) rep.implementable = false;
    }
    return rep;
}

LmProbeReport lm_condition_probe(const GridFunction& b, const SpectralData& sp,
                                 int nu_max, int n_max) {
    if (nu_max > 3 || n_max > 3 || nu_max < 0 || n_max < 0)
        throw invalid_input("lm_condition_probe: nu_max and n_max must be in 0..3");
    const MatrixXcd base = twisted_kernel(b, sp.model, sp.grid, +1);
    const int modes = sp.grid.modes;
    LmProbeReport rep;
    for (int n = 0; n <= n_max; ++n) {
        MatrixXcd dn(modes, modes);
        for (int r = 0; r < modes; ++r)
            for (int c = 0; c < modes; ++c)
                dn(r, c) = std::pow(sp.absH[r] - sp.absH[c], n) * base(r, c);
        for (int nu = 0; nu <= nu_max; ++nu) {
            MatrixXcd k = dn;
            if (nu > 0)
                for (int r = 0; r < modes; ++r)
                    k.row(r) *= std::pow(sp.absH[r], -static_cast<double>(nu));
            LmProbeRow row;
            row.n = n;
            row.nu = nu;
            row.op_norm = op_norm_estimate(k);
            row.hs_norm = k.norm() * std::sqrt(static_cast<double>(sp.rep.N));
            rep.rows.push_back(row);
        }
    }
    // entrywise bound |(|H(k)|-|H(u)|)^n| <= alpha |k-u|^{2n} + beta
    rep.alpha.assign(n_max + 1, 0.0);
    rep.beta.assign(n_max + 1, 0.0);
    std::vector<std::vector<double>> kvec(modes, std::vector<double>(sp.grid.dimension));
    int idx[2];
    for (int m = 0; m < modes; ++m) {
        sp.grid.unflatten(m, idx);
        for (int d = 0; d < sp.grid.dimension; ++d) kvec[m][d] = sp.grid.kvals[idx[d]];
    }
    for (int n = 1; n <= n_max; ++n) {
        double alpha = 0.0, beta = 0.0;
        for (int r = 0; r < modes; ++r)
            for (int c = 0; c < modes; ++c) {
                double x2 = 0.0;
                for (int d = 0; d < sp.grid.dimension; ++d) {
                    const double dk = kvec[r][d] - kvec[c][d];
                    x2 += dk * dk;
                }
                const double x = std::sqrt(x2);
                const double lhs = std::pow(std::abs(sp.absH[r] - sp.absH[c]), n);
                if (x >= 1.0)
                    alpha = std::max(alpha, lhs / std::pow(x, 2 * n));
                else
                    beta = std::max(beta, lhs);
            }
        rep.alpha[n] = alpha;
        rep.beta[n] = beta;
        for (int r = 0; r < modes && rep.bound_holds; ++r)
            for (int c = 0; c < modes; ++c) {
                double x2 = 0.0;
                for (int d = 0; d < sp.grid.dimension; ++d) {
                    const double dk = kvec[r][d] - kvec[c][d];
                    x2 += dk * dk;
                }
                const double lhs = std::pow(std::abs(sp.absH[r] - sp.absH[c]), n);
                if (lhs > alpha * std::pow(x2, n) + beta + 1e-12) {
                    rep.bound_holds = false;
                    break;
                }
            }
    }
    return rep;
}

namespace {

// -i chi'(t) gamma^0 phi, slicewise (the canonical representative of a
// solution's class with support in the chi transition window)
SpacetimeField transition_source(const SpacetimeField& phi, double tau0, double tau1,
                                 const SpectralData& sp) {
    const int N = sp.rep.N;
    SpacetimeField out = make_field(sp.grid, N, phi.t0, phi.dt, phi.count());
    for (int n = 0; n < phi.count(); ++n) {
        const double cp = chi_prime(phi.time(n), tau0, tau1);
        if (cp == 0.0) continue;
        GridSpinor s = phi.slices[n];
        for (int j = 0; j < sp.grid.modes; ++j)
            s.values.segment(static_cast<long>(j) * N, N) =
                (-iu * cp) * (sp.rep.gammas[0] *
                              s.values.segment(static_cast<long>(j) * N, N));
        out.slices[n] = std::move(s);
    }
    return out;
}

}  // namespace

BogoliubovReport bogoliubov_derivative_check(const SpacetimeField& f,
                                             const PotentialProfile& profile,
                                             const SpectralData& sp,
                                             const IntegratorSpec& integ,
                                             const std::vector<double>& lambdas,
                                             double margin) {
    for (double l : lambdas)
        if (l == 0.0) throw invalid_input("bogoliubov: lambda must be nonzero");
    PotentialProfile zero = profile;
    zero.coupling = 0.0;
    PotentialProfile unit = profile;
    unit.coupling = 1.0;

    const VectorXcd w = cauchy_data_map(f, zero, sp, integ);
    const SpacetimeField R0f = causal_propagator(f, zero, sp, integ);

    // V R0 f: slicewise a~(t) gamma^0 v applied in the momentum basis
    const MatrixXcd Vsp =
        blockdiag_spinor(sp.rep.gammas[0], sp.grid) * potential_matrix(unit, sp);
    SpacetimeField g = make_field(sp.grid, sp.rep.N, f.t0, f.dt, f.count());
    for (int n = 0; n < f.count(); ++n) {
        const double at = unit.a_tilde(f.time(n));
        if (at == 0.0) continue;
        const VectorXcd hat = spinor_to_momentum(R0f.slices[n], sp.grid);
        g.slices[n] = spinor_from_momentum(VectorXcd(at * (Vsp * hat)), sp.grid, sp.rep.N);
    }
    const VectorXcd rhs = cauchy_data_map(g, zero, sp, integ);

    BogoliubovReport rep;
    rep.lambdas = lambdas;
    rep.rhs_norm = norm_momentum(rhs, sp.grid);
    for (double l : lambdas) {
        PotentialProfile pl = profile;
        pl.coupling = l;
        const VectorXcd Tw = scattering_apply(w, pl, sp, integ, margin);
        rep.e_values.push_back(
            norm_momentum(VectorXcd((Tw - w) / l - rhs), sp.grid));
    }
    // largest-to-smallest lambda ratio and Richardson extrapolation
    size_t imax = 0, imin = 0;
    for (size_t i = 1; i < lambdas.size(); ++i) {
        if (lambdas[i] > lambdas[imax]) imax = i;
        if (lambdas[i] < lambdas[imin]) imin = i;
    }
    if (imax != imin) {
        rep.ratio = rep.e_values[imax] / std::max(rep.e_values[imin], 1e-300);
        const double r = lambdas[imax] / lambdas[imin];
        rep.extrapolated =
            std::abs(r * rep.e_values[imin] - rep.e_values[imax]) / (r - 1.0);
    }
    return rep;
}

MorphismCheck scattering_morphism_check(const SpacetimeField& f,
                                        const PotentialProfile& profile,
                                        const SpectralData& sp,
                                        const IntegratorSpec& integ, double margin) {
    PotentialProfile zero = profile;
    zero.coupling = 0.0;
    const double lm = profile.lambda_minus(), lp = profile.lambda_plus();

    // future representative of [f]: f^{G+} = -i chi' gamma^0 R_0 f
    const SpacetimeField phi = causal_propagator(f, zero, sp, integ);
    const SpacetimeField fGp = transition_source(phi, lp + 0.55, lp + 0.95, sp);
    // past representative through the potential: f^{G-} = -i chi' gamma^0 R_V f^{G+}
    const SpacetimeField psi = causal_propagator(fGp, profile, sp, integ);
    const SpacetimeField fGm = transition_source(psi, lm - 0.95, lm - 0.55, sp);

    const VectorXcd lhs = cauchy_data_map(fGm, zero, sp, integ);
    const VectorXcd rhs =
        scattering_apply(cauchy_data_map(f, zero, sp, integ), profile, sp, integ, margin);
    MorphismCheck chk;
    chk.lhs_norm = norm_momentum(lhs, sp.grid);
    chk.residual = norm_momentum(VectorXcd(lhs - rhs), sp.grid) /
                   std::max(norm_momentum(rhs, sp.grid), 1e-300);
    return chk;
}

}  // namespace msc
