#include "moyal_scatter/dynamics.hpp"

#include <cmath>

namespace msc {

SpectralData build_spectral(const ModelParams& model, const SpatialGrid& grid,
                            const DiracRep& rep) {
    if (grid.dimension != model.s)
        throw invalid_input("build_spectral: grid dimension must equal model.s");
    SpectralData sp;
    sp.model = model;
    sp.rep = rep;
    sp.grid = grid;
    const int N = rep.N;
    sp.dim = static_cast<long>(grid.modes) * N;
    sp.Hhat.resize(grid.modes);
    sp.absH.resize(grid.modes);
    sp.pplus.resize(grid.modes);
    sp.pminus.resize(grid.modes);
    const MatrixXcd id = MatrixXcd::Identity(N, N);
    int idx[2] = {0, 0};
    for (int m = 0; m < grid.modes; ++m) {
        grid.unflatten(m, idx);
        double k2 = 0.0;
        MatrixXcd H = rep.gammas[0] * model.mass;
        for (int d = 0; d < grid.dimension; ++d) {
            const double kd = grid.kvals[idx[d]];
            k2 += kd * kd;
            H += rep.gammas[0] * rep.gammas[1 + d] * kd;
        }
        sp.Hhat[m] = H;
        sp.absH[m] = std::sqrt(k2 + model.mass * model.mass);
        sp.pplus[m] = 0.5 * (id + H / sp.absH[m]);
        sp.pminus[m] = 0.5 * (id - H / sp.absH[m]);
    }
    return sp;
}

namespace {

OneParticleOperator assemble_blockdiag(const SpectralData& sp,
                                       const std::function<MatrixXcd(int)>& block,
                                       const std::string& label) {
    const int N = sp.rep.N;
    OneParticleOperator op;
    op.mat = MatrixXcd::Zero(sp.dim, sp.dim);
    for (int m = 0; m < sp.grid.modes; ++m)
        op.mat.block(static_cast<long>(m) * N, static_cast<long>(m) * N, N, N) = block(m);
    op.label = label;
    return op;
}

}  // namespace

OneParticleOperator operator_H0(const SpectralData& sp) {
    return assemble_blockdiag(sp, [&](int m) { return sp.Hhat[m]; }, "H0");
}

OneParticleOperator operator_abs_H0(const SpectralData& sp) {
    const MatrixXcd id = MatrixXcd::Identity(sp.rep.N, sp.rep.N);
    return assemble_blockdiag(sp, [&](int m) { return MatrixXcd(sp.absH[m] * id); },
                              "|H0|");
}

OneParticleOperator operator_eps(const SpectralData& sp) {
    return assemble_blockdiag(sp, [&](int m) { return MatrixXcd(sp.Hhat[m] / sp.absH[m]); },
                              "eps");
}

OneParticleOperator projector_plus(const SpectralData& sp) {
    return assemble_blockdiag(sp, [&](int m) { return sp.pplus[m]; }, "p_+");
}

OneParticleOperator projector_minus(const SpectralData& sp) {
    return assemble_blockdiag(sp, [&](int m) { return sp.pminus[m]; }, "p_-");
}

OneParticleOperator free_propagator(double t, const SpectralData& sp) {
    const MatrixXcd id = MatrixXcd::Identity(sp.rep.N, sp.rep.N);
    OneParticleOperator op = assemble_blockdiag(
        sp,
        [&](int m) {
            return MatrixXcd(std::cos(sp.absH[m] * t) * id +
                             iu * std::sin(sp.absH[m] * t) * sp.Hhat[m] / sp.absH[m]);
        },
        "exp(itH)");
    return op;
}

void dress_rows(Eigen::Ref<MatrixXcd> X, double t, int sign, const SpectralData& sp) {
    const int N = sp.rep.N;
    const MatrixXcd id = MatrixXcd::Identity(N, N);
    for (int m = 0; m < sp.grid.modes; ++m) {
        const MatrixXcd E = std::cos(sp.absH[m] * t) * id +
                            cplx(0.0, sign) * std::sin(sp.absH[m] * t) * sp.Hhat[m] /
                                sp.absH[m];
        X.middleRows(static_cast<long>(m) * N, N) =
            E * X.middleRows(static_cast<long>(m) * N, N);
    }
}

void dress_cols(Eigen::Ref<MatrixXcd> X, double t, int sign, const SpectralData& sp) {
    const int N = sp.rep.N;
    const MatrixXcd id = MatrixXcd::Identity(N, N);
    for (int m = 0; m < sp.grid.modes; ++m) {
        const MatrixXcd E = std::cos(sp.absH[m] * t) * id +
                            cplx(0.0, sign) * std::sin(sp.absH[m] * t) * sp.Hhat[m] /
                                sp.absH[m];
        X.middleCols(static_cast<long>(m) * N, N) =
            X.middleCols(static_cast<long>(m) * N, N) * E;
    }
}

double TimeBump::operator()(double t) const {
    const double tau = (t - center) / half_width;
    if (std::abs(tau) >= 1.0) return 0.0;
    return amplitude * std::exp(1.0 - 1.0 / (1.0 - tau * tau));
}

double PotentialProfile::a_tilde(double t) const {
    const double at = a(t);
    return coupling * ((kind == PotentialKind::Vii) ? at * at : at);
}

MatrixXcd potential_matrix(const PotentialProfile& profile, const SpectralData& sp) {
    return potential_operator(profile.kind, profile.b_space, sp.model, sp.grid, sp.rep)
        .mat;
}

namespace {

// true if a_tilde vanishes identically on the closed interval
bool bump_free(const PotentialProfile& profile, double ta, double tb) {
    if (profile.coupling == 0.0 || profile.a.amplitude == 0.0) return true;
    if (ta > tb) std::swap(ta, tb);
    return tb <= profile.lambda_minus() || ta >= profile.lambda_plus();
}

// X must already be in the interaction picture anchored at absolute time:
// Xtilde(t) = e^{+i t H0} X(t).  Applies -i a~(t) e^{itH0} v e^{-itH0}.
template <class M>
M ip_derivative(double t, const M& X, const PotentialProfile& profile,
                const MatrixXcd& vmat, const SpectralData& sp) {
    const double at = profile.a_tilde(t);
    if (at == 0.0) return M::Zero(X.rows(), X.cols());
    M W = X;
    dress_rows(W, t, -1, sp);
    W = vmat * W;
    dress_rows(W, t, +1, sp);
    return M(-iu * at * W);
}

template <class M>
M evolve_ip(const M& X0, double t_from, double t_to, const PotentialProfile& profile,
            const MatrixXcd& vmat, const SpectralData& sp, const IntegratorSpec& integ) {
    if (integ.dt <= 0.0) throw invalid_input("evolve: integrator dt must be positive");
    M X = X0;
    dress_rows(X, t_from, +1, sp);
    const double span = t_to - t_from;
    if (span != 0.0) {
        const int nsteps = std::max(1, static_cast<int>(std::ceil(std::abs(span) / integ.dt - 1e-12)));
        const double h = span / nsteps;
        for (int n = 0; n < nsteps; ++n) {
            const double t = t_from + n * h;
            if (bump_free(profile, t, t + h)) continue;  // exact: derivative is 0
            const M k1 = ip_derivative(t, X, profile, vmat, sp);
            const M k2 = ip_derivative(t + h / 2, M(X + (h / 2) * k1), profile, vmat, sp);
            const M k3 = ip_derivative(t + h / 2, M(X + (h / 2) * k2), profile, vmat, sp);
            const M k4 = ip_derivative(t + h, M(X + h * k3), profile, vmat, sp);
            X += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!X.allFinite())
                throw numerical_error("evolve: non-finite state (integrator blow-up)");
        }
    }
    dress_rows(X, t_to, -1, sp);
    return X;
}

VectorXcd evolve_dyson(const VectorXcd& vhat, double t_from, double t_to,
                       const PotentialProfile& profile, const MatrixXcd& vmat,
                       const SpectralData& sp, const IntegratorSpec& integ) {
    if (integ.dyson_order < 0) throw invalid_input("evolve: dyson_order must be >= 0");
    VectorXcd v0 = vhat;
    dress_rows(v0, t_from, +1, sp);
    const double span = t_to - t_from;
    const int nsteps = std::max(1, static_cast<int>(std::ceil(std::abs(span) / integ.dt - 1e-12)));
    const double h = span / nsteps;
    std::vector<double> times(nsteps + 1);
    for (int i = 0; i <= nsteps; ++i) times[i] = t_from + i * h;

    VectorXcd total = v0;
    std::vector<VectorXcd> w_prev(times.size(), v0);
    for (int order = 1; order <= integ.dyson_order; ++order) {
        std::vector<VectorXcd> w_cur(times.size());
        VectorXcd g_prev = ip_derivative(times[0], w_prev[0], profile, vmat, sp);
        w_cur[0] = VectorXcd::Zero(v0.size());
        for (size_t i = 1; i < times.size(); ++i) {
            const VectorXcd g_i = ip_derivative(times[i], w_prev[i], profile, vmat, sp);
            w_cur[i] = w_cur[i - 1] + (h / 2) * (g_prev + g_i);
            g_prev = g_i;
        }
        total += w_cur.back();
        w_prev = std::move(w_cur);
    }
    dress_rows(total, t_to, -1, sp);
    return total;
}

}  // namespace

VectorXcd evolve_hat(const VectorXcd& vhat, double t_from, double t_to,
                     const PotentialProfile& profile, const MatrixXcd& vmat,
                     const SpectralData& sp, const IntegratorSpec& integ) {
    if (integ.method == "rk4-interaction-picture")
        return evolve_ip(vhat, t_from, t_to, profile, vmat, sp, integ);
    if (integ.method == "dyson")
        return evolve_dyson(vhat, t_from, t_to, profile, vmat, sp, integ);
    throw invalid_input("evolve: unknown integrator method " + integ.method);
}

MatrixXcd evolve_matrix_hat(const MatrixXcd& X, double t_from, double t_to,
                            const PotentialProfile& profile, const MatrixXcd& vmat,
                            const SpectralData& sp, const IntegratorSpec& integ) {
    if (integ.method != "rk4-interaction-picture")
        throw invalid_input("evolve_matrix_hat: only rk4-interaction-picture supported");
    return evolve_ip(X, t_from, t_to, profile, vmat, sp, integ);
}

GridSpinor evolve(const GridSpinor& v, double t_from, double t_to,
                  const PotentialProfile& profile, const SpectralData& sp,
                  const IntegratorSpec& integ) {
    const MatrixXcd vmat = potential_matrix(profile, sp);
    const VectorXcd vhat = spinor_to_momentum(v, sp.grid);
    const VectorXcd out = evolve_hat(vhat, t_from, t_to, profile, vmat, sp, integ);
    return spinor_from_momentum(out, sp.grid, sp.rep.N);
}

OneParticleOperator evolution_operator(double t_from, double t_to,
                                       const PotentialProfile& profile,
                                       const SpectralData& sp,
                                       const IntegratorSpec& integ) {
    const MatrixXcd vmat = potential_matrix(profile, sp);
    OneParticleOperator op;
    op.mat = evolve_matrix_hat(MatrixXcd::Identity(sp.dim, sp.dim), t_from, t_to, profile,
                               vmat, sp, integ);
    op.label = "T_V";
    return op;
}

int SpacetimeField::index_of_time(double t) const {
    const int n = static_cast<int>(std::lround((t - t0) / dt));
    if (n < 0 || n >= count() || std::abs(time(n) - t) > 1e-9 * std::max(1.0, std::abs(t)))
        throw invalid_input("SpacetimeField: time not on the sampled grid");
    return n;
}

SpacetimeField make_field(const SpatialGrid& grid, int N, double t0, double dt,
                          int count) {
    if (dt <= 0.0 || count < 2) throw invalid_input("make_field: bad time sampling");
    SpacetimeField f;
    f.t0 = t0;
    f.dt = dt;
    f.N = N;
    f.slices.assign(count, make_spinor(grid, N));
    return f;
}

namespace {

// gamma^0 applied blockwise to momentum coefficients
VectorXcd apply_g0(const VectorXcd& vhat, const SpectralData& sp) {
    const int N = sp.rep.N;
    VectorXcd out(vhat.size());
    for (int m = 0; m < sp.grid.modes; ++m)
        out.segment(static_cast<long>(m) * N, N) =
            sp.rep.gammas[0] * vhat.segment(static_cast<long>(m) * N, N);
    return out;
}

}  // namespace

SpacetimeField fundamental_solution(int sign, const SpacetimeField& f,
                                    const PotentialProfile& profile,
                                    const SpectralData& sp, const IntegratorSpec& integ) {
    if (sign != 1 && sign != -1) throw invalid_input("fundamental_solution: sign must be +-1");
    const int M = f.count();
    if (M < 2) throw invalid_input("fundamental_solution: empty time support");
    const MatrixXcd vmat = potential_matrix(profile, sp);
    const int N = sp.rep.N;

    // momentum-space source slices g = gamma^0 f
    std::vector<VectorXcd> g(M);
    for (int n = 0; n < M; ++n)
        g[n] = apply_g0(spinor_to_momentum(f.slices[n], sp.grid), sp);

    SpacetimeField out = make_field(sp.grid, N, f.t0, f.dt, M);
    const cplx pref = cplx(0.0, sign) * f.dt / 2.0;  // +- i dt/2 trapezoid half-weight

    if (sign == +1) {
        VectorXcd psi = pref * g[0];
        out.slices[0] = spinor_from_momentum(psi, sp.grid, N);
        for (int n = 0; n + 1 < M; ++n) {
            const VectorXcd stepped = evolve_hat(VectorXcd(psi + pref * g[n]), f.time(n),
                                                 f.time(n + 1), profile, vmat, sp, integ);
            psi = stepped + pref * g[n + 1];
            out.slices[n + 1] = spinor_from_momentum(psi, sp.grid, N);
        }
    } else {
        VectorXcd psi = pref * g[M - 1];
        out.slices[M - 1] = spinor_from_momentum(psi, sp.grid, N);
        for (int n = M - 1; n > 0; --n) {
            const VectorXcd stepped = evolve_hat(VectorXcd(psi + pref * g[n]), f.time(n),
                                                 f.time(n - 1), profile, vmat, sp, integ);
            psi = stepped + pref * g[n - 1];
            out.slices[n - 1] = spinor_from_momentum(psi, sp.grid, N);
        }
    }
    return out;
}

SpacetimeField causal_propagator(const SpacetimeField& f, const PotentialProfile& profile,
                                 const SpectralData& sp, const IntegratorSpec& integ) {
    SpacetimeField plus = fundamental_solution(+1, f, profile, sp, integ);
    const SpacetimeField minus = fundamental_solution(-1, f, profile, sp, integ);
    for (int n = 0; n < plus.count(); ++n)
        plus.slices[n].values -= minus.slices[n].values;
    return plus;
}

cplx pairing(const SpacetimeField& f, const SpacetimeField& h,
             const PotentialProfile& profile, const SpectralData& sp,
             const IntegratorSpec& integ) {
    const SpacetimeField Rh = causal_propagator(h, profile, sp, integ);
    cplx acc = 0.0;
    for (int n = 0; n < f.count(); ++n) {
        const double w = (n == 0 || n == f.count() - 1) ? 0.5 : 1.0;
        acc += w * f.dt * inner_position(f.slices[n], Rh.slices[n], sp.grid);
    }
    return iu * acc;
}

VectorXcd cauchy_data_map(const SpacetimeField& f, const PotentialProfile& profile,
                          const SpectralData& sp, const IntegratorSpec& integ) {
    const SpacetimeField Rf = causal_propagator(f, profile, sp, integ);
    const int n0 = Rf.index_of_time(0.0);
    return spinor_to_momentum(Rf.slices[n0], sp.grid);
}

SpacetimeField dirac_apply(const SpacetimeField& phi, const PotentialProfile& profile,
                           const SpectralData& sp) {
    const int M = phi.count();
    const int N = sp.rep.N;
    SpacetimeField out = make_field(sp.grid, N, phi.t0, phi.dt, M);
    const bool has_potential = profile.a.amplitude != 0.0 && profile.coupling != 0.0;
    MatrixXcd Vspatial;  // gamma^0 v = the potential term of D_V
    if (has_potential) {
        const MatrixXcd g0 = blockdiag_spinor(sp.rep.gammas[0], sp.grid);
        Vspatial = g0 * potential_matrix(profile, sp);
    }
    std::vector<VectorXcd> hat(M);
    for (int n = 0; n < M; ++n) hat[n] = spinor_to_momentum(phi.slices[n], sp.grid);
    for (int n = 1; n + 1 < M; ++n) {
        // -i gamma^0 d_t phi, centered
        VectorXcd res =
            -iu * apply_g0(VectorXcd((hat[n + 1] - hat[n - 1]) / (2.0 * phi.dt)), sp);
        // spatial part gamma^j k_j + m = gamma^0 Hhat(k)
        for (int m = 0; m < sp.grid.modes; ++m)
            res.segment(static_cast<long>(m) * N, N) +=
                sp.rep.gammas[0] * sp.Hhat[m] * hat[n].segment(static_cast<long>(m) * N, N);
        if (has_potential) {
            const double at = profile.a_tilde(phi.time(n));
            if (at != 0.0) res += at * (Vspatial * hat[n]);
        }
        out.slices[n] = spinor_from_momentum(res, sp.grid, N);
    }
    return out;
}

SpacetimeField free_solution(const VectorXcd& what, const SpectralData& sp, double t0,
                             double dt, int count) {
    SpacetimeField out = make_field(sp.grid, sp.rep.N, t0, dt, count);
    for (int n = 0; n < count; ++n) {
        VectorXcd v = what;
        dress_rows(v, out.time(n), -1, sp);
        out.slices[n] = spinor_from_momentum(v, sp.grid, sp.rep.N);
    }
    return out;
}

double chi_prime(double t, double tau0, double tau1) {
    // normalization of exp(-1/(1-tau^2)) on (-1,1), computed once
    static const double bump_integral = [] {
        const int K = 20000;
        double acc = 0.0;
        for (int i = 0; i < K; ++i) {
            const double tau = -1.0 + (i + 0.5) * (2.0 / K);
            acc += std::exp(-1.0 / (1.0 - tau * tau)) * (2.0 / K);
        }
        return acc;
    }();
    const double mid = 0.5 * (tau0 + tau1), hw = 0.5 * (tau1 - tau0);
    const double tau = (t - mid) / hw;
    if (std::abs(tau) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - tau * tau)) / (bump_integral * hw);
}

}  // namespace msc
