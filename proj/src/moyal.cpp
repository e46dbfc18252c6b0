#include "moyal_scatter/moyal.hpp"

#include <cmath>

namespace msc {

PotentialKind potential_kind_from_string(const std::string& s) {
    if (s == "V0") return PotentialKind::V0;
    if (s == "Vi") return PotentialKind::Vi;
    if (s == "Vii") return PotentialKind::Vii;
    throw invalid_input("unknown potential kind: " + s);
}

std::string to_string(PotentialKind k) {
    switch (k) {
        case PotentialKind::V0: return "V0";
        case PotentialKind::Vi: return "Vi";
        case PotentialKind::Vii: return "Vii";
    }
    return "?";
}

namespace {

// twist phase u.Mk at lattice momenta; identically zero for p = 0
double twist(const ModelParams& model, const SpatialGrid& grid, const int* ku,
             const int* kk) {
    if (model.p == 0) return 0.0;
    double u[2], k[2];
    for (int d = 0; d < grid.dimension; ++d) {
        u[d] = grid.kvals[ku[d]];
        k[d] = grid.kvals[kk[d]];
    }
    double t = 0.0;
    for (int a = 0; a < grid.dimension; ++a)
        for (int b = 0; b < grid.dimension; ++b) t += u[a] * model.M_spatial(a, b) * k[b];
    return t;
}

}  // namespace

MatrixXcd twisted_kernel(const GridFunction& b, const ModelParams& model,
                         const SpatialGrid& grid, int phase_sign) {
    if (b.values.size() != grid.modes)
        throw invalid_input("twisted_kernel: grid mismatch");
    if (!b.values.allFinite()) throw invalid_input("twisted_kernel: non-finite input");
    const VectorXcd bhat = to_momentum(b.values, grid);
    const double pref = std::pow(2.0 * pi, -0.5 * grid.dimension) *
                        std::pow(grid.dk, grid.dimension);
    MatrixXcd ker(grid.modes, grid.modes);
    int mk[2], mu[2], md[2];
    for (int r = 0; r < grid.modes; ++r) {
        grid.unflatten(r, mk);
        for (int c = 0; c < grid.modes; ++c) {
            grid.unflatten(c, mu);
            for (int d = 0; d < grid.dimension; ++d) md[d] = grid.wrap(mk[d] - mu[d]);
            const cplx phase =
                std::exp(iu * (phase_sign * twist(model, grid, mu, mk)));
            ker(r, c) = pref * bhat[grid.flatten(md)] * phase;
        }
    }
    return ker;
}

GridFunction star_product(const GridFunction& f, const GridFunction& g,
                          const ModelParams& model, const SpatialGrid& grid) {
    if (f.values.size() != grid.modes || g.values.size() != grid.modes)
        throw invalid_input("star_product: grid mismatch");
    if (!f.values.allFinite() || !g.values.allFinite())
        throw invalid_input("star_product: non-finite input");
    const VectorXcd fhat = to_momentum(f.values, grid);
    const VectorXcd ghat = to_momentum(g.values, grid);
    const double pref = std::pow(2.0 * pi, -0.5 * grid.dimension) *
                        std::pow(grid.dk, grid.dimension);
    VectorXcd out_hat = VectorXcd::Zero(grid.modes);
    int mk[2], mu[2], md[2];
    for (int r = 0; r < grid.modes; ++r) {
        grid.unflatten(r, mk);
        cplx acc = 0.0;
        for (int c = 0; c < grid.modes; ++c) {
            grid.unflatten(c, mu);
            for (int d = 0; d < grid.dimension; ++d) md[d] = grid.wrap(mk[d] - mu[d]);
            const cplx phase = std::exp(iu * twist(model, grid, mu, mk));
            acc += fhat[grid.flatten(md)] * phase * ghat[c];
        }
        out_hat[r] = pref * acc;
    }
    GridFunction h;
    h.values = to_position(out_hat, grid);
    return h;
}

std::vector<cplx> star_gaussian_oracle(const GaussianSpec& f, const GaussianSpec& g,
                                       const ModelParams& model,
                                       const std::vector<std::vector<double>>& probes,
                                       double kmax, int nk) {
    const int s = model.s;
    if (s < 1 || s > 2) throw invalid_input("star_gaussian_oracle: s must be 1 or 2");
    if (nk < 8) throw invalid_input("star_gaussian_oracle: nk too small");
    const double h = 2.0 * kmax / nk;
    std::vector<double> kv(nk);
    for (int i = 0; i < nk; ++i) kv[i] = -kmax + (i + 0.5) * h;

    auto fhat = [&](const GaussianSpec& spec, const double* k) {
        double k2 = 0.0, kc = 0.0;
        for (int d = 0; d < s; ++d) {
            k2 += k[d] * k[d];
            if (!spec.center.empty()) kc += k[d] * spec.center[d];
        }
        const double w = spec.width;
        return spec.amplitude * std::pow(w, s) *
               std::exp(-0.5 * w * w * k2) * std::exp(-iu * kc);
    };

    // inner integral I(k) = int du fhat(k-u) e^{i u.Mk} ghat(u)
    const long nks = s == 1 ? nk : static_cast<long>(nk) * nk;
    std::vector<cplx> inner(nks);
    for (long ik = 0; ik < nks; ++ik) {
        double k[2] = {kv[ik % nk], 0.0};
        if (s == 2) {
            k[0] = kv[ik / nk];
            k[1] = kv[ik % nk];
        }
        double Mk[2] = {0.0, 0.0};
        for (int a = 0; a < s; ++a)
            for (int b = 0; b < s; ++b) Mk[a] += model.M_spatial(a, b) * k[b];
        cplx acc = 0.0;
        for (long iu_ = 0; iu_ < nks; ++iu_) {
            double u[2] = {kv[iu_ % nk], 0.0};
            if (s == 2) {
                u[0] = kv[iu_ / nk];
                u[1] = kv[iu_ % nk];
            }
            const double diff[2] = {k[0] - u[0], k[1] - u[1]};
            double uMk = 0.0;
            for (int d = 0; d < s; ++d) uMk += u[d] * Mk[d];
            acc += fhat(f, diff) * std::exp(iu * uMk) * fhat(g, u);
        }
        inner[ik] = acc * std::pow(h, s);
    }

    const double pref = std::pow(2.0 * pi, -s) * std::pow(h, s);
    std::vector<cplx> out;
    for (const auto& x : probes) {
        if (static_cast<int>(x.size()) != s)
            throw invalid_input("star_gaussian_oracle: probe dimension mismatch");
        cplx acc = 0.0;
        for (long ik = 0; ik < nks; ++ik) {
            double k[2] = {kv[ik % nk], 0.0};
            if (s == 2) {
                k[0] = kv[ik / nk];
                k[1] = kv[ik % nk];
            }
            double kx = 0.0;
            for (int d = 0; d < s; ++d) kx += k[d] * x[d];
            acc += inner[ik] * std::exp(iu * kx);
        }
        out.push_back(pref * acc);
    }
    return out;
}

namespace {

// lift a scalar momentum kernel to spinors (identity on the spinor index)
MatrixXcd kron_spinor(const MatrixXcd& ker, int N) {
    const long modes = ker.rows();
    MatrixXcd out = MatrixXcd::Zero(modes * N, modes * N);
    for (long r = 0; r < modes; ++r)
        for (long c = 0; c < modes; ++c)
            for (int a = 0; a < N; ++a) out(r * N + a, c * N + a) = ker(r, c);
    return out;
}

}  // namespace

OneParticleOperator left_mult_operator(const GridFunction& b, const ModelParams& model,
                                       const SpatialGrid& grid, const DiracRep& rep) {
    OneParticleOperator op;
    op.mat = kron_spinor(twisted_kernel(b, model, grid, +1), rep.N);
    op.label = "L_b";
    return op;
}

OneParticleOperator right_mult_operator(const GridFunction& b, const ModelParams& model,
                                        const SpatialGrid& grid, const DiracRep& rep) {
    OneParticleOperator op;
    op.mat = kron_spinor(twisted_kernel(b, model, grid, -1), rep.N);
    op.label = "R_b";
    return op;
}

OneParticleOperator potential_operator(PotentialKind kind, const GridFunction& b,
                                       const ModelParams& model, const SpatialGrid& grid,
                                       const DiracRep& rep) {
    const MatrixXcd g0 = blockdiag_spinor(rep.gammas[0], grid);
    OneParticleOperator op;
    switch (kind) {
        case PotentialKind::V0: {
            // plain multiplication by b: the untwisted convolution kernel
            ModelParams commutative = model;
            commutative.p = 0;
            op.mat = g0 * kron_spinor(twisted_kernel(b, commutative, grid, +1), rep.N);
            break;
        }
        case PotentialKind::Vi: {
            op.mat = g0 * (kron_spinor(twisted_kernel(b, model, grid, +1), rep.N) +
                           kron_spinor(twisted_kernel(b, model, grid, -1), rep.N));
            break;
        }
        case PotentialKind::Vii: {
            const MatrixXcd kl = twisted_kernel(b, model, grid, +1);
            const MatrixXcd kr = twisted_kernel(b, model, grid, -1);
            op.mat = g0 * kron_spinor(kl * kr, rep.N);
            break;
        }
    }
    op.label = "v_" + to_string(kind);
    return op;
}

}  // namespace msc
