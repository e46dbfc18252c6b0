#include "moyal_scatter/clifford.hpp"

namespace msc {

ModelParams build_model(int q, int p, double theta, double mass) {
    if (p % 2 != 0) throw invalid_input("build_model: p must be even");
    if (q < 1) throw invalid_input("build_model: q must be >= 1 (time is commutative)");
    const int n = q + p;
    if (n != 2 && n != 3) throw invalid_input("build_model: only n = q+p in {2,3} supported");
    if (mass <= 0.0) throw invalid_input("build_model: mass must be positive");
    if (p > 0 && theta <= 0.0) throw invalid_input("build_model: theta must be positive when p > 0");

    ModelParams m;
    m.q = q;
    m.p = p;
    m.n = n;
    m.s = n - 1;
    m.theta = (p > 0) ? theta : 0.0;
    m.mass = mass;
    m.M = MatrixXd::Zero(n, n);
    if (p > 0) {
        // standard symplectic block on the trailing p-pair, first row/column zero
        const int off = q;  // pairs start after the commutative directions
        for (int j = 0; j + 1 < p; j += 2) {
            m.M(off + j, off + j + 1) = theta / 2.0;
            m.M(off + j + 1, off + j) = -theta / 2.0;
        }
    }
    m.M_spatial = m.M.bottomRightCorner(m.s, m.s);
    return m;
}

DiracRep build_dirac_rep(const ModelParams& model) {
    const cplx i = iu;
    MatrixXcd s1(2, 2), s2(2, 2), s3(2, 2);
    s1 << 0, 1, 1, 0;
    s2 << 0, -i, i, 0;
    s3 << 1, 0, 0, -1;

    DiracRep rep;
    rep.N = 2;  // 2^{n/2} for n=2, 2^{(n-1)/2} for n=3
    rep.metric = VectorXd::Ones(model.n);
    rep.metric.tail(model.n - 1).setConstant(-1.0);
    rep.gammas = {s3, i * s1};
    if (model.n == 3) rep.gammas.push_back(i * s2);
    // K with K conj(K) = 1 and K conj(gamma_mu) = -gamma_mu K
    rep.conj_matrix = s1;
    return rep;
}

}  // namespace msc
