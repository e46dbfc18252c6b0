#include <doctest.h>

#include <random>

#include "moyal_scatter/fock.hpp"

using namespace msc;

namespace {

struct Setup {
    ModelParams model;
    DiracRep rep;
    SpatialGrid grid;
    SpectralData sp;
    ModeSelection sel;
    FockSpace fock;
};

Setup fock_setup(int num_modes = 4) {
    Setup s;
    s.model = build_model(2, 0, 0.0, 1.0);
    s.rep = build_dirac_rep(s.model);
    s.grid = make_grid(16.0, 32, 1);
    s.sp = build_spectral(s.model, s.grid, s.rep);
    s.sel = select_modes(s.sp, num_modes);
    s.fock = build_fock(s.sel, s.sp);
    return s;
}

MatrixXcd paired_conjugation(int M) {
    MatrixXcd Kc = MatrixXcd::Zero(2 * M, 2 * M);
    for (int j = 0; j < M; ++j) {
        Kc(j, M + j) = 1.0;
        Kc(M + j, j) = 1.0;
    }
    return Kc;
}

MatrixXcd random_c_odd_hermitian(int M, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    MatrixXcd A(2 * M, 2 * M);
    for (int r = 0; r < 2 * M; ++r)
        for (int c = 0; c < 2 * M; ++c) A(r, c) = cplx(nd(rng), nd(rng));
    const MatrixXcd Kc = paired_conjugation(M);
    A = 0.5 * (A + A.adjoint()).eval();
    A = 0.5 * (A - Kc * A.conjugate() * Kc).eval();
    return A;
}

}  // namespace

TEST_SUITE("fock") {

TEST_CASE("mode selection is C-paired and energy sorted") {
    const Setup s = fock_setup(4);
    REQUIRE(s.sel.num_modes == 4);
    const AntilinearOp C = charge_conjugation(s.grid, s.rep);
    const double wkw = s.grid.dk;
    for (int j = 0; j < 4; ++j) {
        // chi^- is the conjugate partner of chi^+
        CHECK((s.sel.chi_minus[j] - C.apply(s.sel.chi_plus[j])).norm() < 1e-12);
        // orthonormality in the momentum inner product
        for (int l = 0; l < 4; ++l) {
            const cplx pp = wkw * s.sel.chi_plus[j].dot(s.sel.chi_plus[l]);
            const cplx pm = wkw * s.sel.chi_plus[j].dot(s.sel.chi_minus[l]);
            CHECK(std::abs(pp - (j == l ? 1.0 : 0.0)) < 1e-12);
            CHECK(std::abs(pm) < 1e-12);
        }
    }
}

TEST_CASE("CAR algebra of the field matrices") {
    const Setup s = fock_setup(4);
    const long d = s.fock.dim;
    REQUIRE(d == 16);
    const MatrixXcd id = MatrixXcd::Identity(d, d);

    // {a_j, a_l^+} = delta_jl, {a_j, a_l} = 0, vacuum annihilated
    for (int j = 0; j < 4; ++j) {
        for (int l = 0; l < 4; ++l) {
            const MatrixXcd& aj = s.fock.a[j];
            const MatrixXcd& al = s.fock.a[l];
            CHECK((aj * al.adjoint() + al.adjoint() * aj - (j == l ? 1.0 : 0.0) * id)
                      .norm() < 1e-13);
            CHECK((aj * al + al * aj).norm() < 1e-13);
        }
        CHECK((s.fock.a[j] * s.fock.vacuum).norm() < 1e-14);
    }

    // psi(chi^-_j) = sqrt(2) a_j and psi(v)^* = psi(C v)
    for (int j = 0; j < 4; ++j) {
        const VectorXcd em = VectorXcd::Unit(8, 4 + j);
        CHECK((s.fock.psi_compressed(em) - std::sqrt(2.0) * s.fock.a[j]).norm() <
              1e-13);
    }
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    VectorXcd v(8);
    for (int i = 0; i < 8; ++i) v[i] = cplx(nd(rng), nd(rng));
    const MatrixXcd Kc = paired_conjugation(4);
    CHECK((s.fock.psi_compressed(v).adjoint() -
           s.fock.psi_compressed(VectorXcd(Kc * v.conjugate())))
              .norm() < 1e-12);
}

TEST_CASE("normal-ordered bilinear generates the one-particle action") {
    const Setup s = fock_setup(4);
    const MatrixXcd A = random_c_odd_hermitian(4, 17);
    const MatrixXcd G = normal_ordered_bilinear(A, s.fock);

    CHECK((G - G.adjoint()).norm() / G.norm() < 1e-13);
    // vacuum expectation subtracted
    CHECK(std::abs(s.fock.vacuum.dot(G * s.fock.vacuum)) < 1e-12);

    std::mt19937_64 rng(29);
    std::normal_distribution<double> nd;
    VectorXcd v(8);
    for (int i = 0; i < 8; ++i) v[i] = cplx(nd(rng), nd(rng));
    const MatrixXcd pv = s.fock.psi_compressed(v);
    const MatrixXcd pAv = s.fock.psi_compressed(VectorXcd(A * v));
    CHECK((G * pv - pv * G - pAv).norm() / pAv.norm() < 1e-12);
}

TEST_CASE("implementer intertwines and is exact for diagonal generators") {
    const Setup s = fock_setup(4);
    const MatrixXcd Kc = paired_conjugation(4);

    // diagonal C-odd generator: phases phi_j on chi^+, -phi_j on chi^-
    VectorXcd diag(8);
    const double phis[4] = {0.4, -0.9, 0.2, 1.1};
    for (int j = 0; j < 4; ++j) {
        diag[j] = phis[j];
        diag[4 + j] = -phis[j];
    }
    const MatrixXcd A = diag.asDiagonal();
    CHECK((Kc * A.conjugate() * Kc + A).norm() < 1e-14);

    const MatrixXcd T =
        VectorXcd((iu * diag.array()).exp()).asDiagonal().toDenseMatrix();
    const ImplementerResult ir = implementer(T, s.fock);
    CHECK(ir.unitarity_defect < 1e-12);
    for (int alpha = 0; alpha < 8; ++alpha) {
        const VectorXcd e = VectorXcd::Unit(8, alpha);
        const MatrixXcd lhs = ir.S * s.fock.psi_compressed(e) * ir.S.adjoint();
        const MatrixXcd rhs = s.fock.psi_compressed(VectorXcd(T * e));
        CHECK((lhs - rhs).norm() / rhs.norm() < 1e-12);
    }

    // in the diagonal case S coincides with e^{i :G(A):} including the phase
    const MatrixXcd G = normal_ordered_bilinear(A, s.fock);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(G);
    const MatrixXcd expG =
        es.eigenvectors() *
        (iu * es.eigenvalues().array().cast<cplx>()).exp().matrix().asDiagonal() *
        es.eigenvectors().adjoint();
    CHECK((ir.S - expG).norm() / expG.norm() < 1e-12);
}

TEST_CASE("implementer rejects a non-unitary compression") {
    const Setup s = fock_setup(3);
    MatrixXcd T = MatrixXcd::Identity(6, 6);
    T(0, 0) = 0.3;  // visibly non-unitary
    CHECK_THROWS_AS(implementer(T, s.fock), invalid_input);
}

}  // TEST_SUITE
