#include <doctest.h>

#include <random>

#include "moyal_scatter/scattering.hpp"

using namespace msc;

namespace {

struct Setup {
    ModelParams model;
    DiracRep rep;
    SpatialGrid grid;
    SpectralData sp;
    PotentialProfile profile;
    IntegratorSpec integ;
};

Setup commutative_setup(double amplitude = 0.5) {
    Setup s;
    s.model = build_model(2, 0, 0.0, 1.0);
    s.rep = build_dirac_rep(s.model);
    s.grid = make_grid(16.0, 64, 1);
    s.sp = build_spectral(s.model, s.grid, s.rep);
    s.profile.a = TimeBump{0.0, 0.5, amplitude};
    s.profile.b_space = gaussian(s.grid, 1.0, 1.0);
    s.profile.kind = PotentialKind::V0;
    s.integ.dt = 5e-3;
    return s;
}

Setup moyal_setup(double amplitude = 0.4) {
    Setup s;
    s.model = build_model(1, 2, 0.5, 1.0);
    s.rep = build_dirac_rep(s.model);
    s.grid = make_grid(6.0, 12, 2);
    s.sp = build_spectral(s.model, s.grid, s.rep);
    s.profile.a = TimeBump{0.0, 0.5, amplitude};
    s.profile.b_space = gaussian(s.grid, 1.2, 1.0);
    s.profile.kind = PotentialKind::Vi;
    s.integ.dt = 5e-3;
    return s;
}

}  // namespace

TEST_SUITE("scattering") {

TEST_CASE("zero potential scatters trivially") {
    Setup s = commutative_setup(0.0);
    const OneParticleOperator T = scattering_operator(s.profile, s.sp, s.integ, 1.0);
    CHECK((T.mat - MatrixXcd::Identity(s.sp.dim, s.sp.dim)).norm() < 1e-12);
}

TEST_CASE("margin independence of the dressed operator") {
    for (Setup s : {commutative_setup(), moyal_setup()}) {
        const OneParticleOperator Ta = scattering_operator(s.profile, s.sp, s.integ, 1.0);
        const OneParticleOperator Tb = scattering_operator(s.profile, s.sp, s.integ, 0.4);
        CHECK((Ta.mat - Tb.mat).norm() / Ta.mat.norm() < 1e-10);
    }
}

TEST_CASE("dT_sc is hermitian and drives the coupling derivative") {
    for (Setup s : {commutative_setup(), moyal_setup()}) {
        const OneParticleOperator dT = d_scattering(s.profile, s.sp, 1e-3);
        CHECK((dT.mat - dT.mat.adjoint()).norm() / dT.mat.norm() < 1e-10);

        // T^lambda = 1 + i lambda dT + O(lambda^2)
        std::vector<double> resid;
        for (double lam : {0.1, 0.05}) {
            PotentialProfile p = s.profile;
            p.coupling = lam;
            const OneParticleOperator T =
                scattering_operator(p, s.sp, s.integ, 1.0);
            resid.push_back((T.mat - MatrixXcd::Identity(s.sp.dim, s.sp.dim) -
                             iu * lam * dT.mat)
                                .norm() /
                            dT.mat.norm());
        }
        CHECK(resid[0] / resid[1] > 3.0);  // quadratic shrink, ~4x per halving
        CHECK(resid[0] / resid[1] < 5.0);

        // central finite difference (T^l - T^-l)/(2l) = i dT + O(l^2)
        PotentialProfile pp = s.profile, pm = s.profile;
        pp.coupling = 1e-3;
        pm.coupling = -1e-3;
        const MatrixXcd fd =
            (scattering_operator(pp, s.sp, s.integ, 1.0).mat -
             scattering_operator(pm, s.sp, s.integ, 1.0).mat) /
            (2e-3);
        CHECK((fd - iu * dT.mat).norm() / dT.mat.norm() < 1e-4);
    }
}

TEST_CASE("kernel-formula oracle for the pair-creating HS norm") {
    for (Setup s : {commutative_setup(), moyal_setup()}) {
        const OneParticleOperator dT = d_scattering(s.profile, s.sp, 1e-3);
        MatrixXcd pd = MatrixXcd::Zero(s.sp.dim, s.sp.dim);
        const int N = s.rep.N;
        for (int m = 0; m < s.grid.modes; ++m)
            pd.block(static_cast<long>(m) * N, static_cast<long>(m) * N, N, N) =
                s.sp.pplus[m];
        const double hs = hs_norm(MatrixXcd(pd * dT.mat * (MatrixXcd::Identity(s.sp.dim, s.sp.dim) - pd)));
        const double oracle = hs_dT_kernel_oracle(s.profile, s.sp, 1e-3);
        CHECK(std::abs(hs - oracle) / oracle < 1e-6);
    }
}

TEST_CASE("implementability report computes relative cauchy differences") {
    std::vector<ScatteringResult> rows(3);
    rows[0].hs_offdiag = 1.00;
    rows[1].hs_offdiag = 1.02;
    rows[2].hs_offdiag = 1.03;
    rows[0].hs_dT = 0.50;
    rows[1].hs_dT = 0.505;
    rows[2].hs_dT = 0.506;
    const ImplementabilityReport rep = implementability_report(std::move(rows));
    REQUIRE(rep.cauchy_offdiag.size() == 2);
    CHECK(rep.cauchy_offdiag[0] == doctest::Approx(0.02 / 1.02));
    CHECK(rep.cauchy_dT[1] == doctest::Approx(0.001 / 0.506));
    CHECK(rep.implementable);
}

TEST_CASE("bogoliubov derivative is linear in the coupling") {
    Setup s = commutative_setup();
    const double t0 = -1.6, dt = 5e-3;
    const int count = static_cast<int>(std::lround(3.2 / dt)) + 1;
    SpacetimeField f = make_field(s.grid, s.rep.N, t0, dt, count);
    const TimeBump src{0.0, 0.4, 1.0};
    const GridFunction prof = gaussian(s.grid, 0.9, 1.0, {0.3});
    for (int n = 0; n < count; ++n) {
        const double at = src(f.time(n));
        if (at == 0.0) continue;
        for (int j = 0; j < s.grid.modes; ++j)
            for (int a = 0; a < s.rep.N; ++a)
                f.slices[n].values[static_cast<long>(j) * s.rep.N + a] =
                    at * prof.values[j] * (1.0 + 0.25 * a);
    }
    const BogoliubovReport br = bogoliubov_derivative_check(
        f, s.profile, s.sp, s.integ, {1e-2, 1e-3}, 1.0);
    CHECK(br.ratio == doctest::Approx(10.0).epsilon(0.02));
    CHECK(br.extrapolated / br.rhs_norm < 1e-3);
}

TEST_CASE("langmann-mickelsson probe reports finite norms") {
    Setup s = moyal_setup();
    const LmProbeReport rep = lm_condition_probe(s.profile.b_space, s.sp, 2, 2);
    CHECK(rep.bound_holds);
    for (const LmProbeRow& r : rep.rows) {
        CHECK(std::isfinite(r.op_norm));
        CHECK(std::isfinite(r.hs_norm));
        CHECK(r.hs_norm >= 0.0);
    }
}

}  // TEST_SUITE
