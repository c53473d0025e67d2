#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "smp/characteristic.hpp"
#include "smp/counterexample.hpp"
#include "smp/radial.hpp"

using namespace smp;

namespace {

RadialFunction quadratic_profile(double c0, double c1, double c2, double lo, double hi, int n) {
    return RadialFunction::tabulate([=](double t) { return c0 + c1 * t + c2 * t * t; },
                                    [=](double t) { return c1 + 2.0 * c2 * t; },
                                    [=](double) { return 2.0 * c2; }, geometric_grid(lo, hi, n));
}

} // namespace

TEST_CASE("radial residual: direct arithmetic") {
    // psi = t^2/2 with f = id: residual = 1 + psi'/t = 2 everywhere
    const auto rf = quadratic_profile(0.0, 0.0, 0.5, 0.5, 3.0, 64);
    const auto rep = radial_residual(CharEval(FFunction::linear(1.0)), rf);
    for (double r : rep.residual) REQUIRE(r == Catch::Approx(2.0).margin(1e-12));
    REQUIRE(rep.nonneg());
    REQUIRE(rep.clamp_warnings == 0);
}

TEST_CASE("radial residual: out-of-range lambda clamps and counts") {
    const auto rf = quadratic_profile(0.0, -1.0, 0.0, 0.5, 2.0, 16); // psi' = -1 < 0
    CharacteristicTable tab;
    tab.lambdas = {0.0, 1.0};
    tab.values = {0.0, 1.0};
    const auto rep = radial_residual(CharEval(tab), rf);
    REQUIRE(rep.clamp_warnings == static_cast<int>(rf.size()));
}

TEST_CASE("radial grid validation") {
    RadialFunction rf;
    rf.ts = {0.0, 1.0};
    rf.psi = {0.0, 1.0};
    rf.psi1 = {1.0, 1.0};
    rf.psi2 = {0.0, 0.0};
    rf.flags = {0, 0};
    REQUIRE_THROWS_AS(radial_residual(CharEval(FFunction::zero()), rf), input_error);
}

TEST_CASE("monotone radial verification, both directions") {
    // psi = t, f = id: p = 1 >= 0 and residual f(1/t) > 0
    const auto up = quadratic_profile(0.0, 1.0, 0.0, 0.5, 3.0, 64);
    REQUIRE(verify_monotone_radial(CharEval(FFunction::linear(1.0)), up, Direction::Up).ok());

    // psi = -t: the up-side sign fails, the down-side sign holds
    const auto down = quadratic_profile(0.0, -1.0, 0.0, 0.5, 3.0, 64);
    CharacteristicTable flat;
    flat.lambdas = {-10.0, 10.0};
    flat.values = {0.0, 0.0};
    const auto vu = verify_monotone_radial(CharEval(flat), down, Direction::Up);
    REQUIRE_FALSE(vu.ok());
    REQUIRE(vu.sign_violations > 0);
    const auto vd = verify_monotone_radial(CharEval(flat), down, Direction::Down);
    REQUIRE(vd.sign_ok);
}

TEST_CASE("direction consistency under reflection (flat characteristic)") {
    // up-verdict for psi(t) matches the down-verdict for psi(C - t) when the
    // residual does not depend on psi'
    Rng rng(701);
    CharacteristicTable flat;
    flat.lambdas = {-100.0, 100.0};
    flat.values = {0.0, 0.0};
    for (int trial = 0; trial < 25; ++trial) {
        const double c2 = rng.gaussian();
        const double c1 = std::abs(rng.gaussian()) + 0.1;
        const auto rf = quadratic_profile(0.0, c1, c2, 0.5, 2.0, 48);
        const double C = 5.0;
        RadialFunction ref;
        for (std::size_t i = rf.size(); i-- > 0;) {
            ref.ts.push_back(C - rf.ts[i]);
            ref.psi.push_back(rf.psi[i]);
            ref.psi1.push_back(-rf.psi1[i]);
            ref.psi2.push_back(rf.psi2[i]);
            ref.flags.push_back(0);
        }
        const auto a = verify_monotone_radial(CharEval(flat), rf, Direction::Up);
        const auto b = verify_monotone_radial(CharEval(flat), ref, Direction::Down);
        REQUIRE(a.ok() == b.ok());
    }
}

TEST_CASE("plateau witness shape") {
    // cubic approach to a flat tail: psi = m - (t0 - t)^3 before t0
    const double t0 = 2.0, m = 1.0;
    auto psi = [&](double t) { return t < t0 ? m - std::pow(t0 - t, 3.0) : m; };
    auto dpsi = [&](double t) { return t < t0 ? 3.0 * std::pow(t0 - t, 2.0) : 0.0; };
    auto ddpsi = [&](double t) { return t < t0 ? -6.0 * (t0 - t) : 0.0; };
    const auto rf = RadialFunction::tabulate(psi, dpsi, ddpsi, geometric_grid(1.0, 3.0, 256));
    REQUIRE(smp_witness_check(rf));

    const auto line = quadratic_profile(0.0, 1.0, 0.0, 0.5, 3.0, 64);
    REQUIRE_FALSE(smp_witness_check(line));

    const auto constant = quadratic_profile(2.0, 0.0, 0.0, 0.5, 3.0, 64);
    REQUIRE_FALSE(smp_witness_check(constant));
}

TEST_CASE("jet consistency: radial hessians of a tabulated profile") {
    const auto rf = hopf_function(4.0, 1.0, 0.3, 2.0, 64);
    Rng rng(702);
    for (int s = 0; s < 20; ++s) {
        const std::size_t i = static_cast<std::size_t>(rng.uniform() * rf.size());
        const double t = rf.ts[i];
        auto dir = rng.unit_vector(3);
        std::vector<double> x(3);
        for (int k = 0; k < 3; ++k) x[k] = t * dir[k];
        const auto vals = eigen_sorted(radial_hessian(x, rf.psi1[i], rf.psi2[i])).values;
        std::vector<double> want{rf.psi1[i] / t, rf.psi1[i] / t, rf.psi2[i]};
        std::sort(want.begin(), want.end());
        for (int k = 0; k < 3; ++k) REQUIRE(vals[k] == Catch::Approx(want[k]).margin(1e-9));
    }
}

TEST_CASE("C2-scale equivalence of the residual and matrix membership") {
    // for invariant specs and a quadratic radial profile, the residual sign at t
    // agrees with membership of the radial hessian
    const auto grid_neg = [] {
        std::vector<double> g = default_lambda_grid(1e-6, 20.0, 80);
        const auto pos = g;
        for (double l : pos)
            if (l > 0.0) g.push_back(-l);
        std::sort(g.begin(), g.end());
        return g;
    }();
    Rng rng(703);
    for (const auto& spec : {SubequationSpec::pos(3), SubequationSpec::minmax_cone(0.5, 3)}) {
        const auto tab = char_fn(spec, Side::Upper, grid_neg);
        for (int trial = 0; trial < 40; ++trial) {
            const double c1 = rng.gaussian(), c2 = rng.gaussian();
            const double t = 0.5 + 2.0 * rng.uniform();
            const double p = c1 + 2.0 * c2 * t, a = 2.0 * c2;
            const double lam = p / t;
            if (std::abs(lam) > 15.0) continue;
            const double resid = a + tab.eval(lam);
            std::vector<double> x{t, 0.0, 0.0};
            const bool member = spec.member(radial_hessian(x, p, a));
            if (resid > 1e-6) REQUIRE(member);
            if (resid < -1e-6) REQUIRE_FALSE(member);
        }
    }
}

TEST_CASE("test-function reduction: fixed cases") {
    // B = 0 leaves the t-block alone
    const auto a0 = reduce_test_function({1.0, 0.0}, {0.0}, SymMatrix::diag({2.0, 1.0}),
                                         {{0.0, 0.0}}, SymMatrix::diag({3.0}));
    REQUIRE((a0.a_bar - SymMatrix::diag({2.0, 1.0})).max_abs() <= 1e-14);

    // k = l = 1, p = 1, A = 0, B = 1, C = 3: the reduced quadratic is t - t^2/3
    const auto r = reduce_test_function({1.0}, {0.0}, SymMatrix::diag({0.0}), {{1.0}},
                                        SymMatrix::diag({3.0}));
    REQUIRE(r.a_bar(0, 0) == Catch::Approx(-1.0 / 3.0).epsilon(1e-12));

    REQUIRE_THROWS_AS(reduce_test_function({1.0}, {0.5}, SymMatrix::diag({0.0}), {{1.0}},
                                           SymMatrix::diag({3.0})),
                      precondition_error);
    REQUIRE_THROWS_AS(reduce_test_function({1.0}, {0.0}, SymMatrix::diag({0.0}), {{1.0}},
                                           SymMatrix::diag({-3.0})),
                      precondition_error);
}

TEST_CASE("test-function reduction against the grid-minimization oracle") {
    Rng rng(704);
    for (int trial = 0; trial < 60; ++trial) {
        const int k = 1 + trial % 2;
        const int l = 1 + trial % 3;
        const auto p = rng.gaussian_vec(k);
        const SymMatrix A = random_symmetric(rng, k, 1.0);
        const SymMatrix C = random_psd(rng, l, 1.0) + SymMatrix::identity(l);
        std::vector<std::vector<double>> B(l);
        for (auto& row : B) row = rng.gaussian_vec(k);

        const auto red = reduce_test_function(p, std::vector<double>(l, 0.0), A, B, C);

        std::vector<double> t(k);
        for (auto& v : t) v = 0.02 * rng.gaussian();
        auto phi_y = [&](const std::vector<double>& y) {
            double s = 0.0;
            for (int i = 0; i < k; ++i) s += p[i] * t[i];
            const auto at = A.apply(t);
            for (int i = 0; i < k; ++i) s += at[i] * t[i];
            for (int r2 = 0; r2 < l; ++r2) {
                double bt = 0.0;
                for (int i = 0; i < k; ++i) bt += B[r2][i] * t[i];
                s += 2.0 * bt * y[r2];
            }
            const auto cy = C.apply(y);
            for (int r2 = 0; r2 < l; ++r2) s += cy[r2] * y[r2];
            return s;
        };
        const double direct = oracles::grid_min(phi_y, l, 0.5);
        REQUIRE(red.eval(t) == Catch::Approx(direct).margin(1e-6));
    }
}

TEST_CASE("radial csv round trip") {
    const auto rf = hopf_function(4.0, 1.0, 0.3, 2.0, 32);
    std::stringstream ss;
    rf.to_csv(ss);
    const auto back = RadialFunction::from_csv(ss);
    REQUIRE(back.size() == rf.size());
    for (std::size_t i = 0; i < rf.size(); ++i) {
        REQUIRE(back.ts[i] == rf.ts[i]);
        REQUIRE(back.psi[i] == rf.psi[i]);
        REQUIRE(back.psi1[i] == rf.psi1[i]);
        REQUIRE(back.psi2[i] == rf.psi2[i]);
    }
}
