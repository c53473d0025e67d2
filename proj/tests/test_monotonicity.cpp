#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "smp/monotonicity.hpp"

using namespace smp;

TEST_CASE("subadditive extension of a concave base") {
    // base -x^2 on [0,1]
    std::vector<double> xs, gs;
    for (int i = 0; i <= 200; ++i) {
        xs.push_back(i / 200.0);
        gs.push_back(-xs.back() * xs.back());
    }
    const auto g = GFunction::table(xs, gs);

    // base interval untouched
    for (double x : {0.1, 0.5, 0.99})
        REQUIRE(subadditive_extend(g, x) == Catch::Approx(-x * x).margin(1e-6));

    // shifted blocks: g(2.5) = 2 g(1) + g(0.5)
    REQUIRE(subadditive_extend(g, 2.5) == Catch::Approx(2.0 * (-1.0) + (-0.25)).margin(1e-6));

    // subadditivity on sampled pairs within [0, 4a]
    Rng rng(801);
    for (int i = 0; i < 2000; ++i) {
        const double x = rng.uniform(0.0, 2.0), y = rng.uniform(0.0, 4.0 - 2.0);
        REQUIRE(subadditive_extend(g, x + y) <=
                subadditive_extend(g, x) + subadditive_extend(g, y) + 1e-7);
    }

    REQUIRE_THROWS_AS(subadditive_extend(g, -1.0), input_error);
}

TEST_CASE("extension arithmetic on a non-concave base (evaluation only)") {
    // -sqrt on [0,1] is convex: the extension formula still evaluates
    // (2*(-1) + (-sqrt(0.5))), but the concavity audit refuses the
    // subadditive_extend contract for it
    std::vector<double> xs, gs;
    for (int i = 0; i <= 400; ++i) {
        xs.push_back(i / 400.0);
        gs.push_back(-std::sqrt(xs.back()));
    }
    const auto g = GFunction::table(xs, gs);
    REQUIRE(g.value(2.5) == Catch::Approx(-2.70710678118654752).margin(1e-5));
    REQUIRE_THROWS_AS(subadditive_extend(g, 2.5), precondition_error);
}

TEST_CASE("additivity audit: subadditive generators pass") {
    // concave generators with g(0) = 0 are subadditive
    REQUIRE(additivity_check(GFunction::neg_linear(0.7), 3, 400, 802).passed);
    REQUIRE(additivity_check(GFunction::neg_power(1.0, 2.0), 3, 400, 803).passed);
    REQUIRE(additivity_check(GFunction::log_inverse(2.0, 0.5), 2, 400, 804).passed);
}

TEST_CASE("additivity audit: superadditive generators fail with a scalar witness") {
    // -sqrt is convex (superadditive): g(2) = -sqrt(2) > -2 = g(1) + g(1)
    const auto sq = additivity_check(GFunction::neg_sqrt(), 2, 400, 805);
    REQUIRE_FALSE(sq.passed);
    REQUIRE(sq.scalar_witness.has_value());
    {
        const auto [x, y] = *sq.scalar_witness;
        const auto g = GFunction::neg_sqrt();
        REQUIRE(g.value(x + y) > g.value(x) + g.value(y));
    }

    const auto nr = additivity_check(GFunction::neg_ratio(), 2, 400, 806);
    REQUIRE_FALSE(nr.passed);
    REQUIRE(nr.scalar_witness.has_value());
    // the canonical witness: g(2) = -2/3 > -1 = g(1) + g(1)
    const auto g = GFunction::neg_ratio();
    REQUIRE(g.value(2.0) > g.value(1.0) + g.value(1.0));
}

TEST_CASE("matrix-level additivity agrees with the scalar verdict") {
    // subadditive: sampled members stay closed under addition
    {
        const auto g = GFunction::neg_power(1.0, 2.0);
        const auto spec = SubequationSpec::mg(g, 3);
        Rng rng(807);
        for (int i = 0; i < 400; ++i) {
            const auto a = sample_member(spec, rng, i % 2 ? 0.0 : std::abs(rng.gaussian()));
            const auto b = sample_member(spec, rng, 0.0);
            REQUIRE(spec.member(a + b));
        }
    }
    // superadditive: near-boundary members leave M(g) under addition
    {
        const auto g = GFunction::neg_sqrt();
        const auto spec = SubequationSpec::mg(g, 2);
        // boundary pair: A = B = diag(2, -1) has tr = 1, lambda_min = -1 = g(1)
        const auto a = SymMatrix::diag({2.0, -1.0});
        REQUIRE(spec.member(a));
        REQUIRE_FALSE(spec.member(a + a));
    }
}

TEST_CASE("dual characteristic of M(g): closed forms") {
    // g = -sqrt: inverse_neg(lam) = lam^2, so f = lam^2 + (n-1) lam
    const auto tab = mg_dual_char(GFunction::neg_sqrt(), 2, {0.0, 0.5, 1.0, 2.0});
    REQUIRE(tab.value_at(1.0) == Catch::Approx(2.0).epsilon(1e-12));
    REQUIRE(tab.value_at(2.0) == Catch::Approx(6.0).epsilon(1e-12));
    REQUIRE(tab.value_at(0.0) == 0.0);
    REQUIRE(tab.closed_form.has_value());

    // log-family: f(lam) = lam (alpha + n - 1 - 2 log lam)
    const double alpha = 2.0;
    const auto lt = mg_dual_char(GFunction::log_inverse(alpha, 0.5), 2, {0.1, 0.25, 0.4});
    for (double lam : {0.1, 0.25, 0.4})
        REQUIRE(lt.value_at(lam) ==
                Catch::Approx(lam * (alpha + 1.0 - 2.0 * std::log(lam))).margin(1e-9));

    // outside the attainable range of g the sentinel appears
    const auto nr = mg_dual_char(GFunction::neg_ratio(), 2, {0.5, 1.0, 2.0});
    REQUIRE(std::isfinite(nr.value_at(0.5)));
    REQUIRE(nr.value_at(2.0) == kInf);
}

TEST_CASE("generic dual membership of M(g) equals the explicit trace predicate") {
    const auto g = GFunction::neg_sqrt();
    const auto mg = SubequationSpec::mg(g, 3);
    Rng rng(808);
    for (int i = 0; i < 1000; ++i) {
        const SymMatrix a = random_symmetric(rng, 3, 2.0);
        const bool generic = mg.dual_member(a);
        const bool explicit_form = a.trace() >= 0.0 || lambda_max(a) >= -g.value(-a.trace());
        REQUIRE(generic == explicit_form);
    }
}

TEST_CASE("M(g) sits on the boundary at 0 and is its own monotonicity set") {
    const auto g = GFunction::neg_power(1.0, 2.0);
    const auto mg = SubequationSpec::mg(g, 3);
    REQUIRE(mg.member(SymMatrix::zero(3)));
    REQUIRE_FALSE(mg.member(SymMatrix::zero(3), true));

    Rng rng(809);
    for (int i = 0; i < 200; ++i) {
        const auto a = sample_member(mg, rng, 0.0);
        const auto v = monotonicity_membership(mg, a, 50, 900 + i);
        REQUIRE(v.consistent);
    }
}

TEST_CASE("monotonicity equivalence F + M in F iff dual F + M in dual F, on samples") {
    const auto g = GFunction::neg_power(1.0, 2.0);
    const auto mg = SubequationSpec::mg(g, 3);
    const auto dual = SubequationSpec::dual_of(mg);
    Rng rng(810);
    for (int i = 0; i < 200; ++i) {
        const auto m = sample_member(mg, rng, i % 2 ? 0.0 : std::abs(rng.gaussian()));
        const auto b = sample_member(dual, rng, 0.0);
        REQUIRE(dual.member(b + m));
    }
}

TEST_CASE("monotonicity membership spots non-directions") {
    // adding a negative multiple of a projector pushes boundary members of P out
    const auto v = monotonicity_membership(SubequationSpec::pos(2), SymMatrix::diag({-1.0, 0.0}),
                                           200, 811);
    REQUIRE_FALSE(v.consistent);
    REQUIRE(v.witness.has_value());

    // positive matrices are always monotonicity directions (positivity)
    Rng rng(812);
    for (const auto& spec : {SubequationSpec::pos(3), SubequationSpec::minmax_cone(0.5, 3),
                             SubequationSpec::mg(GFunction::neg_sqrt(), 3)}) {
        const auto p = random_psd(rng, 3, 1.0);
        REQUIRE(monotonicity_membership(spec, p, 100, 813).consistent);
    }

    // an empty probe ball raises
    REQUIRE_THROWS_AS(
        monotonicity_membership(SubequationSpec::halfspace(1e12, 2), SymMatrix::zero(2), 10, 814),
        numeric_error);
}

TEST_CASE("strong comparison reports") {
    // the log family: all gates pass
    const auto hold = scp_report(GFunction::log_inverse(2.0, 0.5), 2);
    REQUIRE(hold.scp == ScpReport::Outcome::Holds);
    REQUIRE(hold.additivity.passed);
    REQUIRE(hold.dual_classification.kind == Classification::Case::Borderline);
    REQUIRE(hold.integral.outcome == IntegralVerdict::Outcome::Divergent);

    // linear generators: uniformly elliptic cone case, still Holds
    REQUIRE(scp_report(GFunction::neg_linear(1.0), 3).scp == ScpReport::Outcome::Holds);

    // -x^2: additive, but the dual characteristic sqrt(lam) + lam has a
    // convergent integral, so the chain stops short of Holds
    const auto conv = scp_report(GFunction::neg_power(1.0, 2.0), 2);
    REQUIRE(conv.scp == ScpReport::Outcome::Unknown);
    REQUIRE(conv.additivity.passed);
    REQUIRE(conv.integral.outcome == IntegralVerdict::Outcome::Convergent);

    // non-subadditive generators stop at the additivity gate
    const auto nr = scp_report(GFunction::neg_ratio(), 2);
    REQUIRE(nr.scp == ScpReport::Outcome::Unknown);
    REQUIRE_FALSE(nr.additivity.passed);

    const auto sq = scp_report(GFunction::neg_sqrt(), 2);
    REQUIRE(sq.scp == ScpReport::Outcome::Unknown);
    REQUIRE_FALSE(sq.additivity.passed);
    // the dual characteristic itself is still the verified closed form
    REQUIRE(sq.dual_char.value_at(1.0) == Catch::Approx(2.0).epsilon(1e-12));

    const auto j = hold.to_json();
    REQUIRE(j["scp"] == "Holds");
    REQUIRE(j.contains("integral"));
}

TEST_CASE("log-family characteristic escapes every uniformly elliptic bound") {
    // f(lam)/lam = alpha + n - 1 - 2 log lam grows without bound toward 0
    const auto tab = mg_dual_char(GFunction::log_inverse(2.0, 0.5), 2,
                                  geometric_grid(1e-8, 0.4, 100));
    const double ratio_small = tab.values.front() / tab.lambdas.front();
    const double ratio_big = tab.values.back() / tab.lambdas.back();
    REQUIRE(ratio_small > 10.0 * ratio_big);
    REQUIRE(ratio_small > 30.0);
}
