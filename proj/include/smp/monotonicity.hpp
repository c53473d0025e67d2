#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "smp/characteristic.hpp"
#include "smp/errors.hpp"
#include "smp/scalar_fn.hpp"
#include "smp/subequation.hpp"

namespace smp {

/// Block-shift extension of a concave decreasing g from [0, a] to [0, inf):
///   g(x) = k g(a) + g(x - k a) for k a <= x <= (k+1) a.
/// Under concavity on the base interval this is the maximal subadditive
/// extension; concavity is audited here because the formula alone does not
/// guarantee subadditivity.
inline double subadditive_extend(const GFunction& g, double x) {
    if (!(x >= 0.0)) throw input_error("subadditive_extend: x must be >= 0");
    if (!g.decreasing_and_negative())
        throw precondition_error("subadditive_extend: g must be decreasing with g(0)=0");
    if (!g.concave_on_base())
        throw precondition_error("subadditive_extend: g must be concave on its base interval");
    const double a = g.base_hi();
    if (std::isinf(a) || x <= a) return g.value(x);
    const double k = std::floor(x / a);
    return k * g.value(a) + g.value(x - k * a);
}

struct AdditivityReport {
    bool passed = true;
    long trials = 0;
    std::optional<std::pair<double, double>> scalar_witness;          // g(x+y) > g(x)+g(y)
    std::optional<std::pair<SymMatrix, SymMatrix>> matrix_witness;    // A,B in M(g), A+B outside

    nlohmann::json to_json() const {
        nlohmann::json j{{"passed", passed}, {"trials", trials}};
        if (scalar_witness) j["scalar_witness"] = {scalar_witness->first, scalar_witness->second};
        if (matrix_witness) j["matrix_witness"] = "pair of members whose sum leaves M(g)";
        return j;
    }
};

/// Dual-level additivity audit of M(g): subadditivity of g on sampled scalar
/// pairs, and closure of M(g) under matrix addition on sampled members.  The
/// two levels agree exactly in theory; the report carries whichever witness
/// shows up first.
inline AdditivityReport additivity_check(const GFunction& g, int n, int trials, std::uint64_t seed) {
    if (trials < 1) throw input_error("additivity_check: trials must be >= 1");
    Rng rng(seed);
    AdditivityReport rep;

    const double a = g.base_hi();
    const double span = std::isinf(a) ? 5.0 : 2.0 * a;
    std::vector<std::pair<double, double>> pairs = {
        {1.0, 1.0}, {0.5, 0.5}, {span, span}, {span * 0.5, span}};
    for (int i = 0; i < trials; ++i)
        pairs.emplace_back(rng.uniform(0.0, 2.0 * span), rng.uniform(0.0, 2.0 * span));
    for (const auto& [x, y] : pairs) {
        ++rep.trials;
        const double lhs = g.value(x + y);
        const double rhs = g.value(x) + g.value(y);
        if (lhs > rhs + 1e-10 * (1.0 + std::abs(rhs))) {
            rep.passed = false;
            rep.scalar_witness = std::make_pair(x, y);
            return rep;
        }
    }

    const SubequationSpec mg = SubequationSpec::mg(g, n);
    for (int i = 0; i < trials; ++i) {
        ++rep.trials;
        const double off_a = (i % 2 == 0) ? 0.0 : std::abs(rng.gaussian());
        const double off_b = (i % 3 == 0) ? 0.0 : std::abs(rng.gaussian());
        const SymMatrix A = sample_member(mg, rng, off_a);
        const SymMatrix B = sample_member(mg, rng, off_b);
        if (!mg.member(A + B)) {
            rep.passed = false;
            rep.matrix_witness = std::make_pair(A, B);
            return rep;
        }
    }
    return rep;
}

/// Characteristic table of the dual of M(g) from the closed form
///   f(lambda) = g^{-1}(-lambda) + (n-1) lambda,  lambda >= 0,
/// with +inf sentinels where -lambda falls below the range of g.
inline CharacteristicTable mg_dual_char(const GFunction& g, int n,
                                        std::vector<double> lambda_grid = default_lambda_grid()) {
    if (n < 1) throw input_error("mg_dual_char: dimension must be >= 1");
    std::sort(lambda_grid.begin(), lambda_grid.end());
    lambda_grid.erase(std::unique(lambda_grid.begin(), lambda_grid.end()), lambda_grid.end());

    CharacteristicTable tab;
    for (double lam : lambda_grid) {
        if (lam < 0.0) continue; // the closed form covers lambda >= 0
        const double inv = g.inverse_neg(lam);
        tab.lambdas.push_back(lam);
        tab.values.push_back(std::isinf(inv) ? kInf : inv + (n - 1) * lam);
    }
    if (tab.lambdas.empty()) throw input_error("mg_dual_char: grid has no lambda >= 0");
    tab.meta.spec_id = "dual[mg[" + g.name() + "]],n=" + std::to_string(n);
    tab.meta.side = "formula";
    tab.meta.e_samples = 0;
    tab.closed_form = g.dual_char_closed_form(n);
    return tab;
}

struct MonotonicityVerdict {
    bool consistent = true;
    long samples = 0;
    std::optional<SymMatrix> witness; // B in F with B + A outside F

    nlohmann::json to_json() const {
        nlohmann::json j{{"consistent", consistent}, {"samples", samples}};
        if (witness) j["witness"] = "member B with B + A outside F";
        return j;
    }
};

/// One-sided test of A being a monotonicity direction for F, i.e. F + A
/// staying inside F.  Samples concentrate near the boundary of F (rays
/// bisected to the edge) because those are the binding points; a witness is
/// exact, consistency over N samples is a sampling claim.
inline MonotonicityVerdict monotonicity_membership(const SubequationSpec& specF, const SymMatrix& A,
                                                   int trials, std::uint64_t seed) {
    if (trials < 1) throw input_error("monotonicity_membership: trials must be >= 1");
    if (A.dim() != specF.dim()) throw input_error("monotonicity_membership: dimension mismatch");
    Rng rng(seed);
    MonotonicityVerdict v;
    for (int i = 0; i < trials; ++i) {
        const double off = (i % 4 == 0) ? std::abs(rng.gaussian()) : 0.0;
        const SymMatrix B = sample_member(specF, rng, off);
        ++v.samples;
        if (!specF.member(B + A)) {
            v.consistent = false;
            v.witness = B;
            return v;
        }
    }
    return v;
}

struct ScpReport {
    enum class Outcome { Holds, Unknown };
    std::string g_id;
    int n = 2;
    AdditivityReport additivity;
    Classification dual_classification;
    CharacteristicTable dual_char;
    IntegralVerdict integral;
    Outcome scp = Outcome::Unknown;

    static const char* outcome_name(Outcome o) { return o == Outcome::Holds ? "Holds" : "Unknown"; }

    nlohmann::json to_json() const {
        return {{"g", g_id},
                {"n", n},
                {"additivity", additivity.to_json()},
                {"dual_classification", dual_classification.to_json()},
                {"dual_char_meta", dual_char.meta_json()},
                {"integral", integral.to_json()},
                {"scp", outcome_name(scp)}};
    }
};

struct ScpOptions {
    int additivity_trials = 500;
    std::vector<double> lambda_grid = default_lambda_grid();
    IntegralOptions integral;
    ClassifyOptions classify_opts;
    double y0_cap = 1.0;
    std::uint64_t seed = 20240804u;
};

/// Strong-comparison report for M(g): additivity makes M(g) a monotonicity
/// subequation, its dual must come out borderline, and a divergent integral
/// of the dual characteristic at 0+ gives the strong maximum principle for
/// the dual — together those gates yield strong comparison.  Any failed gate
/// leaves the verdict Unknown with the gate's own evidence attached.
inline ScpReport scp_report(const GFunction& g, int n, const ScpOptions& opts = {}) {
    ScpReport rep;
    rep.g_id = g.name();
    rep.n = n;
    rep.additivity = additivity_check(g, n, opts.additivity_trials, opts.seed);

    const SubequationSpec dual = SubequationSpec::dual_of(SubequationSpec::mg(g, n));
    rep.dual_classification = classify(dual, opts.classify_opts);

    rep.dual_char = mg_dual_char(g, n, opts.lambda_grid);
    const double y0 = std::min(opts.y0_cap, rep.dual_char.lambdas.back());
    rep.integral = integral_test(rep.dual_char, y0, opts.integral);

    const bool gates = rep.additivity.passed &&
                       rep.dual_classification.kind == Classification::Case::Borderline &&
                       rep.integral.outcome == IntegralVerdict::Outcome::Divergent;
    rep.scp = gates ? ScpReport::Outcome::Holds : ScpReport::Outcome::Unknown;
    return rep;
}

} // namespace smp
