#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "smp/io_util.hpp"
#include "smp/quadrature.hpp"
#include "smp/scalar_fn.hpp"
#include "smp/subequation.hpp"

namespace smp {

// ---------------------------------------------------------------------------
// characteristic tables
// ---------------------------------------------------------------------------

struct CharMeta {
    std::string spec_id;
    std::string side; // "upper" | "lower" | "formula"
    int e_samples = 1;
    double tol = 1e-10;
    double mu_cap = 1e12;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const {
        return {{"spec", spec_id}, {"side", side},       {"e_samples", e_samples},
                {"tol", tol},      {"mu_cap", mu_cap},   {"seed", seed}};
    }
};

/// Sampled monotone map lambda -> f(lambda) with +-inf sentinels.  The value
/// is the supremum of mu such that lambda P_{e perp} - mu P_e stays in F,
/// maximized (upper) or minimized (lower) over the probed directions e.
class CharacteristicTable {
public:
    std::vector<double> lambdas; // ascending
    std::vector<double> values;  // extended reals
    CharMeta meta;
    // attached when the catalog knows the closed form on lambda >= 0
    std::optional<FFunction> closed_form;

    bool monotone() const {
        for (std::size_t i = 1; i < values.size(); ++i)
            if (values[i] < values[i - 1] - 1e-12 * (1.0 + std::abs(values[i - 1]))) return false;
        return true;
    }

    // exact-node lookup; interpolation is eval()'s job
    double value_at(double lam) const {
        const auto it = std::lower_bound(lambdas.begin(), lambdas.end(), lam);
        if (it == lambdas.end() || std::abs(*it - lam) > 1e-12 * (1.0 + std::abs(lam)))
            throw input_error("CharacteristicTable: lambda is not a grid node");
        return values[static_cast<std::size_t>(it - lambdas.begin())];
    }

    /// Monotone interpolation: linear between finite neighbors, and the left
    /// value across a jump to a sentinel (f is increasing, so taking the left
    /// value never overstates f).  Outside the grid the edge value is used.
    double eval(double lam) const {
        if (lambdas.empty()) throw input_error("CharacteristicTable: empty table");
        if (lam <= lambdas.front()) return values.front();
        if (lam >= lambdas.back()) return values.back();
        const auto it = std::upper_bound(lambdas.begin(), lambdas.end(), lam);
        const std::size_t i = static_cast<std::size_t>(it - lambdas.begin());
        const double v0 = values[i - 1], v1 = values[i];
        if (std::isfinite(v0) && std::isfinite(v1)) {
            const double w = (lam - lambdas[i - 1]) / (lambdas[i] - lambdas[i - 1]);
            return v0 + w * (v1 - v0);
        }
        return v0;
    }

    // CSV: header row, '.' decimal, inf/-inf literals
    void to_csv(std::ostream& os) const {
        os << "lambda,f_value\n";
        for (std::size_t i = 0; i < lambdas.size(); ++i)
            os << format_real(lambdas[i]) << "," << format_real(values[i]) << "\n";
    }

    nlohmann::json meta_json() const {
        nlohmann::json j = meta.to_json();
        if (closed_form) j["closed_form"] = closed_form->to_json();
        j["points"] = lambdas.size();
        return j;
    }
};

inline std::vector<double> geometric_grid(double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi > lo) || points < 2) throw input_error("geometric_grid: bad parameters");
    std::vector<double> g(static_cast<std::size_t>(points));
    const double r = std::log(hi / lo) / (points - 1);
    for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo * std::exp(r * i);
    g.back() = hi;
    return g;
}

// default lambda grid: 0 plus a geometric sweep of [1e-8, 10]; the dense
// small-lambda end is where the divergence test lives
inline std::vector<double> default_lambda_grid(double lo = 1e-8, double hi = 10.0, int points = 200,
                                               bool include_zero = true) {
    std::vector<double> g = geometric_grid(lo, hi, points);
    if (include_zero) g.insert(g.begin(), 0.0);
    return g;
}

// ---------------------------------------------------------------------------
// char_fn: the mu-scan
// ---------------------------------------------------------------------------

enum class Side { Upper, Lower };

struct CharFnOptions {
    int e_samples = 64;      // random sphere directions on top of the axes
    double mu_cap = 1e12;    // membership at this mu reports +inf
    double tol = 1e-10;      // absolute bisection tolerance in mu
    std::uint64_t seed = 20240801u;
    bool force_multi_e = false; // probe many e even for invariant specs
    bool refine = false;        // hill-climb the best direction (off by default)
    int refine_steps = 20;
};

namespace detail {

/// sup{ mu : lambda P_{e perp} - mu P_e in F } for one direction e.
/// Membership along decreasing mu is a closed lower ray by positivity, so a
/// doubling bracket plus bisection is sound; a probe past the empty side
/// guards against specs that break the ray structure.
inline double mu_sup(const SubequationSpec& spec, double lambda, const std::vector<double>& e,
                     double mu_cap, double tol) {
    auto [pe, pp] = projector(e);
    auto in_f = [&](double mu) {
        SymMatrix m = pp;
        m *= lambda;
        SymMatrix s = pe;
        s *= mu;
        return spec.member(m - s);
    };

    double lo, hi; // invariant below: in_f(lo) true, in_f(hi) false
    if (in_f(0.0)) {
        lo = 0.0;
        hi = 1.0;
        while (in_f(hi)) {
            lo = hi;
            hi *= 2.0;
            if (hi >= mu_cap) return kInf;
        }
    } else {
        // probe moderate positive mu before concluding the set is empty: a
        // member above a non-member breaks the lower-ray structure; the
        // trace-degeneracy point (n-1)*lambda is where trace-gated fixtures
        // hide their islands
        const int n = spec.dim();
        for (double probe : {1.0, std::abs(lambda) + 1.0, (n - 1) * lambda, 17.0})
            if (in_f(probe))
                throw numeric_error(
                    "char_fn: membership in mu is not a lower ray (positivity violated) for " +
                    spec.id());
        hi = 0.0;
        lo = -1.0;
        while (!in_f(lo)) {
            hi = lo;
            lo *= 2.0;
            if (lo <= -mu_cap) return -kInf; // sup over the empty set
        }
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (in_f(mid))
            lo = mid;
        else
            hi = mid;
    }
    // ray-structure probe just beyond the empty side, at moderate scale only:
    // past ~1e8 the eigensolver noise on exact-boundary predicates dominates
    // and a flipped sign would be an artifact, not a violation
    if (std::abs(hi) <= 1e8 * (1.0 + std::abs(lambda)) &&
        in_f(hi + std::max(1.0, std::abs(hi))))
        throw numeric_error("char_fn: membership in mu is not a lower ray (positivity violated) for " +
                            spec.id());
    return 0.5 * (lo + hi);
}

inline std::vector<std::vector<double>> probe_directions(const SubequationSpec& spec,
                                                         const CharFnOptions& o, Rng& rng) {
    const int n = spec.dim();
    std::vector<std::vector<double>> dirs;
    if (spec.invariant() && !o.force_multi_e) {
        std::vector<double> e(static_cast<std::size_t>(n), 0.0);
        e[0] = 1.0;
        dirs.push_back(std::move(e));
        return dirs;
    }
    for (int i = 0; i < n; ++i) {
        std::vector<double> e(static_cast<std::size_t>(n), 0.0);
        e[static_cast<std::size_t>(i)] = 1.0;
        dirs.push_back(std::move(e));
    }
    for (int i = 0; i < o.e_samples; ++i) dirs.push_back(rng.unit_vector(n));
    return dirs;
}

} // namespace detail

std::optional<FFunction> known_char_form(const SubequationSpec& spec);

/// Builds the sampled characteristic table of a spec.  The upper side takes
/// the max over probed directions, the lower side the min; for orthogonally
/// invariant specs one direction is exact and is all that gets probed.  For
/// anything else the result is a seed-reproducible sampling approximation.
inline CharacteristicTable char_fn(const SubequationSpec& spec, Side side,
                                   std::vector<double> lambda_grid,
                                   const CharFnOptions& opts = {}) {
    if (lambda_grid.empty()) throw input_error("char_fn: empty lambda grid");
    if (!(opts.tol > 0.0) || opts.e_samples < 1 || !(opts.mu_cap > 0.0))
        throw input_error("char_fn: bad options");
    std::sort(lambda_grid.begin(), lambda_grid.end());
    lambda_grid.erase(std::unique(lambda_grid.begin(), lambda_grid.end()), lambda_grid.end());

    Rng rng(opts.seed);
    const auto dirs = detail::probe_directions(spec, opts, rng);

    CharacteristicTable tab;
    tab.lambdas = lambda_grid;
    tab.values.reserve(lambda_grid.size());
    tab.meta = {spec.id(), side == Side::Upper ? "upper" : "lower", static_cast<int>(dirs.size()),
                opts.tol, opts.mu_cap, opts.seed};

    for (double lam : lambda_grid) {
        double best = side == Side::Upper ? -kInf : kInf;
        std::vector<double> best_e = dirs.front();
        for (const auto& e : dirs) {
            const double v = detail::mu_sup(spec, lam, e, opts.mu_cap, opts.tol);
            if ((side == Side::Upper && v > best) || (side == Side::Lower && v < best)) {
                best = v;
                best_e = e;
            }
        }
        if (opts.refine && dirs.size() > 1) {
            for (int step = 0; step < opts.refine_steps; ++step) {
                auto cand = best_e;
                for (auto& x : cand) x += 0.2 * rng.gaussian();
                const double nrm = norm2(cand);
                if (nrm < 1e-9) continue;
                for (auto& x : cand) x /= nrm;
                const double v = detail::mu_sup(spec, lam, cand, opts.mu_cap, opts.tol);
                if ((side == Side::Upper && v > best) || (side == Side::Lower && v < best)) {
                    best = v;
                    best_e = cand;
                }
            }
        }
        tab.values.push_back(best);
    }
    tab.closed_form = known_char_form(spec);
    return tab;
}

/// Closed-form characteristic functions for the catalog entries where the
/// mu-scan has a known answer; used to certify integral verdicts and to
/// cross-check the numeric tables.
inline std::optional<FFunction> known_char_form(const SubequationSpec& spec) {
    using K = SubequationSpec::Kind;
    const int n = spec.dim();
    switch (spec.kind()) {
        case K::Pos: return FFunction::zero();
        case K::MinMaxCone: return FFunction::linear(spec.alpha());
        case K::PDelta:
            return n > 1 ? FFunction::linear(spec.delta() * (n - 1) / (1.0 + spec.delta()))
                         : FFunction::zero();
        case K::Pucci:
            return n > 1 ? FFunction::linear(spec.lam0() * (n - 1) / spec.Lam()) : FFunction::zero();
        case K::SigmaPsiK: {
            const double ratio = static_cast<double>(n) / spec.sigma_k() - 1.0;
            if (ratio <= 0.0) return FFunction::zero();
            return FFunction::linear(std::pow(ratio, 1.0 / spec.exponent()));
        }
        case K::MinMaxF:
        case K::MinTwoF: return spec.f();
        case K::Dual:
            if (spec.inner()->kind() == K::Mg) return spec.inner()->g()->dual_char_closed_form(n);
            return std::nullopt;
        default: return std::nullopt;
    }
}

// ---------------------------------------------------------------------------
// classification: generic / borderline / counterexample
// ---------------------------------------------------------------------------

struct CounterexampleWitness {
    SymMatrix matrix; // A in F - {0} with A <= 0
    std::optional<double> mu;
    std::optional<std::vector<double>> e;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["matrix"] = nlohmann::json::array();
        for (int i = 0; i < matrix.dim(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int c = 0; c < matrix.dim(); ++c) row.push_back(matrix(i, c));
            j["matrix"].push_back(row);
        }
        if (mu) j["mu"] = *mu;
        if (e) j["e"] = *e;
        // D^2 of this quadratic is exactly the witness matrix
        j["function"] = "u(x) = 0.5 * <A x, x>";
        return j;
    }
};

struct Classification {
    enum class Case { Generic, Borderline, Counterexample };
    Case kind = Case::Borderline;
    std::optional<CounterexampleWitness> witness;
    std::string rationale;
    double lower_char_at_zero = std::numeric_limits<double>::quiet_NaN();
    bool cross_check_ok = true;

    static const char* case_name(Case c) {
        switch (c) {
            case Case::Generic: return "Generic";
            case Case::Borderline: return "Borderline";
            case Case::Counterexample: return "Counterexample";
        }
        return "?";
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["case"] = case_name(kind);
        j["rationale"] = rationale;
        if (witness) j["witness"] = witness->to_json();
        if (kind == Case::Borderline) {
            j["lower_char_at_zero"] = json_real(lower_char_at_zero);
            j["cross_check_ok"] = cross_check_ok;
        }
        return j;
    }
};

struct ClassifyOptions {
    std::vector<double> probe_mus = {1e-6, 1e-3, 1e-1, 1.0, 1e3};
    int probe_dirs = 16;  // random e on top of the axes
    int psd_probes = 64;  // random A <= 0 probes
    double tol = 1e-8;    // |f_lower(0)| bound for the borderline cross-check
    std::uint64_t seed = 20240802u;
};

/// Trichotomy on F against the negative cone.  Generic and a found
/// counterexample witness are exact; "no witness over the probes" is a
/// sampling claim, cross-checked through the lower characteristic at 0.
inline Classification classify(const SubequationSpec& spec, const ClassifyOptions& opts = {}) {
    if (opts.probe_mus.empty() || opts.probe_dirs < 0) throw input_error("classify: empty probes");
    const int n = spec.dim();
    Classification cls;

    if (!spec.member(SymMatrix::zero(n))) {
        cls.kind = Classification::Case::Generic;
        cls.rationale = "0 is not a member, so F misses the negative cone entirely";
        return cls;
    }

    Rng rng(opts.seed);
    std::vector<std::vector<double>> dirs;
    for (int i = 0; i < n; ++i) {
        std::vector<double> e(static_cast<std::size_t>(n), 0.0);
        e[static_cast<std::size_t>(i)] = 1.0;
        dirs.push_back(std::move(e));
    }
    for (int i = 0; i < opts.probe_dirs; ++i) dirs.push_back(rng.unit_vector(n));

    for (const auto& e : dirs) {
        const auto pe = projector(e).first;
        for (double mu : opts.probe_mus) {
            SymMatrix m = pe;
            m *= -mu;
            if (spec.member(m)) {
                cls.kind = Classification::Case::Counterexample;
                cls.witness = CounterexampleWitness{m, mu, e};
                cls.rationale = "-mu P_e is a member for mu > 0";
                return cls;
            }
        }
    }
    for (int i = 0; i < opts.psd_probes; ++i) {
        SymMatrix m = -random_psd(rng, n, 1.0 + std::abs(rng.gaussian()));
        if (m.frobenius() < 1e-12) continue;
        if (spec.member(m)) {
            cls.kind = Classification::Case::Counterexample;
            cls.witness = CounterexampleWitness{m, std::nullopt, std::nullopt};
            cls.rationale = "found A <= 0, A != 0 inside F";
            return cls;
        }
    }

    cls.kind = Classification::Case::Borderline;
    double f0_hi = -kInf, f0_lo = kInf;
    for (const auto& e : dirs) {
        const double v = detail::mu_sup(spec, 0.0, e, 1e12, opts.tol * 0.1);
        f0_hi = std::max(f0_hi, v);
        f0_lo = std::min(f0_lo, v);
    }
    // borderline forces both characteristic functions to vanish at 0
    cls.lower_char_at_zero = std::abs(f0_lo) > std::abs(f0_hi) ? f0_lo : f0_hi;
    cls.cross_check_ok = std::isfinite(f0_lo) && std::isfinite(f0_hi) &&
                         std::abs(f0_lo) <= opts.tol && std::abs(f0_hi) <= opts.tol;
    cls.rationale = cls.cross_check_ok
                        ? "0 on the boundary and no negative member found over the probes"
                        : "probes found no negative member but the characteristic at 0 is off zero";
    return cls;
}

// ---------------------------------------------------------------------------
// integral test at 0+
// ---------------------------------------------------------------------------

struct IntegralVerdict {
    enum class Outcome { Divergent, Convergent, Inconclusive };
    Outcome outcome = Outcome::Inconclusive;
    std::vector<double> partial_sums; // dyadic I_k, k = 0..K
    std::string rationale;
    double y0 = 1.0;

    static const char* outcome_name(Outcome o) {
        switch (o) {
            case Outcome::Divergent: return "Divergent";
            case Outcome::Convergent: return "Convergent";
            case Outcome::Inconclusive: return "Inconclusive";
        }
        return "?";
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["verdict"] = outcome_name(outcome);
        j["rationale"] = rationale;
        j["y0"] = y0;
        j["partial_sums"] = nlohmann::json::array();
        for (double s : partial_sums) j["partial_sums"].push_back(json_real(s));
        return j;
    }
};

struct IntegralOptions {
    int octaves = 60;          // dyadic panels [2^{-k-1} y0, 2^{-k} y0], k = 0..octaves
    double simpson_rel = 1e-9;
    int decay_window = 10;     // trailing octaves examined by both rules
    double decay_floor = 1e-3; // divergent when inf(last I_k) >= floor * I_0
    double tail_bound = 1e-9;  // convergent when geometric remainder < bound * sum
};

/// Decides whether int_0+ dy / f(y) diverges.  A closed-form hint certifies
/// the verdict (the antiderivative is known); otherwise the dyadic partial
/// integrals decide heuristically and the evidence rides along in the record.
template <class Eval>
IntegralVerdict integral_test_eval(const Eval& f, double y0, FFunction::Hint hint,
                                   const IntegralOptions& opts = {}) {
    if (!(y0 > 0.0)) throw input_error("integral_test: y0 must be positive");
    IntegralVerdict v;
    v.y0 = y0;

    bool vanishing = false;
    double a = y0;
    for (int k = 0; k <= opts.octaves; ++k) {
        const double b = a;
        a = 0.5 * a;
        const double fa = f(a), fb = f(b);
        if (fa < 0.0 || fb < 0.0) throw input_error("integral_test: f negative on (0, y0]");
        if (fa == 0.0) {
            // f increasing with f(0) = 0: f vanishes on all of (0, a]
            vanishing = true;
            break;
        }
        const double ik = adaptive_simpson([&](double y) { return 1.0 / f(y); }, a, b, opts.simpson_rel);
        v.partial_sums.push_back(ik);
    }

    if (vanishing) {
        v.outcome = IntegralVerdict::Outcome::Divergent;
        v.rationale = "f vanishes on an initial interval, so 1/f is identically infinite there";
        return v;
    }
    if (hint == FFunction::Hint::Divergent) {
        v.outcome = IntegralVerdict::Outcome::Divergent;
        v.rationale = "closed form: antiderivative of 1/f diverges at 0+";
        return v;
    }
    if (hint == FFunction::Hint::Convergent) {
        v.outcome = IntegralVerdict::Outcome::Convergent;
        v.rationale = "closed form: antiderivative of 1/f is finite at 0+";
        return v;
    }

    double total = 0.0;
    for (double s : v.partial_sums) total += s;
    if (total == 0.0) {
        v.outcome = IntegralVerdict::Outcome::Convergent;
        v.rationale = "integrand vanishes on (0, y0] (f = +inf)";
        return v;
    }

    const std::size_t m = v.partial_sums.size();
    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(opts.decay_window), m - 1);
    double tail_inf = kInf, ratio_max = 0.0;
    for (std::size_t i = m - w; i < m; ++i) {
        tail_inf = std::min(tail_inf, v.partial_sums[i]);
        const double prev = v.partial_sums[i - 1];
        ratio_max = std::max(ratio_max, prev > 0.0 ? v.partial_sums[i] / prev : 0.0);
    }
    if (tail_inf >= opts.decay_floor * v.partial_sums.front()) {
        v.outcome = IntegralVerdict::Outcome::Divergent;
        v.rationale = "dyadic partial integrals do not decay";
        return v;
    }
    if (ratio_max < 1.0) {
        const double rem = v.partial_sums.back() * ratio_max / (1.0 - ratio_max);
        if (rem < opts.tail_bound * total) {
            v.outcome = IntegralVerdict::Outcome::Convergent;
            v.rationale = "sustained geometric decay with negligible tail bound";
            return v;
        }
    }
    v.outcome = IntegralVerdict::Outcome::Inconclusive;
    v.rationale = "partial integrals neither certify divergence nor bound the tail";
    return v;
}

inline IntegralVerdict integral_test(const FFunction& f, double y0, const IntegralOptions& opts = {}) {
    return integral_test_eval([&](double y) { return f(y); }, y0, f.integral_hint(), opts);
}

/// Table-backed test.  When a trusted closed form rides on the table it is
/// first checked against the sampled values, then certifies the verdict.
inline IntegralVerdict integral_test(const CharacteristicTable& tab, double y0,
                                     const IntegralOptions& opts = {}) {
    FFunction::Hint hint = FFunction::Hint::Unknown;
    bool form_ok = false;
    if (tab.closed_form) {
        form_ok = true;
        for (std::size_t i = 0; i < tab.lambdas.size(); ++i) {
            const double lam = tab.lambdas[i];
            if (!(lam >= 0.0) || lam > y0) continue;
            if (lam > tab.closed_form->valid_hi()) continue;
            const double want = (*tab.closed_form)(lam);
            const double got = tab.values[i];
            if (!std::isfinite(got) || std::abs(got - want) > 1e-4 * (1.0 + std::abs(want))) {
                form_ok = false;
                break;
            }
        }
        if (form_ok) hint = tab.closed_form->integral_hint();
    }
    if (form_ok && y0 <= tab.closed_form->valid_hi()) {
        auto v = integral_test_eval([&](double y) { return (*tab.closed_form)(y); }, y0, hint, opts);
        v.rationale += " (closed form validated against the sampled table)";
        return v;
    }
    auto v = integral_test_eval([&](double y) { return tab.eval(y); }, y0, hint, opts);
    if (tab.closed_form && !form_ok) v.rationale += " (attached closed form disagreed with the table and was ignored)";
    return v;
}

// ---------------------------------------------------------------------------
// strong maximum principle verdict
// ---------------------------------------------------------------------------

struct SmpReport {
    enum class Outcome { Holds, Fails, Undetermined };
    Outcome outcome = Outcome::Undetermined;
    Classification classification;
    std::optional<CharacteristicTable> upper_table, lower_table;
    std::optional<IntegralVerdict> upper_integral, lower_integral;
    std::string rationale;

    static const char* outcome_name(Outcome o) {
        switch (o) {
            case Outcome::Holds: return "Holds";
            case Outcome::Fails: return "Fails";
            case Outcome::Undetermined: return "Undetermined";
        }
        return "?";
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["verdict"] = outcome_name(outcome);
        j["rationale"] = rationale;
        j["classification"] = classification.to_json();
        if (upper_integral) j["upper_integral"] = upper_integral->to_json();
        if (lower_integral) j["lower_integral"] = lower_integral->to_json();
        if (upper_table) j["upper_table_meta"] = upper_table->meta_json();
        if (lower_table) j["lower_table_meta"] = lower_table->meta_json();
        return j;
    }
};

struct SmpOptions {
    CharFnOptions char_opts;
    std::vector<double> lambda_grid = default_lambda_grid();
    IntegralOptions integral;
    ClassifyOptions classify_opts;
    double y0_cap = 1.0;
};

/// Case split, then the integral test on the characteristic functions:
/// generic holds outright, a negative member fails outright with a quadratic
/// witness, and borderline is decided by the behavior of 1/f near 0 — with an
/// undetermined middle left standing when the upper test does not certify
/// divergence and the lower test does not certify convergence.
inline SmpReport smp_verdict(const SubequationSpec& spec, const SmpOptions& opts = {}) {
    SmpReport rep;
    rep.classification = classify(spec, opts.classify_opts);

    using Case = Classification::Case;
    if (rep.classification.kind == Case::Generic) {
        rep.outcome = SmpReport::Outcome::Holds;
        rep.rationale = "generic case: F misses a ball around 0";
        return rep;
    }
    if (rep.classification.kind == Case::Counterexample) {
        rep.outcome = SmpReport::Outcome::Fails;
        rep.rationale = "negative member A gives the counterexample u(x) = 0.5 <A x, x>";
        return rep;
    }

    rep.upper_table = char_fn(spec, Side::Upper, opts.lambda_grid, opts.char_opts);
    const double y0 = std::min(opts.y0_cap, rep.upper_table->lambdas.back());
    rep.upper_integral = integral_test(*rep.upper_table, y0, opts.integral);
    if (rep.upper_integral->outcome == IntegralVerdict::Outcome::Divergent) {
        rep.outcome = SmpReport::Outcome::Holds;
        rep.rationale = "borderline with divergent integral of 1/f_upper at 0+";
        return rep;
    }

    if (spec.invariant() && !opts.char_opts.force_multi_e) {
        rep.lower_table = rep.upper_table; // both sides coincide for invariant specs
        rep.lower_table->meta.side = "lower(=upper)";
    } else {
        rep.lower_table = char_fn(spec, Side::Lower, opts.lambda_grid, opts.char_opts);
    }
    rep.lower_integral = integral_test(*rep.lower_table, y0, opts.integral);
    if (rep.lower_integral->outcome == IntegralVerdict::Outcome::Convergent) {
        rep.outcome = SmpReport::Outcome::Fails;
        rep.rationale = "borderline with convergent integral of 1/f_lower at 0+";
        return rep;
    }

    rep.outcome = SmpReport::Outcome::Undetermined;
    rep.rationale = "borderline, but neither divergence of the upper test nor convergence of the "
                    "lower test was certified";
    return rep;
}

// ---------------------------------------------------------------------------
// cone invariants
// ---------------------------------------------------------------------------

struct ConeInvariants {
    double alpha = 0.0;      // f(1)
    double alpha_star = 0.0; // -f(-1)
    double riesz_p = 1.0;    // alpha + 1
    SmpReport::Outcome smp = SmpReport::Outcome::Holds;

    nlohmann::json to_json() const {
        return {{"alpha", json_real(alpha)},
                {"alpha_star", json_real(alpha_star)},
                {"riesz_p", json_real(riesz_p)},
                {"smp", SmpReport::outcome_name(smp)}};
    }
};

/// Scaling invariants of a cone subequation.  The cone property is audited on
/// random (A, t) pairs first; for a cone the characteristic function is
/// linear on each half-line, so f collapses to alpha = f(1), alpha* = -f(-1),
/// and the Riesz characteristic alpha + 1.  Finite alpha decides the strong
/// maximum principle for cones.
inline ConeInvariants cone_invariants(const SubequationSpec& spec, int audit_samples = 32,
                                      std::uint64_t seed = 20240803u, double mu_cap = 1e12,
                                      double tol = 1e-10) {
    Rng rng(seed);
    const int n = spec.dim();
    for (int i = 0; i < audit_samples; ++i) {
        const SymMatrix a = random_symmetric(rng, n);
        const double t = std::exp(rng.uniform(-2.0, 2.0));
        SymMatrix ta = a;
        ta *= t;
        if (spec.member(a) != spec.member(ta))
            throw precondition_error("cone_invariants: not a cone, scaling witness t=" +
                                     std::to_string(t) + " flips membership for " + spec.id());
    }

    CharFnOptions o;
    o.mu_cap = mu_cap;
    o.tol = tol;
    Rng drng(seed + 1);
    const auto dirs = detail::probe_directions(spec, o, drng);
    auto upper_at = [&](double lam) {
        double best = -kInf;
        for (const auto& e : dirs) best = std::max(best, detail::mu_sup(spec, lam, e, mu_cap, tol));
        return best;
    };

    ConeInvariants inv;
    inv.alpha = upper_at(1.0);
    inv.alpha_star = -upper_at(-1.0);
    inv.riesz_p = std::isinf(inv.alpha) ? kInf : inv.alpha + 1.0;
    inv.smp = std::isfinite(inv.alpha) ? SmpReport::Outcome::Holds : SmpReport::Outcome::Fails;
    return inv;
}

// ---------------------------------------------------------------------------
// containment certificates
// ---------------------------------------------------------------------------

struct ContainmentReport {
    long samples = 0;         // candidates drawn
    long members_checked = 0; // candidates that landed in spec A
    bool violated = false;
    std::optional<SymMatrix> witness; // in A but not in B

    nlohmann::json to_json() const {
        nlohmann::json j{{"samples", samples},
                         {"members_checked", members_checked},
                         {"violated", violated}};
        if (witness) {
            nlohmann::json w = nlohmann::json::array();
            for (int i = 0; i < witness->dim(); ++i) {
                nlohmann::json row = nlohmann::json::array();
                for (int c = 0; c < witness->dim(); ++c) row.push_back((*witness)(i, c));
                w.push_back(row);
            }
            j["witness"] = w;
        }
        return j;
    }
};

/// One-sided check of A subset B on a ball in matrix space: a returned
/// witness disproves containment exactly; "no violation over N members" is
/// evidence, not proof.  Half the candidates are plain draws from the ball,
/// half are near-boundary members of A rescaled into it.
inline ContainmentReport containment_check(const SubequationSpec& specA, const SubequationSpec& specB,
                                           int trials, std::uint64_t seed, double radius = 4.0) {
    if (specA.dim() != specB.dim()) throw input_error("containment_check: dimension mismatch");
    Rng rng(seed);
    ContainmentReport rep;
    for (int i = 0; i < trials; ++i) {
        ++rep.samples;
        SymMatrix m = SymMatrix::zero(specA.dim());
        if (i % 2 == 0) {
            m = random_symmetric(rng, specA.dim());
            const double nrm = m.frobenius();
            if (nrm > 0.0) m *= radius * rng.uniform() / nrm;
        } else {
            try {
                m = sample_member(specA, rng, 0.0);
            } catch (const numeric_error&) {
                continue;
            }
            const double nrm = m.frobenius();
            if (nrm > 0.0) m *= radius * rng.uniform() / nrm;
        }
        if (!specA.member(m)) continue;
        ++rep.members_checked;
        if (!specB.member(m)) {
            rep.violated = true;
            rep.witness = m;
            return rep;
        }
    }
    return rep;
}

} // namespace smp
