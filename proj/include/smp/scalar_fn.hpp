#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "smp/errors.hpp"
#include "smp/io_util.hpp"
#include "smp/quadrature.hpp"

namespace smp {

/// Scalar characteristic-function catalog: increasing f on [0, inf) with
/// f(0) = 0.  Closed forms carry their own divergence knowledge for the
/// integral test at 0+ (the antiderivative of 1/f is known), which is what
/// turns a numeric octave scan into a certified verdict.
class FFunction {
public:
    enum class Kind { Zero, Linear, Sqrt, Power, PowLin, LogLinear };
    enum class Hint { Divergent, Convergent, Unknown };

    static FFunction zero() { return FFunction(Kind::Zero); }

    static FFunction linear(double c = 1.0) {
        FFunction f(Kind::Linear);
        f.c_ = require_positive(c, "linear slope");
        return f;
    }

    static FFunction sqrt_fn() { return FFunction(Kind::Sqrt); }

    static FFunction power(double c, double q) {
        FFunction f(Kind::Power);
        f.c_ = require_positive(c, "power prefactor");
        f.q_ = require_positive(q, "power exponent");
        return f;
    }

    // c*y^q + c1*y: the dual-of-M(g) shape for the power-law generators
    static FFunction pow_lin(double c, double q, double c1) {
        FFunction f(Kind::PowLin);
        f.c_ = require_positive(c, "pow_lin prefactor");
        f.q_ = require_positive(q, "pow_lin exponent");
        if (c1 < 0.0) throw input_error("FFunction: pow_lin linear part must be >= 0");
        f.c1_ = c1;
        return f;
    }

    static FFunction poly2(double c2, double c1) { return pow_lin(c2, 2.0, c1); }

    // y * (C - 2 log y), the borderline log family; valid (increasing,
    // positive) on [0, hi] with hi <= e^{(C-2)/2}
    static FFunction log_linear(double C, double hi) {
        FFunction f(Kind::LogLinear);
        f.c_ = C;
        const double cap = std::exp(0.5 * (C - 2.0));
        f.hi_ = std::min(require_positive(hi, "log_linear endpoint"), cap);
        return f;
    }

    Kind kind() const { return kind_; }
    double valid_hi() const { return hi_; }

    double operator()(double y) const {
        if (!(y >= 0.0)) throw input_error("FFunction: argument must be >= 0");
        switch (kind_) {
            case Kind::Zero: return 0.0;
            case Kind::Linear: return c_ * y;
            case Kind::Sqrt: return std::sqrt(y);
            case Kind::Power: return c_ * std::pow(y, q_);
            case Kind::PowLin: return c_ * std::pow(y, q_) + c1_ * y;
            case Kind::LogLinear: return y > 0.0 ? y * (c_ - 2.0 * std::log(y)) : 0.0;
        }
        return 0.0;
    }

    // Divergence of int dy/f at 0+, when the closed form decides it.
    Hint integral_hint() const {
        switch (kind_) {
            case Kind::Zero: return Hint::Divergent;      // 1/f = inf on (0, y0]
            case Kind::Linear: return Hint::Divergent;    // log y
            case Kind::Sqrt: return Hint::Convergent;     // 2 sqrt y
            case Kind::Power: return q_ >= 1.0 ? Hint::Divergent : Hint::Convergent;
            case Kind::PowLin:
                // near 0 the smaller exponent dominates f
                return q_ < 1.0 ? Hint::Convergent : Hint::Divergent;
            case Kind::LogLinear: return Hint::Divergent; // -(1/2) log(C - 2 log y)
        }
        return Hint::Unknown;
    }

    std::string name() const {
        std::ostringstream os;
        switch (kind_) {
            case Kind::Zero: os << "zero"; break;
            case Kind::Linear: os << "linear(c=" << c_ << ")"; break;
            case Kind::Sqrt: os << "sqrt"; break;
            case Kind::Power: os << "power(c=" << c_ << ",q=" << q_ << ")"; break;
            case Kind::PowLin: os << "powlin(" << c_ << "*y^" << q_ << "+" << c1_ << "*y)"; break;
            case Kind::LogLinear: os << "loglinear(C=" << c_ << ",hi=" << hi_ << ")"; break;
        }
        return os.str();
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        switch (kind_) {
            case Kind::Zero: j["kind"] = "zero"; break;
            case Kind::Linear:
                j["kind"] = "linear";
                j["c"] = c_;
                break;
            case Kind::Sqrt: j["kind"] = "sqrt"; break;
            case Kind::Power:
                j["kind"] = "power";
                j["c"] = c_;
                j["q"] = q_;
                break;
            case Kind::PowLin:
                j["kind"] = "pow-lin";
                j["c"] = c_;
                j["q"] = q_;
                j["c1"] = c1_;
                break;
            case Kind::LogLinear:
                j["kind"] = "log-linear";
                j["C"] = c_;
                j["hi"] = hi_;
                break;
        }
        return j;
    }

    static FFunction from_json(const nlohmann::json& j) {
        const std::string k = j.at("kind").get<std::string>();
        if (k == "zero") return zero();
        if (k == "linear") return linear(j.value("c", 1.0));
        if (k == "sqrt") return sqrt_fn();
        if (k == "power") return power(j.at("c").get<double>(), j.at("q").get<double>());
        if (k == "pow-lin")
            return pow_lin(j.at("c").get<double>(), j.at("q").get<double>(), j.at("c1").get<double>());
        if (k == "poly2") return poly2(j.at("c2").get<double>(), j.at("c1").get<double>());
        if (k == "log-linear") return log_linear(j.at("C").get<double>(), j.at("hi").get<double>());
        throw input_error("FFunction: unknown kind '" + k + "'");
    }

    bool increasing_on(double lo, double hi, int samples = 1000) const {
        double prev = (*this)(std::max(lo, 0.0));
        for (int i = 1; i <= samples; ++i) {
            const double y = lo + (hi - lo) * i / samples;
            const double v = (*this)(y);
            if (v < prev - 1e-12 * (1.0 + std::abs(prev))) return false;
            prev = v;
        }
        return true;
    }

private:
    explicit FFunction(Kind k) : kind_(k) {}

    static double require_positive(double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw input_error(std::string("FFunction: ") + what + " must be positive and finite");
        return v;
    }

    Kind kind_;
    double c_ = 1.0;
    double q_ = 0.5;
    double c1_ = 0.0;
    double hi_ = kInf;
};

/// Decreasing g on [0, a] with g(0) = 0 and g < 0 on (0, a], the generator of
/// the trace-gated monotonicity sets M(g) = {tr A >= 0, lambda_min >= g(tr A)}.
/// Bounded-domain entries extend to [0, inf) by block shifts
///   g(x) = k g(a) + g(x - k a),  k a <= x <= (k+1) a,
/// the maximal subadditive extension when g is concave on the base interval.
class GFunction {
public:
    enum class Kind { NegSqrt, NegLinear, NegPower, LogInverse, NegRatio, Table };

    static GFunction neg_sqrt() { return GFunction(Kind::NegSqrt); }

    static GFunction neg_linear(double delta) {
        GFunction g(Kind::NegLinear);
        if (!(delta > 0.0)) throw input_error("GFunction: delta must be positive");
        g.delta_ = delta;
        return g;
    }

    // -c x^p with p >= 1: concave, hence subadditive
    static GFunction neg_power(double c, double p) {
        GFunction g(Kind::NegPower);
        if (!(c > 0.0) || !(p >= 1.0)) throw input_error("GFunction: neg_power needs c > 0, p >= 1");
        g.delta_ = c;
        g.p_ = p;
        return g;
    }

    // g with inverse h(lam) = g^{-1}(-lam) = lam (alpha - 2 log lam) on
    // [0, lam_hi]; lam_hi is shrunk until h' > 0 there.
    static GFunction log_inverse(double alpha, double lam_hi = 0.5) {
        GFunction g(Kind::LogInverse);
        if (!(lam_hi > 0.0)) throw input_error("GFunction: lam_hi must be positive");
        g.alpha_ = alpha;
        double a = lam_hi;
        while (alpha - 2.0 - 2.0 * std::log(a) <= 0.0) {
            a *= 0.5;
            if (a < 1e-300) throw input_error("GFunction: no increasing interval for this alpha");
        }
        g.lam_hi_ = a;
        return g;
    }

    // -x/(1+x): decreasing, g(0)=0, but not subadditive (witness x=y=1)
    static GFunction neg_ratio() { return GFunction(Kind::NegRatio); }

    static GFunction table(std::vector<double> xs, std::vector<double> gs, bool extended = true) {
        GFunction g(Kind::Table);
        if (xs.size() != gs.size() || xs.size() < 2) throw input_error("GFunction: bad table");
        if (xs.front() != 0.0 || gs.front() != 0.0) throw input_error("GFunction: table must start at (0,0)");
        for (std::size_t i = 1; i < xs.size(); ++i) {
            if (!(xs[i] > xs[i - 1])) throw input_error("GFunction: table x not increasing");
            if (!(gs[i] <= gs[i - 1])) throw input_error("GFunction: table g not decreasing");
            if (!(gs[i] < 0.0)) throw input_error("GFunction: table g must be negative for x > 0");
        }
        g.xs_ = std::move(xs);
        g.gs_ = std::move(gs);
        g.extended_ = extended;
        return g;
    }

    Kind kind() const { return kind_; }
    bool extended() const { return extended_; }
    double alpha() const { return alpha_; }

    // right endpoint of the base domain (+inf for globally defined forms)
    double base_hi() const {
        switch (kind_) {
            case Kind::NegSqrt:
            case Kind::NegLinear:
            case Kind::NegPower:
            case Kind::NegRatio: return kInf;
            case Kind::LogInverse: return h_of(lam_hi_);
            case Kind::Table: return xs_.back();
        }
        return kInf;
    }

    double value(double x) const {
        if (!(x >= 0.0)) throw input_error("GFunction: argument must be >= 0");
        const double a = base_hi();
        if (x <= a || std::isinf(a)) return base_value(x);
        if (!extended_) throw input_error("GFunction: argument beyond base domain and extension disabled");
        const double k = std::floor(x / a);
        return k * base_value(a) + base_value(x - k * a);
    }

    // g^{-1}(-lam) for lam >= 0; +inf when -lam is below the attainable range.
    double inverse_neg(double lam) const {
        if (!(lam >= 0.0)) throw input_error("GFunction: inverse_neg needs lam >= 0");
        if (lam == 0.0) return 0.0;
        switch (kind_) {
            case Kind::NegSqrt: return lam * lam;
            case Kind::NegLinear: return lam / delta_;
            case Kind::NegPower: return std::pow(lam / delta_, 1.0 / p_);
            case Kind::NegRatio: return lam < 1.0 ? lam / (1.0 - lam) : kInf;
            case Kind::LogInverse:
                if (lam <= lam_hi_) return h_of(lam);
                return extended_ ? block_inverse(lam) : kInf;
            case Kind::Table: {
                const double gmin = gs_.back();
                if (lam <= -gmin) return invert_table(lam);
                return extended_ ? block_inverse(lam) : kInf;
            }
        }
        return kInf;
    }

    // audits used by preconditions
    bool decreasing_and_negative(int samples = 1000) const {
        const double a = std::isinf(base_hi()) ? 10.0 : base_hi();
        double prev = value(0.0);
        if (prev != 0.0) return false;
        for (int i = 1; i <= samples; ++i) {
            const double x = a * i / samples;
            const double v = value(x);
            if (v > prev + 1e-12 || v >= 0.0) return false;
            prev = v;
        }
        return true;
    }

    bool concave_on_base(int samples = 1000) const {
        const double a = std::isinf(base_hi()) ? 10.0 : base_hi();
        const double h = a / samples;
        for (int i = 1; i < samples; ++i) {
            const double x = i * h;
            const double second = base_value(x - h) - 2.0 * base_value(x) + base_value(x + h);
            if (second > 1e-9 * (1.0 + std::abs(base_value(x)))) return false;
        }
        return true;
    }

    std::string name() const {
        std::ostringstream os;
        switch (kind_) {
            case Kind::NegSqrt: os << "neg-sqrt"; break;
            case Kind::NegLinear: os << "neg-linear(delta=" << delta_ << ")"; break;
            case Kind::NegPower: os << "neg-power(c=" << delta_ << ",p=" << p_ << ")"; break;
            case Kind::LogInverse: os << "log-inverse(alpha=" << alpha_ << ",lam_hi=" << lam_hi_ << ")"; break;
            case Kind::NegRatio: os << "neg-ratio"; break;
            case Kind::Table: os << "table(" << xs_.size() << " pts)"; break;
        }
        return os.str();
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        switch (kind_) {
            case Kind::NegSqrt: j["kind"] = "neg-sqrt"; break;
            case Kind::NegLinear:
                j["kind"] = "neg-linear";
                j["delta"] = delta_;
                break;
            case Kind::NegPower:
                j["kind"] = "neg-power";
                j["c"] = delta_;
                j["p"] = p_;
                break;
            case Kind::LogInverse:
                j["kind"] = "log-inverse";
                j["alpha"] = alpha_;
                j["lam_hi"] = lam_hi_;
                break;
            case Kind::NegRatio: j["kind"] = "neg-ratio"; break;
            case Kind::Table:
                j["kind"] = "table";
                j["x"] = xs_;
                j["g"] = gs_;
                break;
        }
        j["extended"] = extended_;
        return j;
    }

    static GFunction from_json(const nlohmann::json& j) {
        const std::string k = j.at("kind").get<std::string>();
        GFunction g = [&]() {
            if (k == "neg-sqrt") return neg_sqrt();
            if (k == "neg-linear") return neg_linear(j.at("delta").get<double>());
            if (k == "neg-power") return neg_power(j.at("c").get<double>(), j.at("p").get<double>());
            if (k == "log-inverse")
                return log_inverse(j.at("alpha").get<double>(), j.value("lam_hi", 0.5));
            if (k == "neg-ratio") return neg_ratio();
            if (k == "table")
                return table(j.at("x").get<std::vector<double>>(), j.at("g").get<std::vector<double>>(),
                             j.value("extended", true));
            throw input_error("GFunction: unknown kind '" + k + "'");
        }();
        g.extended_ = j.value("extended", g.extended_);
        return g;
    }

    // closed-form characteristic function of the dual of M(g), when known
    std::optional<FFunction> dual_char_closed_form(int n) const {
        switch (kind_) {
            case Kind::NegSqrt: return FFunction::poly2(1.0, static_cast<double>(n - 1));
            case Kind::NegLinear: return FFunction::linear(1.0 / delta_ + (n - 1));
            case Kind::NegPower:
                return n > 1 ? FFunction::pow_lin(std::pow(1.0 / delta_, 1.0 / p_), 1.0 / p_,
                                                  static_cast<double>(n - 1))
                             : FFunction::power(std::pow(1.0 / delta_, 1.0 / p_), 1.0 / p_);
            case Kind::LogInverse:
                return FFunction::log_linear(alpha_ + (n - 1), lam_hi_);
            default: return std::nullopt;
        }
    }

private:
    explicit GFunction(Kind k) : kind_(k) {}

    double h_of(double lam) const { return lam > 0.0 ? lam * (alpha_ - 2.0 * std::log(lam)) : 0.0; }

    double base_value(double x) const {
        switch (kind_) {
            case Kind::NegSqrt: return -std::sqrt(x);
            case Kind::NegLinear: return -delta_ * x;
            case Kind::NegPower: return -delta_ * std::pow(x, p_);
            case Kind::NegRatio: return -x / (1.0 + x);
            case Kind::LogInverse: {
                // solve h(lam) = x on [0, lam_hi]; h strictly increasing there
                if (x <= 0.0) return 0.0;
                const double hi = h_of(lam_hi_);
                if (x >= hi) return -lam_hi_;
                const double lam = bisect_boundary([&](double l) { return h_of(l) >= x; }, 0.0, lam_hi_,
                                                   1e-15 * lam_hi_);
                return -lam;
            }
            case Kind::Table: {
                if (x <= xs_.front()) return gs_.front();
                if (x >= xs_.back()) return gs_.back();
                const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
                const std::size_t i = static_cast<std::size_t>(it - xs_.begin());
                const double w = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
                return gs_[i - 1] + w * (gs_[i] - gs_[i - 1]);
            }
        }
        return 0.0;
    }

    double invert_table(double lam) const {
        // gs decreasing; find x with g(x) = -lam, ties toward the smaller preimage
        const double target = -lam;
        std::size_t lo = 0, hi = xs_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            if (gs_[mid] <= target)
                hi = mid;
            else
                lo = mid;
        }
        const double glo = gs_[lo], ghi = gs_[hi];
        if (ghi == glo) return xs_[lo];
        const double w = (target - glo) / (ghi - glo);
        return xs_[lo] + w * (xs_[hi] - xs_[lo]);
    }

    double block_inverse(double lam) const {
        const double a = base_hi();
        const double depth = -base_value(a); // block height, > 0
        const double k = std::floor(lam / depth);
        const double rest = lam - k * depth;
        GFunction base = *this; // reuse base inversion below the block
        return k * a + (rest <= 0.0 ? 0.0
                                    : (kind_ == Kind::LogInverse ? h_of(std::min(rest, lam_hi_))
                                                                 : base.invert_table(rest)));
    }

    Kind kind_;
    double delta_ = 1.0;
    double p_ = 1.0;
    double alpha_ = 2.0;
    double lam_hi_ = 0.5;
    bool extended_ = true;
    std::vector<double> xs_, gs_;
};

} // namespace smp
