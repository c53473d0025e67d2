#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "smp/eigen.hpp"
#include "smp/errors.hpp"
#include "smp/rng.hpp"
#include "smp/scalar_fn.hpp"
#include "smp/sym_matrix.hpp"

namespace smp {

/// Catalog of pure second-order subequations F in Sym(R^n): closed sets with
/// the positivity property F + P subset F.  Each entry is cut out by a
/// continuous degenerate-elliptic defining function g, membership meaning
/// g(A) >= 0; the interior Int F is represented by the strict inequality
/// g(A) > 0, which is exact for every entry here because g is continuous and
/// monotone under adding positive matrices.
///
/// Entries:
///   Pos          lambda_min(A) >= 0                      (the convex cone P)
///   Subaffine    lambda_max(A) >= 0                      (the dual of P)
///   MinMaxCone   lambda_min + alpha lambda_max >= 0      (alpha > 0)
///   Pucci        lam0 tr A+ + Lam tr A- >= 0             (0 < lam0 <= Lam)
///   PDelta       lambda_min(A) + delta tr A >= 0
///   SigmaPsiK    sigma_l(psi(lambda_1..n)) >= 0, l=1..k, psi = sign|t|^a
///   MinMaxF      lambda_max >= 0 and lambda_min + f(lambda_max) >= 0
///   MinTwoF      lambda_2 >= 0 and lambda_min + f(lambda_2) >= 0   (n >= 2)
///   Mg           tr A >= 0 and lambda_min(A) >= g(tr A)
///   Dual         membership through the Dirichlet dual of the inner spec
///   HalfSpace    tr A >= c                               (generic-case fixture)
///   TraceZero    tr A = 0   -- fixture violating positivity, for audit tests
///   FirstDiag    <A e1, e1> >= 0  -- fixture that is not orthogonally invariant
class SubequationSpec {
public:
    enum class Kind {
        Pos,
        Subaffine,
        MinMaxCone,
        Pucci,
        PDelta,
        SigmaPsiK,
        MinMaxF,
        MinTwoF,
        Mg,
        Dual,
        HalfSpace,
        TraceZero,
        FirstDiag
    };

    static SubequationSpec pos(int n) { return SubequationSpec(Kind::Pos, n); }
    static SubequationSpec subaffine(int n) { return SubequationSpec(Kind::Subaffine, n); }

    static SubequationSpec minmax_cone(double alpha, int n) {
        SubequationSpec s(Kind::MinMaxCone, n);
        if (!(alpha > 0.0)) throw input_error("minmax_cone: alpha must be positive");
        s.alpha_ = alpha;
        return s;
    }

    static SubequationSpec pucci(double lam0, double Lam, int n) {
        SubequationSpec s(Kind::Pucci, n);
        if (!(0.0 < lam0 && lam0 <= Lam)) throw input_error("pucci: need 0 < lam0 <= Lam");
        s.lam0_ = lam0;
        s.Lam_ = Lam;
        return s;
    }

    static SubequationSpec p_delta(double delta, int n) {
        SubequationSpec s(Kind::PDelta, n);
        if (!(delta > 0.0)) throw input_error("p_delta: delta must be positive");
        s.delta_ = delta;
        return s;
    }

    static SubequationSpec sigma_psi_k(double a, int k, int n) {
        SubequationSpec s(Kind::SigmaPsiK, n);
        if (!(a > 0.0)) throw input_error("sigma_psi_k: exponent must be positive");
        if (k < 1 || k > n) throw input_error("sigma_psi_k: need 1 <= k <= n");
        s.a_exp_ = a;
        s.k_ = k;
        return s;
    }

    static SubequationSpec minmax_f(FFunction f, int n) {
        SubequationSpec s(Kind::MinMaxF, n);
        s.f_ = std::move(f);
        return s;
    }

    static SubequationSpec min_two_f(FFunction f, int n) {
        SubequationSpec s(Kind::MinTwoF, n);
        if (n < 2) throw input_error("min_two_f: unsupported for n < 2");
        s.f_ = std::move(f);
        return s;
    }

    static SubequationSpec mg(GFunction g, int n) {
        SubequationSpec s(Kind::Mg, n);
        if (!g.decreasing_and_negative())
            throw input_error("mg: g must be decreasing with g(0)=0, g<0 on (0,a]");
        s.g_ = std::move(g);
        return s;
    }

    static SubequationSpec dual_of(const SubequationSpec& inner) {
        SubequationSpec s(Kind::Dual, inner.dim());
        s.inner_ = std::make_shared<SubequationSpec>(inner);
        return s;
    }

    static SubequationSpec halfspace(double c, int n) {
        SubequationSpec s(Kind::HalfSpace, n);
        s.c_ = c;
        return s;
    }

    static SubequationSpec trace_zero_fixture(int n) { return SubequationSpec(Kind::TraceZero, n); }
    static SubequationSpec first_diag_fixture(int n) { return SubequationSpec(Kind::FirstDiag, n); }

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    double alpha() const { return alpha_; }
    double lam0() const { return lam0_; }
    double Lam() const { return Lam_; }
    double delta() const { return delta_; }
    double exponent() const { return a_exp_; }
    int sigma_k() const { return k_; }
    double level() const { return c_; }
    const std::optional<FFunction>& f() const { return f_; }
    const std::optional<GFunction>& g() const { return g_; }
    const SubequationSpec* inner() const { return inner_.get(); }

    // Optional slack around the membership comparison at 0.  Zero by default:
    // boundary cases compare exactly, so tests hit boundaries deliberately.
    double membership_slack() const { return eps_mem_; }
    void set_membership_slack(double eps) { eps_mem_ = eps; }

    /// Weak membership evaluates the defining inequality with >=, strict with >.
    bool member(const SymMatrix& A, bool strict = false) const {
        if (A.dim() != dim_) throw input_error("member: dimension mismatch");
        switch (kind_) {
            case Kind::Dual:
                // A in dual(F)  <=>  -A not in Int F ; Int through the strict predicate
                return !inner_->member(-A, !strict);
            case Kind::TraceZero: {
                if (strict) return false; // a hyperplane has empty interior
                return std::abs(A.trace()) <= 1e-9;
            }
            default: {
                const double m = margin(A);
                return strict ? m > eps_mem_ : m >= -eps_mem_;
            }
        }
    }

    /// Membership in the Dirichlet dual -(~Int F):
    ///   A in dual(F)      <=>  not member(F, -A, strict)
    ///   A in Int dual(F)  <=>  not member(F, -A, weak)
    bool dual_member(const SymMatrix& A, bool strict = false) const {
        if (A.dim() != dim_) throw input_error("dual_member: dimension mismatch");
        return !member(-A, !strict);
    }

    // true when membership depends only on the spectrum, so the characteristic
    // functions from "some e" and "all e" coincide and one direction suffices
    bool invariant() const {
        switch (kind_) {
            case Kind::FirstDiag: return false;
            case Kind::Dual: return inner_->invariant();
            default: return true;
        }
    }

    std::string id() const {
        std::ostringstream os;
        switch (kind_) {
            case Kind::Pos: os << "pos"; break;
            case Kind::Subaffine: os << "subaffine"; break;
            case Kind::MinMaxCone: os << "minmax-cone(alpha=" << alpha_ << ")"; break;
            case Kind::Pucci: os << "pucci(lam0=" << lam0_ << ",Lam=" << Lam_ << ")"; break;
            case Kind::PDelta: os << "p-delta(delta=" << delta_ << ")"; break;
            case Kind::SigmaPsiK: os << "sigma-psi-k(a=" << a_exp_ << ",k=" << k_ << ")"; break;
            case Kind::MinMaxF: os << "minmax-f[" << f_->name() << "]"; break;
            case Kind::MinTwoF: os << "min2-f[" << f_->name() << "]"; break;
            case Kind::Mg: os << "mg[" << g_->name() << "]"; break;
            case Kind::Dual: os << "dual[" << inner_->id() << "]"; break;
            case Kind::HalfSpace: os << "halfspace(c=" << c_ << ")"; break;
            case Kind::TraceZero: os << "trace-zero"; break;
            case Kind::FirstDiag: os << "first-diag"; break;
        }
        os << ",n=" << dim_;
        return os.str();
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["dim"] = dim_;
        nlohmann::json p = nlohmann::json::object();
        switch (kind_) {
            case Kind::Pos: j["kind"] = "pos"; break;
            case Kind::Subaffine: j["kind"] = "subaffine"; break;
            case Kind::MinMaxCone:
                j["kind"] = "minmax-cone";
                p["alpha"] = alpha_;
                break;
            case Kind::Pucci:
                j["kind"] = "pucci";
                p["lam0"] = lam0_;
                p["Lam"] = Lam_;
                break;
            case Kind::PDelta:
                j["kind"] = "p-delta";
                p["delta"] = delta_;
                break;
            case Kind::SigmaPsiK:
                j["kind"] = "sigma-psi-k";
                p["a"] = a_exp_;
                p["k"] = k_;
                break;
            case Kind::MinMaxF:
                j["kind"] = "minmax-f";
                p["f"] = f_->to_json();
                break;
            case Kind::MinTwoF:
                j["kind"] = "min2-f";
                p["f"] = f_->to_json();
                break;
            case Kind::Mg:
                j["kind"] = "mg";
                p["g"] = g_->to_json();
                break;
            case Kind::Dual:
                j["kind"] = "dual";
                p["inner"] = inner_->to_json();
                break;
            case Kind::HalfSpace:
                j["kind"] = "halfspace";
                p["c"] = c_;
                break;
            case Kind::TraceZero: j["kind"] = "trace-zero"; break;
            case Kind::FirstDiag: j["kind"] = "first-diag"; break;
        }
        j["params"] = p;
        return j;
    }

    static SubequationSpec from_json(const nlohmann::json& j) {
        const std::string k = j.at("kind").get<std::string>();
        const int n = j.at("dim").get<int>();
        const nlohmann::json p = j.value("params", nlohmann::json::object());
        if (k == "pos") return pos(n);
        if (k == "subaffine") return subaffine(n);
        if (k == "minmax-cone") return minmax_cone(p.at("alpha").get<double>(), n);
        if (k == "pucci") return pucci(p.at("lam0").get<double>(), p.at("Lam").get<double>(), n);
        if (k == "p-delta") return p_delta(p.at("delta").get<double>(), n);
        if (k == "sigma-psi-k") return sigma_psi_k(p.at("a").get<double>(), p.at("k").get<int>(), n);
        if (k == "minmax-f") return minmax_f(FFunction::from_json(p.at("f")), n);
        if (k == "min2-f") return min_two_f(FFunction::from_json(p.at("f")), n);
        if (k == "mg") return mg(GFunction::from_json(p.at("g")), n);
        if (k == "dual") return dual_of(from_json(p.at("inner")));
        if (k == "halfspace") return halfspace(p.at("c").get<double>(), n);
        if (k == "trace-zero") return trace_zero_fixture(n);
        if (k == "first-diag") return first_diag_fixture(n);
        throw input_error("SubequationSpec: unknown kind '" + k + "'");
    }

private:
    SubequationSpec(Kind k, int n) : kind_(k), dim_(n) {
        if (n < 1) throw input_error("SubequationSpec: dimension must be >= 1");
    }

    // Signed margin of the defining inequality; for conjunctions the minimum
    // over the parts, so weak membership is margin >= 0 and strict is > 0.
    double margin(const SymMatrix& A) const {
        switch (kind_) {
            case Kind::Pos: return lambda_min(A);
            case Kind::Subaffine: return lambda_max(A);
            case Kind::MinMaxCone: {
                const auto d = eigen_sorted(A);
                return d.lambda_min() + alpha_ * d.lambda_max();
            }
            case Kind::Pucci: {
                const auto [tp, tn] = trace_pos_neg(A);
                return lam0_ * tp + Lam_ * tn;
            }
            case Kind::PDelta: return lambda_min(A) + delta_ * A.trace();
            case Kind::SigmaPsiK: {
                const auto d = eigen_sorted(A);
                std::vector<double> psi(d.values.size());
                for (std::size_t i = 0; i < psi.size(); ++i) {
                    const double lam = d.values[i];
                    psi[i] = (lam >= 0.0 ? 1.0 : -1.0) * std::pow(std::abs(lam), a_exp_);
                }
                // elementary symmetric sigma_1..sigma_k by product expansion
                std::vector<double> e(static_cast<std::size_t>(k_) + 1, 0.0);
                e[0] = 1.0;
                for (double v : psi)
                    for (int j = k_; j >= 1; --j)
                        e[static_cast<std::size_t>(j)] += v * e[static_cast<std::size_t>(j - 1)];
                double m = e[1];
                for (int l = 2; l <= k_; ++l) m = std::min(m, e[static_cast<std::size_t>(l)]);
                return m;
            }
            case Kind::MinMaxF: {
                const auto d = eigen_sorted(A);
                const double top = d.lambda_max();
                if (top < 0.0) return top; // f never evaluated off its domain
                return std::min(top, d.lambda_min() + (*f_)(top));
            }
            case Kind::MinTwoF: {
                const auto d = eigen_sorted(A);
                const double second = d.values[1];
                if (second < 0.0) return second;
                return std::min(second, d.lambda_min() + (*f_)(second));
            }
            case Kind::Mg: {
                const double tr = A.trace();
                if (tr < 0.0) return tr;
                return std::min(tr, lambda_min(A) - g_->value(tr));
            }
            case Kind::HalfSpace: return A.trace() - c_;
            case Kind::FirstDiag: return A(0, 0);
            case Kind::Dual:
            case Kind::TraceZero: break; // handled in member()
        }
        throw numeric_error("margin: unreachable");
    }

    Kind kind_;
    int dim_;
    double alpha_ = 1.0, lam0_ = 1.0, Lam_ = 1.0, delta_ = 1.0, a_exp_ = 1.0, c_ = 0.0;
    int k_ = 1;
    double eps_mem_ = 0.0;
    std::optional<FFunction> f_;
    std::optional<GFunction> g_;
    std::shared_ptr<const SubequationSpec> inner_;
};

/// Draws a member of F by walking the ray B + tI from a random base point and
/// bisecting to the boundary; `offset` pushes the sample inward from there.
/// Near-boundary samples (offset 0) are the binding probes for monotonicity
/// and positivity audits.
inline SymMatrix sample_member(const SubequationSpec& spec, Rng& rng, double offset = 0.0,
                               double ray_cap = 1e9) {
    const int n = spec.dim();
    if (spec.kind() == SubequationSpec::Kind::TraceZero) {
        SymMatrix b = random_symmetric(rng, n);
        SymMatrix shift = SymMatrix::identity(n);
        shift *= -b.trace() / n;
        return b + shift;
    }
    for (int attempt = 0; attempt < 32; ++attempt) {
        const SymMatrix b = random_symmetric(rng, n);
        auto at = [&](double t) {
            SymMatrix m = SymMatrix::identity(n);
            m *= t;
            return b + m;
        };
        double t_in = 0.0, t_out = 0.0;
        if (spec.member(b)) {
            double t = -1.0;
            while (spec.member(at(t))) {
                t *= 2.0;
                if (t < -ray_cap) return b; // ray never leaves F; B itself will do
            }
            t_out = t;
        } else {
            double t = 1.0;
            bool found = false;
            while (t <= ray_cap) {
                if (spec.member(at(t))) {
                    found = true;
                    break;
                }
                t *= 2.0;
            }
            if (!found) continue;
            t_in = t;
        }
        while (std::abs(t_in - t_out) > 1e-9 * (1.0 + std::abs(t_in))) {
            const double mid = 0.5 * (t_in + t_out);
            if (spec.member(at(mid)))
                t_in = mid;
            else
                t_out = mid;
        }
        return at(t_in + std::abs(offset));
    }
    throw numeric_error("sample_member: found no member of " + spec.id() + " along probe rays");
}

struct PositivityReport {
    bool passed = true;
    long trials = 0;
    std::optional<std::pair<SymMatrix, SymMatrix>> witness; // (A in F, P >= 0) with A+P not in F
};

/// Audits positivity F + P subset F on random members and random P >= 0
/// (Gram matrices and rank-one spikes).  Reports the first failure.
inline PositivityReport positivity_check(const SubequationSpec& spec, int trials, std::uint64_t seed) {
    if (trials < 1) throw input_error("positivity_check: trials must be >= 1");
    Rng rng(seed);
    PositivityReport rep;
    for (int i = 0; i < trials; ++i) {
        ++rep.trials;
        const double offset = (i % 2 == 0) ? 0.0 : std::abs(rng.gaussian());
        const SymMatrix a = sample_member(spec, rng, offset);
        SymMatrix p = (i % 3 == 0) ? [&] {
            auto e = rng.unit_vector(spec.dim());
            SymMatrix q = SymMatrix::outer(e);
            q *= std::abs(rng.gaussian()) + 1e-14;
            return q;
        }()
                                   : random_psd(rng, spec.dim(), 1.0 + std::abs(rng.gaussian()));
        if (!spec.member(a + p)) {
            rep.passed = false;
            rep.witness = std::make_pair(a, p);
            return rep;
        }
    }
    return rep;
}

/// One-sided membership test in the orthogonal orbit hull of F: true as soon
/// as some sampled rotation lands A in F.  Exact when F is invariant; a found
/// rotation is always a certificate, absence over the samples is not.
inline bool orbit_member(const SubequationSpec& spec, const SymMatrix& A, int rotations,
                         std::uint64_t seed) {
    if (rotations < 1) throw input_error("orbit_member: rotations must be >= 1");
    if (spec.member(A)) return true;
    Rng rng(seed);
    for (int i = 0; i < rotations; ++i) {
        const auto q = haar_orthogonal(rng, spec.dim());
        if (spec.member(A.conjugate(q))) return true;
    }
    return false;
}

} // namespace smp
