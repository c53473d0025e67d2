#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "smp/characteristic.hpp"
#include "smp/errors.hpp"
#include "smp/io_util.hpp"
#include "smp/quadrature.hpp"
#include "smp/radial.hpp"
#include "smp/scalar_fn.hpp"

namespace smp {

/// Refusal to build: the shifted integrand y + f(y) did not certify a
/// convergent integral at 0+, so no plateaued increasing profile exists on
/// this route.  Carries the verdict that blocked the construction.
class construction_refusal : public precondition_error {
public:
    construction_refusal(const std::string& msg, IntegralVerdict v)
        : precondition_error(msg), verdict(std::move(v)) {}
    IntegralVerdict verdict;
};

/// Everything the plateau construction produced: the transport map s(y) and
/// its inverse, the log-substituted profile phi(s), and the final radial
/// profile psi(t), strictly increasing below t0 = e^{s0} and exactly
/// constant m from t0 on.
struct ConstructionRecord {
    FFunction f = FFunction::zero();
    double y0 = 1.0;
    double s0 = 0.0;
    double t0 = 1.0;
    double m = 0.0;
    double quad_tol = 1e-10;
    double tail_estimate = 0.0; // s-mass below the smallest tabulated y
    int f_jump_count = 0;

    std::vector<double> ys;     // ascending, ys[0] = 0
    std::vector<double> s_of_y; // s at each node, s_of_y[0] = 0

    RadialFunction phi; // profile in s
    RadialFunction psi; // profile in t

    // inverse transport y(s); monotone bisection against freshly integrated
    // panel increments, not just table interpolation
    double y_of_s(double s) const {
        if (s <= 0.0) return 0.0;
        if (s >= s0) return y0;
        const auto it = std::upper_bound(s_of_y.begin(), s_of_y.end(), s);
        std::size_t j = static_cast<std::size_t>(it - s_of_y.begin());
        if (j == 0) j = 1;
        if (j >= ys.size()) j = ys.size() - 1;
        const double ylo_node = ys[j - 1], yhi_node = ys[j];
        if (j == 1) {
            // below the smallest positive node: linear in s, an O(ys[1]) stub
            const double shi = s_of_y[1];
            return shi > 0.0 ? yhi_node * s / shi : 0.0;
        }
        auto s_local = [&](double y) {
            return s_of_y[j - 1] + adaptive_simpson([&](double u) { return 1.0 / (u + f(u)); },
                                                    ylo_node, y, 1e-12);
        };
        double lo = ylo_node, hi = yhi_node;
        for (int it2 = 0; it2 < 64 && hi - lo > 1e-15 * (1.0 + hi); ++it2) {
            const double mid = 0.5 * (lo + hi);
            if (s_local(mid) >= s)
                hi = mid;
            else
                lo = mid;
        }
        return 0.5 * (lo + hi);
    }

    nlohmann::json meta_json() const {
        return {{"f", f.to_json()},
                {"y0", y0},
                {"s0", s0},
                {"t0", t0},
                {"m", m},
                {"quad_tol", quad_tol},
                {"tail_estimate", tail_estimate},
                {"f_jump_count", f_jump_count},
                {"psi_points", psi.size()}};
    }

    void emit_bundle(const std::filesystem::path& dir) const {
        std::filesystem::create_directories(dir);
        {
            std::ofstream os(dir / "psi.csv");
            psi.to_csv(os);
        }
        {
            std::ofstream os(dir / "s_of_y.csv");
            os << "y,s\n";
            for (std::size_t i = 0; i < ys.size(); ++i)
                os << format_real(ys[i]) << "," << format_real(s_of_y[i]) << "\n";
        }
        {
            std::ofstream os(dir / "meta.json");
            os << meta_json().dump(2) << "\n";
        }
    }
};

namespace detail {

// divergence hint for the shifted integrand y + f(y); sound for every
// cataloged closed form (f = O(y log 1/y) when divergent, and
// 1/(y+f) <= 1/f when convergent)
inline FFunction::Hint shifted_hint(const FFunction& f) {
    switch (f.integral_hint()) {
        case FFunction::Hint::Convergent: return FFunction::Hint::Convergent;
        case FFunction::Hint::Divergent: return FFunction::Hint::Divergent;
        default: return FFunction::Hint::Unknown;
    }
}

inline int count_jumps(const FFunction& f, double y0) {
    // heuristic jump counter on a fine grid; closed forms come out at 0
    const int n = 1000;
    std::vector<double> dv;
    dv.reserve(n);
    double prev = f(0.0);
    for (int i = 1; i <= n; ++i) {
        const double v = f(y0 * i / n);
        dv.push_back(v - prev);
        prev = v;
    }
    std::vector<double> sorted = dv;
    std::sort(sorted.begin(), sorted.end());
    const double med = sorted[sorted.size() / 2];
    int jumps = 0;
    for (double d : dv)
        if (d > 1e3 * std::max(med, 0.0) + 1e-8) ++jumps;
    return jumps;
}

} // namespace detail

/// Builds the plateaued increasing radial profile from a characteristic
/// function with finite integral: transport s(y) = int_0^y dt/(t + f(t)),
/// inverse y(s), then
///   psi'(t) = t y(s0 - log t) on (1, t0],   psi(t0) = m,   t0 = e^{s0},
/// integrated backward from the plateau so the flat tail is exact by
/// construction.  The result solves psi'' + f(psi'/t) = 0 a.e. and passes
/// the plateau-shape check.
inline ConstructionRecord build_counterexample(const FFunction& f, double m = 0.0,
                                               double quad_tol = 1e-10, double y0 = 1.0,
                                               int grid_points = 4096) {
    if (!(y0 > 0.0) || !(quad_tol > 0.0) || grid_points < 16)
        throw input_error("build_counterexample: bad parameters");
    if (f(0.0) != 0.0) throw input_error("build_counterexample: f(0) must vanish");
    if (!f.increasing_on(0.0, y0)) throw input_error("build_counterexample: f must be increasing");

    auto shifted = [&](double y) { return y + f(y); };
    const IntegralVerdict iv =
        integral_test_eval(shifted, y0, detail::shifted_hint(f), IntegralOptions{});
    if (iv.outcome != IntegralVerdict::Outcome::Convergent)
        throw construction_refusal(
            std::string("build_counterexample: integral of 1/(y + f(y)) at 0+ is ") +
                IntegralVerdict::outcome_name(iv.outcome) + ", no plateau profile on this route",
            iv);

    ConstructionRecord rec;
    rec.f = f;
    rec.y0 = y0;
    rec.m = m;
    rec.quad_tol = quad_tol;
    rec.f_jump_count = detail::count_jumps(f, y0);

    // transport table on a geometric grid, accumulated from the small end to
    // keep the singular head from swamping the panel sums
    const int panels = 1200;
    const double y_min = y0 * 1e-20;
    std::vector<double> nodes(static_cast<std::size_t>(panels) + 1);
    const double step = std::log(y0 / y_min) / panels;
    for (int i = 0; i <= panels; ++i) nodes[static_cast<std::size_t>(i)] = y_min * std::exp(step * i);
    nodes.back() = y0;

    std::vector<double> panel_sums(static_cast<std::size_t>(panels));
    for (int i = 0; i < panels; ++i)
        panel_sums[static_cast<std::size_t>(i)] = adaptive_simpson(
            [&](double u) { return 1.0 / shifted(u); }, nodes[static_cast<std::size_t>(i)],
            nodes[static_cast<std::size_t>(i) + 1], quad_tol);

    // geometric tail estimate for the mass below y_min
    const double r_tail = panel_sums[1] > 0.0 ? panel_sums[0] / panel_sums[1] : 0.0;
    rec.tail_estimate = (r_tail > 0.0 && r_tail < 1.0)
                            ? panel_sums[0] * r_tail / (1.0 - r_tail)
                            : 0.0;

    rec.ys.resize(nodes.size() + 1);
    rec.s_of_y.resize(nodes.size() + 1);
    rec.ys[0] = 0.0;
    rec.s_of_y[0] = 0.0;
    double acc = rec.tail_estimate;
    rec.ys[1] = nodes[0];
    rec.s_of_y[1] = acc;
    for (int i = 0; i < panels; ++i) {
        acc += panel_sums[static_cast<std::size_t>(i)];
        rec.ys[static_cast<std::size_t>(i) + 2] = nodes[static_cast<std::size_t>(i) + 1];
        rec.s_of_y[static_cast<std::size_t>(i) + 2] = acc;
    }
    rec.s0 = acc;
    rec.t0 = std::exp(rec.s0);

    // phi in s: phi'(s) = y(s0 - s) up to s0, then identically 0
    {
        const int np = 1024;
        std::vector<double> sg(static_cast<std::size_t>(np));
        const double s_lo = rec.s0 * 1e-3, s_hi = rec.s0 * 1.2;
        for (int i = 0; i < np; ++i)
            sg[static_cast<std::size_t>(i)] = s_lo + (s_hi - s_lo) * i / (np - 1);
        // keep the plateau knot on the grid
        sg.push_back(rec.s0);
        std::sort(sg.begin(), sg.end());
        sg.erase(std::unique(sg.begin(), sg.end()), sg.end());

        RadialFunction phi;
        phi.ts = sg;
        phi.psi1.resize(sg.size());
        phi.psi2.resize(sg.size());
        phi.psi.resize(sg.size());
        phi.flags.assign(sg.size(), 0);
        for (std::size_t i = 0; i < sg.size(); ++i) {
            const double s = sg[i];
            const double p = s < rec.s0 ? rec.y_of_s(rec.s0 - s) : 0.0;
            phi.psi1[i] = p;
            phi.psi2[i] = s < rec.s0 ? -(p + f(p)) : 0.0;
        }
        // integrate backward from phi(s0) = m
        const std::size_t i0 = static_cast<std::size_t>(
            std::lower_bound(sg.begin(), sg.end(), rec.s0) - sg.begin());
        phi.psi[i0] = m;
        for (std::size_t i = i0 + 1; i < sg.size(); ++i) phi.psi[i] = m;
        for (std::size_t i = i0; i-- > 0;) {
            const double a = sg[i], b = sg[i + 1];
            const double mid = 0.5 * (a + b);
            const double pm = mid < rec.s0 ? rec.y_of_s(rec.s0 - mid) : 0.0;
            const double seg = (b - a) / 6.0 * (phi.psi1[i] + 4.0 * pm + phi.psi1[i + 1]);
            phi.psi[i] = phi.psi[i + 1] - seg;
        }
        phi.plateau = std::make_pair(rec.s0, m);
        rec.phi = std::move(phi);
    }

    // psi in t: geometric grid over (1, t0] plus a plateau stretch, with the
    // join t0 as an exact node
    {
        const int n_main = (grid_points * 7) / 8;
        const int n_tail = grid_points - n_main;
        const double t_lo = 1.0 + 1e-6;
        std::vector<double> tg = geometric_grid(t_lo, rec.t0, n_main);
        const auto tail = geometric_grid(rec.t0, rec.t0 * 1.25, n_tail + 1);
        tg.insert(tg.end(), tail.begin() + 1, tail.end());
        std::sort(tg.begin(), tg.end());
        tg.erase(std::unique(tg.begin(), tg.end()), tg.end());

        RadialFunction psi;
        psi.ts = tg;
        psi.psi1.resize(tg.size());
        psi.psi2.resize(tg.size());
        psi.psi.resize(tg.size());
        psi.flags.assign(tg.size(), 0);

        auto dpsi = [&](double t) {
            if (t >= rec.t0) return 0.0;
            return t * rec.y_of_s(rec.s0 - std::log(t));
        };
        for (std::size_t i = 0; i < tg.size(); ++i) {
            const double t = tg[i];
            const double p = dpsi(t);
            psi.psi1[i] = p;
            psi.psi2[i] = t < rec.t0 ? -f(p / t) : 0.0;
        }
        const std::size_t i0 = static_cast<std::size_t>(
            std::lower_bound(tg.begin(), tg.end(), rec.t0) - tg.begin());
        for (std::size_t i = i0; i < tg.size(); ++i) psi.psi[i] = m;
        for (std::size_t i = i0; i-- > 0;) {
            const double a = tg[i], b = tg[i + 1];
            const double pm = dpsi(0.5 * (a + b));
            const double seg = (b - a) / 6.0 * (psi.psi1[i] + 4.0 * pm + psi.psi1[i + 1]);
            psi.psi[i] = psi.psi[i + 1] - seg;
        }
        psi.plateau = std::make_pair(rec.t0, m);
        rec.psi = std::move(psi);
    }

    return rec;
}

/// The classical exponential barrier psi(t) = e^{-beta R^2/2} - e^{-beta t^2/2},
/// tabulated with its exact derivatives.  It solves
///   psi'' + f(psi'/t) = 0 with f(lam) = lam (log(beta^2/lam^2) - 1),
/// so it is radially harmonic for the log-linear borderline family.
inline RadialFunction hopf_function(double beta, double R, double t_lo = 1e-2, double t_hi = -1.0,
                                    int points = 4096) {
    if (!(beta > 0.0) || !(R > 0.0)) throw input_error("hopf_function: beta, R must be positive");
    if (t_hi <= 0.0) t_hi = 2.0 * R;
    const auto grid = geometric_grid(t_lo, t_hi, points);
    auto psi = [&](double t) { return std::exp(-beta * R * R / 2.0) - std::exp(-beta * t * t / 2.0); };
    auto dpsi = [&](double t) { return beta * t * std::exp(-beta * t * t / 2.0); };
    auto ddpsi = [&](double t) { return beta * (1.0 - beta * t * t) * std::exp(-beta * t * t / 2.0); };
    return RadialFunction::tabulate(psi, dpsi, ddpsi, grid);
}

// residual partner of the barrier: the full formula, valid on all lambda > 0
// (not just the increasing stretch used by characteristic tables)
inline CharEval hopf_residual_fn(double beta) {
    return CharEval(
        [beta](double lam) {
            return lam > 0.0 ? lam * (std::log(beta * beta / (lam * lam)) - 1.0) : 0.0;
        },
        0.0, kInf);
}

// the same f as an increasing closed form, for integral tests and for
// matching against the dual-of-M(g) characteristic on the overlap range
inline FFunction hopf_char(double beta, double hi = 1.0) {
    return FFunction::log_linear(2.0 * std::log(beta) - 1.0, hi);
}

} // namespace smp
