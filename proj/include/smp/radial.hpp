#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <utility>
#include <vector>

#include <json.hpp>

#include "smp/characteristic.hpp"
#include "smp/eigen.hpp"
#include "smp/errors.hpp"
#include "smp/io_util.hpp"
#include "smp/scalar_fn.hpp"
#include "smp/sym_matrix.hpp"

namespace smp {

/// Tabulated radial profile (t, psi, psi', psi'') on a strictly increasing
/// grid with t_lo > 0.  Verification happens at grid resolution on
/// C^{1,1}-class data: psi'' may be untrusted at flagged kink points, and
/// verdicts skip those ("a.e." on the grid).
struct RadialFunction {
    std::vector<double> ts;
    std::vector<double> psi, psi1, psi2;
    std::vector<char> flags; // nonzero marks a kink: psi2 untrusted there
    std::optional<std::pair<double, double>> plateau; // (t0, m)

    std::size_t size() const { return ts.size(); }

    void validate() const {
        const std::size_t n = ts.size();
        if (n < 2) throw input_error("RadialFunction: need at least two grid points");
        if (psi.size() != n || psi1.size() != n || psi2.size() != n || flags.size() != n)
            throw input_error("RadialFunction: column length mismatch");
        if (!(ts.front() > 0.0)) throw input_error("RadialFunction: grid must stay right of t = 0");
        for (std::size_t i = 1; i < n; ++i)
            if (!(ts[i] > ts[i - 1])) throw input_error("RadialFunction: grid not strictly increasing");
        for (std::size_t i = 0; i < n; ++i)
            if (!std::isfinite(ts[i]) || !std::isfinite(psi[i]) || !std::isfinite(psi1[i]) ||
                !std::isfinite(psi2[i]))
                throw input_error("RadialFunction: non-finite entry");
    }

    static RadialFunction tabulate(const std::function<double(double)>& f,
                                   const std::function<double(double)>& f1,
                                   const std::function<double(double)>& f2,
                                   const std::vector<double>& grid) {
        RadialFunction rf;
        rf.ts = grid;
        rf.psi.reserve(grid.size());
        rf.psi1.reserve(grid.size());
        rf.psi2.reserve(grid.size());
        for (double t : grid) {
            rf.psi.push_back(f(t));
            rf.psi1.push_back(f1(t));
            rf.psi2.push_back(f2(t));
        }
        rf.flags.assign(grid.size(), 0);
        rf.validate();
        return rf;
    }

    /// Central-difference consistency of psi1 against psi, and of psi2
    /// against psi1 at unflagged interior points.  Returns the two maximal
    /// relative deviations.
    std::pair<double, double> consistency_audit() const {
        double d1 = 0.0, d2 = 0.0;
        double scale1 = 1e-30, scale2 = 1e-30;
        for (std::size_t i = 0; i < size(); ++i) {
            scale1 = std::max(scale1, std::abs(psi1[i]));
            scale2 = std::max(scale2, std::abs(psi2[i]));
        }
        for (std::size_t i = 1; i + 1 < size(); ++i) {
            const double h = ts[i + 1] - ts[i - 1];
            const double fd1 = (psi[i + 1] - psi[i - 1]) / h;
            d1 = std::max(d1, std::abs(fd1 - psi1[i]) / scale1);
            if (!flags[i] && !flags[i - 1] && !flags[i + 1]) {
                const double fd2 = (psi1[i + 1] - psi1[i - 1]) / h;
                d2 = std::max(d2, std::abs(fd2 - psi2[i]) / scale2);
            }
        }
        return {d1, d2};
    }

    void to_csv(std::ostream& os) const {
        os << "t,psi,psi1,psi2,flag\n";
        for (std::size_t i = 0; i < size(); ++i)
            os << format_real(ts[i]) << "," << format_real(psi[i]) << "," << format_real(psi1[i])
               << "," << format_real(psi2[i]) << "," << int(flags[i]) << "\n";
    }

    static RadialFunction from_csv(std::istream& is) {
        RadialFunction rf;
        std::string line;
        if (!std::getline(is, line)) throw input_error("RadialFunction: empty csv");
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            std::string cell;
            std::vector<std::string> cells;
            while (std::getline(ls, cell, ',')) cells.push_back(cell);
            if (cells.size() != 5) throw input_error("RadialFunction: bad csv row");
            rf.ts.push_back(parse_real(cells[0]));
            rf.psi.push_back(parse_real(cells[1]));
            rf.psi1.push_back(parse_real(cells[2]));
            rf.psi2.push_back(parse_real(cells[3]));
            rf.flags.push_back(static_cast<char>(std::stoi(cells[4])));
        }
        rf.validate();
        return rf;
    }
};

/// Evaluation view over a characteristic function: a closed form or a sampled
/// table, with its valid lambda range.  Arguments outside the range clamp to
/// the nearest edge; clamps are counted, never silent.  Clamping low is
/// conservative because every characteristic function here is increasing.
class CharEval {
public:
    CharEval(const FFunction& f)
        : fn_([f](double y) { return f(y); }), lo_(0.0), hi_(f.valid_hi()) {}

    CharEval(const CharacteristicTable& tab)
        : fn_([tab](double y) { return tab.eval(y); }),
          lo_(tab.lambdas.front()),
          hi_(tab.lambdas.back()) {}

    CharEval(std::function<double(double)> fn, double lo, double hi)
        : fn_(std::move(fn)), lo_(lo), hi_(hi) {}

    double operator()(double lam, int* clamp_counter = nullptr) const {
        double x = lam;
        if (x < lo_) {
            x = lo_;
            if (clamp_counter) ++*clamp_counter;
        } else if (x > hi_) {
            x = hi_;
            if (clamp_counter) ++*clamp_counter;
        }
        return fn_(x);
    }

private:
    std::function<double(double)> fn_;
    double lo_, hi_;
};

struct ResidualReport {
    std::vector<double> residual;   // psi'' + f(psi'/t), aligned with the grid
    double min_unflagged = kInf;    // worst residual where psi2 is trusted
    int clamp_warnings = 0;

    bool nonneg(double tol = 0.0) const { return min_unflagged >= -tol; }
};

/// Pointwise residual of the radial subequation: psi''(t) + f(psi'(t)/t).
/// Nonnegativity at every unflagged point is the (grid-resolution, a.e.)
/// subharmonicity verdict.
inline ResidualReport radial_residual(const CharEval& f, const RadialFunction& rf) {
    rf.validate();
    ResidualReport rep;
    rep.residual.reserve(rf.size());
    for (std::size_t i = 0; i < rf.size(); ++i) {
        const double lam = rf.psi1[i] / rf.ts[i];
        const double r = rf.psi2[i] + f(lam, &rep.clamp_warnings);
        rep.residual.push_back(r);
        if (!rf.flags[i]) rep.min_unflagged = std::min(rep.min_unflagged, r);
    }
    return rep;
}

enum class Direction { Up, Down };

struct MonotoneVerdict {
    bool residual_ok = false;
    bool sign_ok = false;
    double min_residual = kInf;
    int sign_violations = 0;
    int clamp_warnings = 0;

    bool ok() const { return residual_ok && sign_ok; }
};

/// Monotone radial verification: the residual condition plus the sign of
/// psi' (>= 0 for the increasing equation, <= 0 for the decreasing one) at
/// every unflagged grid point.
inline MonotoneVerdict verify_monotone_radial(const CharEval& f, const RadialFunction& rf,
                                              Direction dir, double tol = 0.0) {
    const auto res = radial_residual(f, rf);
    MonotoneVerdict v;
    v.min_residual = res.min_unflagged;
    v.clamp_warnings = res.clamp_warnings;
    v.residual_ok = res.nonneg(tol);
    for (std::size_t i = 0; i < rf.size(); ++i) {
        if (rf.flags[i]) continue;
        const double p = rf.psi1[i];
        const bool good = dir == Direction::Up ? p >= -tol : p <= tol;
        if (!good) ++v.sign_violations;
    }
    v.sign_ok = v.sign_violations == 0;
    return v;
}

/// Does the profile have the only shape that can break the strong maximum
/// principle: strictly below its maximum before some t0 and exactly constant
/// from t0 on?
inline bool smp_witness_check(const RadialFunction& rf, double plateau_tol = 1e-12) {
    rf.validate();
    const std::size_t n = rf.size();
    const double m = rf.psi.back();
    // maximal constant tail within tolerance
    std::size_t i0 = n - 1;
    while (i0 > 0 && std::abs(rf.psi[i0 - 1] - m) <= plateau_tol) --i0;
    if (i0 == 0) return false;          // constant everywhere: nothing strictly below
    if (n - i0 < 2) return false;       // no plateau at all
    for (std::size_t j = 0; j < i0; ++j)
        if (!(rf.psi[j] < m)) return false;
    return true;
}

/// Restriction of a strict degree-2 test function in split coordinates
/// (t, y) to the radial variable: for
///   phi(t, y) = <p,t> + <q,y> + <A t,t> + 2 <B t, y> + <C y, y>
/// touching from above with q = 0 and C positive definite, the radial
/// quadratic <p,t> + <(A - B^T C^{-1} B) t, t> equals inf over small y of phi
/// and touches from above in t alone.
struct ReducedQuadratic {
    std::vector<double> p;
    SymMatrix a_bar;

    double eval(const std::vector<double>& t) const {
        double s = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * t[i];
        const auto at = a_bar.apply(t);
        for (std::size_t i = 0; i < p.size(); ++i) s += at[i] * t[i];
        return s;
    }
};

inline ReducedQuadratic reduce_test_function(const std::vector<double>& p,
                                             const std::vector<double>& q, const SymMatrix& A,
                                             const std::vector<std::vector<double>>& B,
                                             const SymMatrix& C) {
    const int k = A.dim();
    const int l = C.dim();
    if (static_cast<int>(p.size()) != k) throw input_error("reduce_test_function: |p| != k");
    if (static_cast<int>(q.size()) != l) throw input_error("reduce_test_function: |q| != l");
    if (static_cast<int>(B.size()) != l) throw input_error("reduce_test_function: B must be l x k");
    for (const auto& row : B)
        if (static_cast<int>(row.size()) != k) throw input_error("reduce_test_function: B must be l x k");

    for (double x : q)
        if (x != 0.0)
            throw precondition_error(
                "reduce_test_function: q must vanish (a strict touching test function forces the "
                "y-gradient to zero)");
    const auto cdec = eigen_sorted(C);
    if (!(cdec.lambda_min() > 0.0))
        throw precondition_error(
            "reduce_test_function: C must be positive definite (strict touching forces it)");

    // C^{-1} B through the spectral factors of C
    std::vector<std::vector<double>> cinvb(static_cast<std::size_t>(l),
                                           std::vector<double>(static_cast<std::size_t>(k), 0.0));
    for (int col = 0; col < k; ++col) {
        std::vector<double> b_col(static_cast<std::size_t>(l));
        for (int r = 0; r < l; ++r) b_col[static_cast<std::size_t>(r)] = B[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
        std::vector<double> x(static_cast<std::size_t>(l), 0.0);
        for (int j = 0; j < l; ++j) {
            double dot = 0.0;
            for (int r = 0; r < l; ++r)
                dot += cdec.vectors[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)] *
                       b_col[static_cast<std::size_t>(r)];
            dot /= cdec.values[static_cast<std::size_t>(j)];
            for (int r = 0; r < l; ++r)
                x[static_cast<std::size_t>(r)] += dot * cdec.vectors[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)];
        }
        for (int r = 0; r < l; ++r) cinvb[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] = x[static_cast<std::size_t>(r)];
    }

    SymMatrix btcb(k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            for (int r = 0; r < l; ++r)
                s += B[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] *
                     cinvb[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)];
            btcb(i, j) = s;
            btcb(j, i) = s;
        }

    return ReducedQuadratic{p, A - btcb};
}

} // namespace smp
