#pragma once

// Test-side oracles, kept independent of the library paths they check:
// characteristic-polynomial roots via Sturm bisection, finite-difference
// Hessians, nested-grid quadratic minimization, and a brute-force mu-scan.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "smp/subequation.hpp"
#include "smp/sym_matrix.hpp"

namespace oracles {

// ---------------------------------------------------------------------------
// characteristic polynomial + Sturm sequence root isolation
// ---------------------------------------------------------------------------

using Poly = std::vector<long double>; // ascending coefficients

inline long double poly_eval(const Poly& p, long double x) {
    long double v = 0.0L;
    for (std::size_t i = p.size(); i-- > 0;) v = v * x + p[i];
    return v;
}

inline Poly poly_derive(const Poly& p) {
    Poly d;
    for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<long double>(i));
    if (d.empty()) d.push_back(0.0L);
    return d;
}

inline void poly_trim(Poly& p) {
    while (p.size() > 1 && std::abs(p.back()) < 1e-300L) p.pop_back();
}

// remainder of a / b
inline Poly poly_rem(Poly a, const Poly& b) {
    poly_trim(a);
    Poly bb = b;
    poly_trim(bb);
    while (a.size() >= bb.size() && !(a.size() == 1 && a[0] == 0.0L)) {
        const long double q = a.back() / bb.back();
        const std::size_t shift = a.size() - bb.size();
        for (std::size_t i = 0; i < bb.size(); ++i) a[i + shift] -= q * bb[i];
        a.pop_back();
        poly_trim(a);
        if (a.size() < bb.size()) break;
    }
    return a;
}

inline std::vector<Poly> sturm_chain(const Poly& p) {
    std::vector<Poly> chain{p, poly_derive(p)};
    for (;;) {
        Poly r = poly_rem(chain[chain.size() - 2], chain.back());
        poly_trim(r);
        if (r.size() == 1 && std::abs(r[0]) < 1e-260L) break;
        for (auto& c : r) c = -c;
        chain.push_back(r);
        if (chain.back().size() == 1) break;
    }
    return chain;
}

inline int sturm_sign_changes(const std::vector<Poly>& chain, long double x) {
    int changes = 0, prev = 0;
    for (const auto& p : chain) {
        const long double v = poly_eval(p, x);
        const int s = v > 1e-280L ? 1 : (v < -1e-280L ? -1 : 0);
        if (s != 0) {
            if (prev != 0 && s != prev) ++changes;
            prev = s;
        }
    }
    return changes;
}

// det(lambda I - A) through sums of principal minors (no eigensolver)
inline Poly char_poly(const smp::SymMatrix& A) {
    const int n = A.dim();
    auto minor_det = [&](const std::vector<int>& idx) {
        const int m = static_cast<int>(idx.size());
        std::vector<std::vector<long double>> a(m, std::vector<long double>(m));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) a[i][j] = A(idx[i], idx[j]);
        long double det = 1.0L; // LU with partial pivoting
        for (int c = 0; c < m; ++c) {
            int piv = c;
            for (int r = c + 1; r < m; ++r)
                if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
            if (std::abs(a[piv][c]) < 1e-300L) return 0.0L;
            if (piv != c) {
                std::swap(a[piv], a[c]);
                det = -det;
            }
            det *= a[c][c];
            for (int r = c + 1; r < m; ++r) {
                const long double f = a[r][c] / a[c][c];
                for (int cc = c; cc < m; ++cc) a[r][cc] -= f * a[c][cc];
            }
        }
        return det;
    };

    // sum of k x k principal minors, k = 1..n
    std::vector<long double> s(n + 1, 0.0L);
    s[0] = 1.0L;
    std::vector<int> idx;
    std::function<void(int, int)> rec = [&](int start, int k) {
        if (k == 0) {
            s[idx.size()] += minor_det(idx);
            return;
        }
        for (int i = start; i <= n - k; ++i) {
            idx.push_back(i);
            rec(i + 1, k - 1);
            idx.pop_back();
        }
    };
    for (int k = 1; k <= n; ++k) rec(0, k);

    Poly p(n + 1, 0.0L); // det(xI - A) = sum_k (-1)^k s_k x^{n-k}
    for (int k = 0; k <= n; ++k) p[n - k] = (k % 2 == 0 ? 1.0L : -1.0L) * s[k];
    return p;
}

// all real roots of the characteristic polynomial, ascending, via Sturm
// bisection; A symmetric so there are exactly n of them counting multiplicity
inline std::vector<double> sturm_eigenvalues(const smp::SymMatrix& A, double tol = 1e-12) {
    const Poly p = char_poly(A);
    const auto chain = sturm_chain(p);
    const int n = A.dim();

    long double bound = 1.0L; // Cauchy-style root bound
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        bound = std::max(bound, 1.0L + std::abs(p[i] / p.back()));

    std::vector<double> roots;
    std::function<void(long double, long double, int)> isolate = [&](long double lo, long double hi,
                                                                     int count) {
        if (count == 0) return;
        if (hi - lo < tol || count == 1) {
            // bisect on the polynomial sign for the final digits
            long double a = lo, b = hi;
            for (int it = 0; it < 200 && b - a > tol * 0.01L; ++it) {
                const long double mid = 0.5L * (a + b);
                const int ca = sturm_sign_changes(chain, a);
                const int cm = sturm_sign_changes(chain, mid);
                if (ca - cm >= 1)
                    b = mid;
                else
                    a = mid;
            }
            for (int i = 0; i < count; ++i) roots.push_back(static_cast<double>(0.5L * (a + b)));
            return;
        }
        const long double mid = 0.5L * (lo + hi);
        const int left = sturm_sign_changes(chain, lo) - sturm_sign_changes(chain, mid);
        isolate(lo, mid, left);
        isolate(mid, hi, count - left);
    };
    const int total = sturm_sign_changes(chain, -bound) - sturm_sign_changes(chain, bound);
    isolate(-bound, bound, std::min(total, n));
    std::sort(roots.begin(), roots.end());
    return roots;
}

// ---------------------------------------------------------------------------
// finite-difference Hessian
// ---------------------------------------------------------------------------

inline smp::SymMatrix fd_hessian(const std::function<double(const std::vector<double>&)>& u,
                                 const std::vector<double>& x, double h = 1e-4) {
    const int n = static_cast<int>(x.size());
    smp::SymMatrix H(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            auto shifted = [&](double si, double sj) {
                std::vector<double> y = x;
                y[i] += si;
                y[j] += sj;
                return u(y);
            };
            const double v =
                (shifted(h, h) - shifted(h, -h) - shifted(-h, h) + shifted(-h, -h)) / (4.0 * h * h);
            H(i, j) = v;
            H(j, i) = v;
        }
    return H;
}

// ---------------------------------------------------------------------------
// nested-grid quadratic minimization (for the test-function reduction)
// ---------------------------------------------------------------------------

// min over |y|_inf <= radius of a callable, by lattice search with shrinking
// boxes around the running best
inline double grid_min(const std::function<double(const std::vector<double>&)>& f, int dim,
                       double radius, int levels = 5, int per_dim = 21) {
    std::vector<double> center(dim, 0.0);
    double width = radius;
    double best = f(center);
    for (int level = 0; level < levels; ++level) {
        std::vector<int> idx(dim, 0);
        std::vector<double> y(dim);
        std::vector<double> best_pt = center;
        for (;;) {
            for (int d = 0; d < dim; ++d) {
                double c = center[d] + width * (2.0 * idx[d] / (per_dim - 1) - 1.0);
                c = std::clamp(c, -radius, radius);
                y[d] = c;
            }
            const double v = f(y);
            if (v < best) {
                best = v;
                best_pt = y;
            }
            int d = 0;
            while (d < dim && ++idx[d] == per_dim) idx[d++] = 0;
            if (d == dim) break;
        }
        center = best_pt;
        width = 3.0 * width / (per_dim - 1);
    }
    return best;
}

// ---------------------------------------------------------------------------
// brute-force mu-scan
// ---------------------------------------------------------------------------

// largest mu on a uniform scan with lambda P_{e perp} - mu P_e still a member
inline double mu_scan(const smp::SubequationSpec& spec, double lambda, const std::vector<double>& e,
                      double mu_lo, double mu_hi, int steps) {
    auto [pe, pp] = smp::projector(e);
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= steps; ++i) {
        const double mu = mu_lo + (mu_hi - mu_lo) * i / steps;
        smp::SymMatrix m = pp;
        m *= lambda;
        smp::SymMatrix s = pe;
        s *= mu;
        if (spec.member(m - s)) best = mu;
    }
    return best;
}

} // namespace oracles
