#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

#include "smp/errors.hpp"
#include "smp/rng.hpp"

namespace smp {

/// Dense real symmetric n x n matrix.  Construction symmetrizes the input,
/// storing (M + M^T)/2, and rejects non-finite entries, so downstream code
/// can rely on exact symmetry.
class SymMatrix {
public:
    SymMatrix() = default;

    explicit SymMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {
        if (n < 1) throw input_error("SymMatrix: dimension must be >= 1");
    }

    // Symmetrizes arbitrary square input.
    static SymMatrix from_entries(int n, const std::vector<double>& rowmajor) {
        if (n < 1) throw input_error("SymMatrix: dimension must be >= 1");
        if (rowmajor.size() != static_cast<std::size_t>(n) * n)
            throw input_error("SymMatrix: entry count does not match dimension");
        SymMatrix m(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double v = 0.5 * (rowmajor[idx(n, i, j)] + rowmajor[idx(n, j, i)]);
                m.a_[idx(n, i, j)] = v;
            }
        m.check_finite();
        return m;
    }

    static SymMatrix zero(int n) { return SymMatrix(n); }

    static SymMatrix identity(int n) {
        SymMatrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static SymMatrix diag(std::initializer_list<double> d) {
        return diag(std::vector<double>(d));
    }

    static SymMatrix diag(const std::vector<double>& d) {
        SymMatrix m(static_cast<int>(d.size()));
        for (int i = 0; i < m.n_; ++i) m(i, i) = d[static_cast<std::size_t>(i)];
        m.check_finite();
        return m;
    }

    // v v^T (no normalization)
    static SymMatrix outer(const std::vector<double>& v) {
        SymMatrix m(static_cast<int>(v.size()));
        for (int i = 0; i < m.n_; ++i)
            for (int j = 0; j <= i; ++j) {
                const double x = v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
                m(i, j) = x;
                m(j, i) = x;
            }
        m.check_finite();
        return m;
    }

    int dim() const { return n_; }

    double& operator()(int i, int j) { return a_[idx(n_, i, j)]; }
    double operator()(int i, int j) const { return a_[idx(n_, i, j)]; }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius() const {
        double s = 0.0;
        for (double x : a_) s += x * x;
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (double x : a_) m = std::max(m, std::abs(x));
        return m;
    }

    SymMatrix& operator+=(const SymMatrix& o) {
        require_same_dim(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }

    SymMatrix& operator-=(const SymMatrix& o) {
        require_same_dim(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }

    SymMatrix& operator*=(double t) {
        for (auto& x : a_) x *= t;
        return *this;
    }

    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
    friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
    friend SymMatrix operator*(double t, SymMatrix a) { return a *= t; }
    friend SymMatrix operator-(SymMatrix a) { return a *= -1.0; }

    std::vector<double> apply(const std::vector<double>& v) const {
        std::vector<double> r(static_cast<std::size_t>(n_), 0.0);
        for (int i = 0; i < n_; ++i) {
            double s = 0.0;
            for (int j = 0; j < n_; ++j) s += (*this)(i, j) * v[static_cast<std::size_t>(j)];
            r[static_cast<std::size_t>(i)] = s;
        }
        return r;
    }

    // Q^T A Q for an orthogonal Q given as columns.
    SymMatrix conjugate(const std::vector<std::vector<double>>& q_cols) const {
        const int n = n_;
        SymMatrix out(n);
        std::vector<std::vector<double>> aq(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) aq[static_cast<std::size_t>(j)] = apply(q_cols[static_cast<std::size_t>(j)]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) {
                double s = 0.0;
                for (int k = 0; k < n; ++k)
                    s += q_cols[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                         aq[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
                out(i, j) = s;
                out(j, i) = s;
            }
        return out;
    }

    void check_finite() const {
        for (double x : a_)
            if (!std::isfinite(x)) throw input_error("SymMatrix: non-finite entry");
    }

    const std::vector<double>& raw() const { return a_; }

private:
    static std::size_t idx(int n, int i, int j) {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j);
    }

    void require_same_dim(const SymMatrix& o) const {
        if (o.n_ != n_) throw input_error("SymMatrix: dimension mismatch");
    }

    int n_ = 0;
    std::vector<double> a_;
};

inline double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

/// Orthogonal projections onto span{e} and its complement:
/// P_e = e e^T / |e|^2 and P_perp = I - P_e, so P_e + P_perp = I.
inline std::pair<SymMatrix, SymMatrix> projector(const std::vector<double>& e) {
    const double nrm = norm2(e);
    if (!(nrm > 0.0)) throw input_error("projector: zero direction");
    std::vector<double> u(e);
    for (auto& x : u) x /= nrm;
    SymMatrix pe = SymMatrix::outer(u);
    SymMatrix pp = SymMatrix::identity(static_cast<int>(e.size()));
    pp -= pe;
    return {pe, pp};
}

/// Hessian of the radial function u(x) = psi(|x|) at x != 0:
///   (psi'(|x|)/|x|) P_{x perp} + psi''(|x|) P_x,
/// with eigenvalue psi'/|x| of multiplicity n-1 and psi'' of multiplicity 1.
inline SymMatrix radial_hessian(const std::vector<double>& x, double psi1, double psi2) {
    const double r = norm2(x);
    if (!(r > 0.0)) throw input_error("radial_hessian: x = 0 is outside the radial chart");
    if (!std::isfinite(psi1) || !std::isfinite(psi2))
        throw input_error("radial_hessian: non-finite jet");
    auto [pe, pp] = projector(x);
    pp *= psi1 / r;
    pe *= psi2;
    return pp + pe;
}

inline SymMatrix random_symmetric(Rng& rng, int n, double scale = 1.0) {
    SymMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            const double v = scale * rng.gaussian();
            m(i, j) = v;
            m(j, i) = v;
        }
    return m;
}

// G^T G for Gaussian G: positive semidefinite without any projection step.
inline SymMatrix random_psd(Rng& rng, int n, double scale = 1.0) {
    std::vector<std::vector<double>> g(static_cast<std::size_t>(n));
    for (auto& row : g) row = rng.gaussian_vec(n);
    SymMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                s += g[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] *
                     g[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
            s *= scale / n;
            m(i, j) = s;
            m(j, i) = s;
        }
    return m;
}

// Haar-distributed orthogonal matrix as columns: Gram-Schmidt on Gaussian
// vectors (thin QR with positive R diagonal).
inline std::vector<std::vector<double>> haar_orthogonal(Rng& rng, int n) {
    std::vector<std::vector<double>> q;
    q.reserve(static_cast<std::size_t>(n));
    while (static_cast<int>(q.size()) < n) {
        auto v = rng.gaussian_vec(n);
        for (const auto& u : q) {
            double d = 0.0;
            for (int k = 0; k < n; ++k) d += u[static_cast<std::size_t>(k)] * v[static_cast<std::size_t>(k)];
            for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] -= d * u[static_cast<std::size_t>(k)];
        }
        const double nrm = norm2(v);
        if (nrm < 1e-10) continue; // rare degenerate draw, resample
        for (auto& x : v) x /= nrm;
        q.push_back(std::move(v));
    }
    return q;
}

} // namespace smp
