#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "smp/errors.hpp"
#include "smp/sym_matrix.hpp"

namespace smp {

/// Spectral decomposition with eigenvalues sorted ascending and the matching
/// orthonormal eigenvectors; values[0] is lambda_min, values[n-1] lambda_max.
struct EigenDecomposition {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors; // vectors[k] pairs with values[k]

    double lambda_min() const { return values.front(); }
    double lambda_max() const { return values.back(); }
};

/// Cyclic Jacobi rotations, run until the off-diagonal norm drops below
/// 1e-12 * |A|_F.  Deterministic and symmetric-exact, which is what the
/// membership predicates downstream need.
inline EigenDecomposition eigen_sorted(const SymMatrix& A) {
    A.check_finite();
    const int n = A.dim();

    std::vector<std::vector<double>> a(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[i][j] = A(i, j);

    std::vector<std::vector<double>> v(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int i = 0; i < n; ++i) v[i][i] = 1.0;

    const double fro = A.frobenius();
    const double threshold = 1e-12 * fro;

    auto off_norm = [&]() {
        double s = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) s += 2.0 * a[p][q] * a[p][q];
        return std::sqrt(s);
    };

    if (n > 1 && fro > 0.0) {
        for (int sweep = 0; sweep < 128; ++sweep) {
            if (off_norm() <= threshold) break;
            for (int p = 0; p < n - 1; ++p) {
                for (int q = p + 1; q < n; ++q) {
                    const double apq = a[p][q];
                    if (std::abs(apq) <= 1e-300) continue;
                    const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                    double t;
                    if (std::abs(theta) > 1e150) {
                        t = 0.5 / theta;
                    } else {
                        t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                        if (theta < 0.0) t = -t;
                    }
                    const double c = 1.0 / std::sqrt(t * t + 1.0);
                    const double s = t * c;
                    const double tau = s / (1.0 + c);

                    const double app = a[p][p], aqq = a[q][q];
                    a[p][p] = app - t * apq;
                    a[q][q] = aqq + t * apq;
                    a[p][q] = 0.0;
                    a[q][p] = 0.0;
                    for (int k = 0; k < n; ++k) {
                        if (k == p || k == q) continue;
                        const double akp = a[k][p], akq = a[k][q];
                        a[k][p] = akp - s * (akq + tau * akp);
                        a[p][k] = a[k][p];
                        a[k][q] = akq + s * (akp - tau * akq);
                        a[q][k] = a[k][q];
                    }
                    for (int k = 0; k < n; ++k) {
                        const double vkp = v[k][p], vkq = v[k][q];
                        v[k][p] = vkp - s * (vkq + tau * vkp);
                        v[k][q] = vkq + s * (vkp - tau * vkq);
                    }
                }
            }
        }
        if (off_norm() > 16.0 * threshold + 1e-300)
            throw numeric_error("eigen_sorted: Jacobi sweep did not converge");
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a[i][i] < a[j][j]; });

    EigenDecomposition dec;
    dec.values.reserve(static_cast<std::size_t>(n));
    dec.vectors.reserve(static_cast<std::size_t>(n));
    for (int k : order) {
        dec.values.push_back(a[k][k]);
        std::vector<double> col(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) col[i] = v[i][k];
        // fix sign so outputs are unique: largest-magnitude component positive
        int imax = 0;
        for (int i = 1; i < n; ++i)
            if (std::abs(col[i]) > std::abs(col[imax])) imax = i;
        if (col[imax] < 0.0)
            for (auto& x : col) x = -x;
        dec.vectors.push_back(std::move(col));
    }
    return dec;
}

inline double lambda_min(const SymMatrix& A) { return eigen_sorted(A).lambda_min(); }
inline double lambda_max(const SymMatrix& A) { return eigen_sorted(A).lambda_max(); }

// k-th smallest eigenvalue, 1-based; lambda_k(A, 2) is the second eigenvalue
// used by the min/2 predicate.
inline double lambda_k(const SymMatrix& A, int k) {
    const auto dec = eigen_sorted(A);
    if (k < 1 || k > A.dim()) throw input_error("lambda_k: index out of range");
    return dec.values[static_cast<std::size_t>(k - 1)];
}

// trace of the positive / negative part of A
inline std::pair<double, double> trace_pos_neg(const SymMatrix& A) {
    double tp = 0.0, tn = 0.0;
    for (double lam : eigen_sorted(A).values) {
        if (lam > 0.0)
            tp += lam;
        else
            tn += lam;
    }
    return {tp, tn};
}

} // namespace smp
