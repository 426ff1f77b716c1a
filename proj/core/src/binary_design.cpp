#include "spr/binary_design.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "spr/errors.hpp"

namespace spr {
namespace {

// Fraction-free Bareiss elimination; intermediates are exact minors, so
// 128-bit accumulators cover every 0/1 matrix of practical size.
__int128 bareiss_det(Eigen::Matrix<__int128, Eigen::Dynamic, Eigen::Dynamic> a) {
    const Eigen::Index n = a.rows();
    if (n == 0) return 1;
    __int128 sign = 1;
    __int128 prev = 1;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            Eigen::Index p = k + 1;
            while (p < n && a(p, k) == 0) ++p;
            if (p == n) return 0;
            a.row(k).swap(a.row(p));
            sign = -sign;
        }
        for (Eigen::Index i = k + 1; i < n; ++i) {
            for (Eigen::Index j = k + 1; j < n; ++j) {
                a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
            }
            a(i, k) = 0;
        }
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

std::int64_t narrow_det(__int128 d) {
    if (d > static_cast<__int128>(INT64_MAX) || d < static_cast<__int128>(INT64_MIN)) {
        throw ResourceError("integer_det: determinant exceeds 64-bit range");
    }
    return static_cast<std::int64_t>(d);
}

// Inductive core of the construction; sums must be nonincreasing with
// entries in [1, K-1] where K = |sums| >= 2.
IntMatrix build_sorted(const std::vector<int>& sums) {
    const int k = static_cast<int>(sums.size());
    if (k == 2) {
        return IntMatrix::Identity(2, 2);
    }
    // Rows whose sum attains the maximum K-1 get an extra one in the new
    // last column; their inner sums drop by one for the recursive call.
    int s = 0;
    while (s < k && sums[s] == k - 1) ++s;
    const int d = std::min(s, k - 1);
    std::vector<int> inner(sums.begin(), sums.begin() + (k - 1));
    for (int i = 0; i < d; ++i) --inner[i];
    const IntMatrix a = build_sorted(inner);

    IntMatrix b = IntMatrix::Zero(k, k);
    b.topLeftCorner(k - 1, k - 1) = a;
    for (int i = 0; i < d; ++i) b(i, k - 1) = 1;
    for (int j = 0; j < sums[k - 1]; ++j) b(k - 1, j) = 1;
    if (integer_det(b) != 0) return b;

    // Bordering failed; move one of the last row's ones into the corner.
    for (int l = 0; l < sums[k - 1]; ++l) {
        IntMatrix c = b;
        c(k - 1, l) = 0;
        c(k - 1, k - 1) = 1;
        if (integer_det(c) != 0) return c;
    }
    throw Error("zero_one_invertible: construction failed (unreachable for admissible sums)");
}

}  // namespace

std::int64_t integer_det(const IntMatrix& m) {
    if (m.rows() != m.cols()) throw DomainError("integer_det: matrix must be square");
    return narrow_det(bareiss_det(m.cast<__int128>()));
}

ZeroOneDesign ZeroOneDesign::from_matrix(IntMatrix m) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw DomainError("ZeroOneDesign: matrix must be square and nonempty");
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (m(i, j) != 0 && m(i, j) != 1) {
                throw DomainError("ZeroOneDesign: entries must be 0 or 1");
            }
        }
    }
    const std::int64_t det = integer_det(m);
    return ZeroOneDesign(std::move(m), det);
}

std::vector<int> ZeroOneDesign::row_support(int i) const {
    if (i < 0 || i >= size()) throw DomainError("row_support: row index out of range");
    std::vector<int> cols;
    for (int j = 0; j < size(); ++j) {
        if (m_(i, j) == 1) cols.push_back(j);
    }
    return cols;
}

Int64Matrix ZeroOneDesign::adjugate() const {
    const int n = size();
    Int64Matrix adj(n, n);
    if (n == 1) {
        adj(0, 0) = 1;
        return adj;
    }
    IntMatrix minor(n - 1, n - 1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int r = 0, mr = 0; r < n; ++r) {
                if (r == i) continue;
                for (int c = 0, mc = 0; c < n; ++c) {
                    if (c == j) continue;
                    minor(mr, mc++) = m_(r, c);
                }
                ++mr;
            }
            const std::int64_t cof = integer_det(minor);
            adj(j, i) = ((i + j) % 2 == 0) ? cof : -cof;
        }
    }
    return adj;
}

ZeroOneDesign zero_one_invertible(const std::vector<int>& row_sums) {
    const int k = static_cast<int>(row_sums.size());
    if (k < 2) throw DomainError("zero_one_invertible: need at least two rows");
    for (int v : row_sums) {
        if (v < 1 || v > k - 1) {
            throw DomainError("zero_one_invertible: row sums must lie in [1, " +
                              std::to_string(k - 1) + "]");
        }
    }
    std::vector<int> order(row_sums.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return row_sums[a] > row_sums[b]; });
    std::vector<int> sorted(row_sums.size());
    for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = row_sums[order[i]];

    const IntMatrix built = build_sorted(sorted);
    IntMatrix out(k, k);
    for (int i = 0; i < k; ++i) out.row(order[i]) = built.row(i);
    return ZeroOneDesign::from_matrix(std::move(out));
}

std::vector<int> row_sums_of(const ZeroOneDesign& design) {
    std::vector<int> sums(design.size());
    for (int i = 0; i < design.size(); ++i) {
        sums[i] = design.matrix().row(i).sum();
    }
    return sums;
}

}  // namespace spr
