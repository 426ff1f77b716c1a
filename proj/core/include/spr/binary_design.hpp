#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace spr {

using IntMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;
using Int64Matrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// Square 0/1 matrix with its exact integer determinant. Invertibility
// decisions are exact; no floating point is involved.
class ZeroOneDesign {
public:
    // Validates entries are 0/1 and computes the determinant (Bareiss,
    // fraction-free, 128-bit intermediates).
    static ZeroOneDesign from_matrix(IntMatrix m);

    int size() const { return static_cast<int>(m_.rows()); }
    const IntMatrix& matrix() const { return m_; }
    std::int64_t det() const { return det_; }
    bool invertible() const { return det_ != 0; }

    // Column indices of the ones in row i, ascending.
    std::vector<int> row_support(int i) const;

    // Exact adjugate: adjugate() * matrix() == det() * I.
    Int64Matrix adjugate() const;

private:
    ZeroOneDesign(IntMatrix m, std::int64_t det) : m_(std::move(m)), det_(det) {}

    IntMatrix m_;
    std::int64_t det_;
};

// Exact determinant of a small integer matrix (Bareiss elimination).
std::int64_t integer_det(const IntMatrix& m);

// Invertible 0/1 matrix whose row sums equal row_sums, in the given order.
// Requires |row_sums| >= 2 and every entry in [1, |row_sums| - 1]. The
// construction sorts the sums nonincreasing, builds inductively (appending a
// bordered row/column and repairing the last row by a single entry swap when
// the plain bordering is singular), then un-permutes the rows; it succeeds
// for every admissible input and is deterministic.
ZeroOneDesign zero_one_invertible(const std::vector<int>& row_sums);

std::vector<int> row_sums_of(const ZeroOneDesign& design);

}  // namespace spr
