#include "spr/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "spr/errors.hpp"
#include "spr/frame.hpp"

namespace spr {
namespace {

// Solves d * out = rhs exactly: out = adjugate * rhs / det, so the only
// floating-point error is the final division.
Vector exact_design_solve(const ZeroOneDesign& d, const Vector& rhs) {
    if (!d.invertible()) {
        throw DomainError("reconstruct: design matrix is singular, recipe is not certifiable");
    }
    const Int64Matrix adj = d.adjugate();
    const double det = static_cast<double>(d.det());
    const int n = d.size();
    Vector out(n);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += static_cast<double>(adj(i, j)) * rhs[j];
        out[i] = acc / det;
    }
    return out;
}

// Rounding may drive solved squares slightly negative; corruption drives them
// far negative. The zero clamp keeps exactly-zero coordinates exact.
void clamp_squares(Vector& sq, double scale) {
    const double zero_tol = 1e-13 * scale;
    const double reject = -1e-9 * scale;
    for (int i = 0; i < sq.size(); ++i) {
        if (sq[i] < reject) {
            throw InconsistencyError(
                "reconstruct: solved squared modulus is negative beyond tolerance");
        }
        if (sq[i] < zero_tol) sq[i] = 0.0;
    }
}

void canonicalize_sign(Vector& x) {
    const double nn = x.norm();
    if (nn == 0.0) return;
    for (int i = 0; i < x.size(); ++i) {
        if (std::abs(x[i]) > 1e-9 * nn) {
            if (x[i] < 0.0) x = -x;
            return;
        }
    }
}

double check_remeasure(const SubspaceFamily& fam, const Vector& x, const MeasurementVector& meas,
                       double denom, double tol) {
    const MeasurementVector back = measure(fam, x);
    const double worst = (back - meas).cwiseAbs().maxCoeff();
    if (denom <= 0.0) return worst == 0.0 ? 0.0 : 1.0;
    const double residual = worst / denom;
    if (residual > tol) {
        throw InconsistencyError("reconstruct: recovered signal fails to reproduce the "
                                 "measurements (relative mismatch " +
                                 std::to_string(residual) + ")");
    }
    return residual;
}

void require_finite(const MeasurementVector& meas) {
    for (int i = 0; i < meas.size(); ++i) {
        if (!std::isfinite(meas[i])) {
            throw DomainError("reconstruct: measurements must be finite");
        }
    }
}

// Sign recovery against a full-spark but non-orthonormal frame of unit
// normals: enumerate sign patterns on a greedily selected best-conditioned
// M-subset, solve the square system per pattern, and score against all
// moduli. The largest selected modulus is pinned positive; zero moduli carry
// no sign bit.
Vector hyperplane_sign_search(const Matrix& normals, const Vector& moduli, double tol) {
    const int n = static_cast<int>(normals.rows());
    const int m = static_cast<int>(normals.cols());
    const double scale = moduli.maxCoeff();
    if (scale <= 0.0) return Vector::Zero(m);

    // Greedy volume maximization: repeatedly take the normal with the largest
    // component outside the span of those already chosen.
    std::vector<int> chosen;
    Matrix residue = normals;
    for (int step = 0; step < m; ++step) {
        int best = -1;
        double best_norm = 1e-8;
        for (int i = 0; i < n; ++i) {
            if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
            const double rn = residue.row(i).norm();
            if (rn > best_norm) {
                best_norm = rn;
                best = i;
            }
        }
        if (best < 0) throw DomainError("reconstruct: hyperplane normals do not span");
        chosen.push_back(best);
        const Vector dir = residue.row(best).transpose() / best_norm;
        residue -= (residue * dir) * dir.transpose();
    }

    Matrix v(m, m);
    for (int i = 0; i < m; ++i) v.row(i) = normals.row(chosen[i]);
    const Eigen::FullPivLU<Matrix> lu(v);

    int pinned = 0;
    for (int i = 1; i < m; ++i) {
        if (moduli[chosen[i]] > moduli[chosen[pinned]]) pinned = i;
    }
    std::vector<int> free_bits;
    for (int i = 0; i < m; ++i) {
        if (i != pinned && moduli[chosen[i]] > 1e-14 * scale) free_bits.push_back(i);
    }
    if (free_bits.size() > 24) {
        throw ResourceError("reconstruct: too many sign bits to enumerate");
    }

    Vector best_x, second_x;
    double best_score = std::numeric_limits<double>::infinity();
    double second_score = std::numeric_limits<double>::infinity();
    const std::uint64_t patterns = 1ull << free_bits.size();
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
        Vector rhs(m);
        for (int i = 0; i < m; ++i) rhs[i] = moduli[chosen[i]];
        for (std::size_t b = 0; b < free_bits.size(); ++b) {
            if (mask & (1ull << b)) rhs[free_bits[b]] = -rhs[free_bits[b]];
        }
        const Vector x = lu.solve(rhs);
        double score = 0.0;
        for (int i = 0; i < n; ++i) {
            score = std::max(score, std::abs(std::abs(normals.row(i).dot(x)) - moduli[i]));
        }
        if (score < best_score) {
            second_score = best_score;
            second_x = best_x;
            best_score = score;
            best_x = x;
        } else if (score < second_score) {
            second_score = score;
            second_x = x;
        }
    }

    const double accept = tol * scale;
    if (best_score > accept) {
        throw InconsistencyError("reconstruct: no sign pattern matches the moduli (best "
                                 "mismatch " +
                                 std::to_string(best_score) + ")");
    }
    if (second_score <= accept) {
        const double sep =
            std::min((best_x - second_x).norm(), (best_x + second_x).norm());
        if (sep > tol * std::max(1.0, best_x.norm())) {
            throw AmbiguityError("reconstruct: two essentially different sign patterns both "
                                 "match the moduli");
        }
    }
    return best_x;
}

}  // namespace

ReconstructionResult reconstruct(const Recipe& recipe, const MeasurementVector& meas,
                                 double tol) {
    const int m = recipe.ambient();
    if (meas.size() != 2 * m - 1) {
        throw DomainError("reconstruct: expected 2M-1 measurements");
    }
    require_finite(meas);
    const SubspaceFamily fam = family_from_recipe(recipe);
    const double meas_scale = meas.size() ? meas.cwiseAbs().maxCoeff() : 0.0;

    Vector sq_a = exact_design_solve(recipe.design_a, meas.head(m));
    // The leading block is an orthonormal basis, so the squares sum to the
    // signal energy.
    double norm2 = sq_a.sum();
    if (norm2 < -1e-9 * meas_scale) {
        throw InconsistencyError("reconstruct: recovered signal energy is negative");
    }
    norm2 = std::max(norm2, 0.0);
    const double denom = std::max(norm2, meas_scale);

    Vector x;
    if (norm2 <= 1e-13 * std::max(meas_scale, 1e-300) || meas_scale == 0.0) {
        x = Vector::Zero(m);
    } else {
        Vector rhs_b(m - 1);
        for (int k = 0; k < m - 1; ++k) {
            rhs_b[k] = recipe.complement_rows[k] ? norm2 - meas[m + k] : meas[m + k];
        }
        Vector sq_b = exact_design_solve(recipe.design_b, rhs_b);

        Vector squares(2 * m - 1);
        squares.head(m) = sq_a;
        squares.tail(m - 1) = sq_b;
        clamp_squares(squares, norm2);

        x = classical_sign_recovery(recipe.base, squares.cwiseSqrt(), tol);
        canonicalize_sign(x);
    }

    ReconstructionResult result;
    result.residual = check_remeasure(fam, x, meas, denom, tol);
    result.signal = std::move(x);
    return result;
}

ReconstructionResult reconstruct_hyperplanes(const HyperplaneFamily& hf,
                                             const MeasurementVector& meas, double tol) {
    const int m = hf.family.ambient();
    const int n = hf.family.count();
    if (meas.size() != n) {
        throw DomainError("reconstruct: expected one measurement per hyperplane");
    }
    if (hf.normals.rows() != n || hf.normals.cols() != m || hf.weights.size() != n) {
        throw DomainError("reconstruct: hyperplane family metadata is inconsistent");
    }
    require_finite(meas);
    const double b = hf.weights.sum() - 1.0;
    if (std::abs(b) <= 1e-6) {
        throw DomainError("reconstruct: tight weights sum to 1, energy is unrecoverable");
    }

    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) norm2 += hf.weights[i] / b * meas[i];
    const double meas_scale = meas.size() ? meas.cwiseAbs().maxCoeff() : 0.0;
    if (norm2 < -1e-9 * meas_scale) {
        throw InconsistencyError("reconstruct: recovered signal energy is negative");
    }
    norm2 = std::max(norm2, 0.0);
    const double denom = std::max(norm2, meas_scale);

    Vector x;
    if (norm2 <= 1e-13 * std::max(meas_scale, 1e-300) || meas_scale == 0.0) {
        x = Vector::Zero(m);
    } else {
        Vector squares(n);
        for (int i = 0; i < n; ++i) squares[i] = norm2 - meas[i];
        clamp_squares(squares, norm2);
        x = hyperplane_sign_search(hf.normals, squares.cwiseSqrt(), tol);
        canonicalize_sign(x);
    }

    ReconstructionResult result;
    result.residual = check_remeasure(hf.family, x, meas, denom, tol);
    result.signal = std::move(x);
    return result;
}

}  // namespace spr
