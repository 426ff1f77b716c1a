#include "spr/frame.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "spr/errors.hpp"

namespace spr {
namespace {

// Ratio sigma_M / (tol * sigma_1) of a row-subset matrix: > 1 means the rows
// span R^M under the relative rank rule. Values within a factor 10 of the
// threshold are flagged as borderline by the callers.
double span_ratio(const Matrix& rows, int ambient, double tol) {
    if (rows.rows() < ambient) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(rows);
    const auto& sv = svd.singularValues();
    const double smax = sv[0];
    if (smax == 0.0) return 0.0;
    return sv[ambient - 1] / (tol * smax);
}

// Visits all k-subsets of {0..n-1} in lexicographic order until fn returns
// false. fn receives the subset as a sorted index vector.
template <typename Fn>
void for_each_subset(int n, int k, Fn&& fn) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    if (k > n) return;
    for (;;) {
        if (!fn(idx)) return;
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

Matrix select_rows(const Matrix& all, const std::vector<int>& idx) {
    Matrix out(static_cast<Eigen::Index>(idx.size()), all.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = all.row(idx[i]);
    return out;
}

std::vector<int> complement_of(const std::vector<int>& idx, int n) {
    std::vector<int> out;
    out.reserve(n - static_cast<int>(idx.size()));
    std::size_t p = 0;
    for (int i = 0; i < n; ++i) {
        if (p < idx.size() && idx[p] == i) {
            ++p;
        } else {
            out.push_back(i);
        }
    }
    return out;
}

}  // namespace

Frame::Frame(Matrix rows) : rows_(std::move(rows)) {
    if (rows_.rows() == 0 || rows_.cols() == 0) {
        throw DomainError("Frame: need at least one vector in a positive dimension");
    }
}

Frame::Frame(Matrix rows, std::vector<std::pair<int, int>> ortho_blocks, double tol)
    : Frame(std::move(rows)) {
    for (const auto& [off, len] : ortho_blocks) {
        if (off < 0 || len < 1 || off + len > count()) {
            throw DomainError("Frame: orthonormal block out of range");
        }
        const Matrix block = rows_.middleRows(off, len);
        const Matrix gram = block * block.transpose();
        if ((gram - Matrix::Identity(len, len)).cwiseAbs().maxCoeff() > tol) {
            throw DomainError("Frame: designated block is not orthonormal");
        }
    }
    ortho_blocks_ = std::move(ortho_blocks);
}

Frame Frame::subframe(const std::vector<int>& indices) const {
    for (int i : indices) {
        if (i < 0 || i >= count()) throw DomainError("subframe: index out of range");
    }
    return Frame(select_rows(rows_, indices));
}

unsigned long long binomial_capped(int n, int k, unsigned long long cap) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    unsigned long long c = 1;
    for (int i = 1; i <= k; ++i) {
        const double projected = static_cast<double>(c) * (n - k + i) / i;
        if (projected > static_cast<double>(cap) * 2.0 + 16.0) return cap + 1;
        c = c * static_cast<unsigned long long>(n - k + i) / static_cast<unsigned long long>(i);
        if (c > cap) return cap + 1;
    }
    return c;
}

Frame stacked_orthobases(int ambient, int count, RngState& rng) {
    if (ambient < 1) throw DomainError("stacked_orthobases: ambient must be positive");
    if (count < 1) throw DomainError("stacked_orthobases: count must be positive");
    const int n = ambient * count;
    constexpr int kMaxAttempts = 32;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        Matrix rows(n, ambient);
        for (int b = 0; b < count; ++b) {
            std::vector<Vector> basis;
            basis.reserve(ambient);
            for (int k = 0; k < ambient; ++k) {
                basis.push_back(random_unit_in_complement(basis, ambient, rng));
            }
            for (int k = 0; k < ambient; ++k) rows.row(b * ambient + k) = basis[k].transpose();
        }
        std::vector<std::pair<int, int>> blocks;
        for (int b = 0; b < count; ++b) blocks.emplace_back(b * ambient, ambient);
        Frame f(std::move(rows), std::move(blocks));

        bool ok = true;
        if (binomial_capped(n, ambient, kSparkSubsetCap) <= kSparkSubsetCap) {
            ok = is_full_spark(f);
        } else {
            // Too many subsets to certify; spot-check random minors.
            for (int t = 0; t < 200 && ok; ++t) {
                std::vector<int> pool(n);
                for (int i = 0; i < n; ++i) pool[i] = i;
                std::vector<int> pick;
                for (int i = 0; i < ambient; ++i) {
                    const int j = i + static_cast<int>(rng.next_u64() % static_cast<unsigned long long>(n - i));
                    std::swap(pool[i], pool[j]);
                    pick.push_back(pool[i]);
                }
                std::sort(pick.begin(), pick.end());
                ok = numeric_rank(select_rows(f.vectors(), pick)) == ambient;
            }
        }
        if (ok) return f;
    }
    throw DependencyError("stacked_orthobases: failed to draw a full-spark stack");
}

bool is_full_spark(const Frame& f) {
    const int n = f.count();
    const int m = f.ambient();
    if (n < m) return false;
    if (binomial_capped(n, m, kSparkSubsetCap) > kSparkSubsetCap) {
        throw ResourceError("is_full_spark: C(" + std::to_string(n) + "," + std::to_string(m) +
                            ") exceeds the subset cap");
    }
    bool full = true;
    for_each_subset(n, m, [&](const std::vector<int>& idx) {
        if (numeric_rank(select_rows(f.vectors(), idx)) < m) {
            full = false;
            return false;
        }
        return true;
    });
    return full;
}

ComplementReport has_complement_property(const Frame& f) {
    const int n = f.count();
    const int m = f.ambient();
    const double tol = kRankTol;

    ComplementReport report;

    // Full spark with N >= 2M-1 implies the property: any side of size >= M
    // spans, and the sides of every split cannot both have size < M.
    if (n >= 2 * m - 1 && binomial_capped(n, m, kSparkSubsetCap) <= kSparkSubsetCap) {
        bool full = true;
        bool borderline = false;
        for_each_subset(n, m, [&](const std::vector<int>& idx) {
            const double ratio = span_ratio(select_rows(f.vectors(), idx), m, tol);
            if (ratio > 0.1 && ratio < 10.0) borderline = true;
            if (ratio <= 1.0) {
                full = false;
                return false;
            }
            return true;
        });
        if (full) {
            report.holds = true;
            report.borderline = borderline;
            return report;
        }
    }

    if (n > kComplementEnumCap) {
        throw ResourceError("has_complement_property: N = " + std::to_string(n) +
                            " exceeds the enumeration cap " + std::to_string(kComplementEnumCap));
    }

    // Every unordered split {I, I^c} is covered by the side of size <= N/2;
    // increasing size makes the first failure minimal.
    bool borderline = false;
    auto spans = [&](const std::vector<int>& idx) {
        if (static_cast<int>(idx.size()) < m) return false;
        const double ratio = span_ratio(select_rows(f.vectors(), idx), m, tol);
        if (ratio > 0.1 && ratio < 10.0) borderline = true;
        return ratio > 1.0;
    };
    for (int k = 0; k <= n / 2; ++k) {
        std::optional<std::vector<int>> failing;
        for_each_subset(n, k, [&](const std::vector<int>& idx) {
            if (!spans(idx) && !spans(complement_of(idx, n))) {
                failing = idx;
                return false;
            }
            return true;
        });
        if (failing) {
            report.holds = false;
            report.failing_subset = std::move(failing);
            report.borderline = borderline;
            return report;
        }
    }
    report.holds = true;
    report.borderline = borderline;
    return report;
}

std::pair<Vector, Vector> complement_failure_witness(const Frame& f,
                                                     const std::vector<int>& subset) {
    const int n = f.count();
    std::vector<int> idx = subset;
    std::sort(idx.begin(), idx.end());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0 || idx[i] >= n || (i > 0 && idx[i] == idx[i - 1])) {
            throw DomainError("complement_failure_witness: bad subset");
        }
    }
    const std::vector<int> comp = complement_of(idx, n);

    const Matrix side = select_rows(f.vectors(), idx);
    const Matrix other = select_rows(f.vectors(), comp);
    const Matrix null_side =
        idx.empty() ? Matrix(Matrix::Identity(f.ambient(), f.ambient())) : null_space(side);
    const Matrix null_other =
        comp.empty() ? Matrix(Matrix::Identity(f.ambient(), f.ambient())) : null_space(other);
    if (null_side.cols() == 0 || null_other.cols() == 0) {
        throw DomainError("complement_failure_witness: subset does not fail the property");
    }

    const Vector x = null_side.col(0);
    // Guard against x and y collapsing onto the same line, which happens only
    // when some direction is orthogonal to the whole frame.
    Vector y = null_other.col(0);
    double best = std::min((x - y).norm(), (x + y).norm());
    for (Eigen::Index c = 1; c < null_other.cols() && best < 1e-9; ++c) {
        const Vector cand = null_other.col(c);
        const double sep = std::min((x - cand).norm(), (x + cand).norm());
        if (sep > best) {
            y = cand;
            best = sep;
        }
    }
    if (best < 1e-9) {
        // x is orthogonal to every frame vector: both moduli vectors vanish,
        // so two different multiples of x already witness the failure.
        return {x, 2.0 * x};
    }
    return {x + y, x - y};
}

Vector classical_sign_recovery(const Frame& f, const Vector& moduli, double tol) {
    const int n = f.count();
    const int m = f.ambient();
    if (moduli.size() != n) throw DomainError("classical_sign_recovery: moduli length mismatch");
    if (n < m) throw DomainError("classical_sign_recovery: frame smaller than ambient dimension");
    for (Eigen::Index i = 0; i < moduli.size(); ++i) {
        if (moduli[i] < 0.0 || !std::isfinite(moduli[i])) {
            throw DomainError("classical_sign_recovery: moduli must be finite and nonnegative");
        }
    }
    const Matrix lead = f.vectors().topRows(m);
    if ((lead * lead.transpose() - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-8) {
        throw DomainError("classical_sign_recovery: leading block is not an orthonormal basis");
    }

    const double scale = moduli.maxCoeff();
    if (scale == 0.0) return Vector::Zero(m);
    const double zero_tol = 1e-14 * scale;

    // Free sign bits: nonzero leading moduli except the pinned largest one.
    int pin = 0;
    for (int i = 1; i < m; ++i) {
        if (moduli[i] > moduli[pin]) pin = i;
    }
    std::vector<int> free_bits;
    for (int i = 0; i < m; ++i) {
        if (i != pin && moduli[i] > zero_tol) free_bits.push_back(i);
    }
    if (free_bits.size() > 24) {
        throw ResourceError("classical_sign_recovery: too many sign bits to enumerate");
    }

    const double accept = tol * scale;
    double best_res = -1.0, second_res = -1.0;
    Vector best_x, second_x;
    const unsigned long long patterns = 1ull << free_bits.size();
    for (unsigned long long p = 0; p < patterns; ++p) {
        Vector coef = moduli.head(m);
        for (std::size_t b = 0; b < free_bits.size(); ++b) {
            if ((p >> b) & 1ull) coef[free_bits[b]] = -coef[free_bits[b]];
        }
        const Vector x = lead.transpose() * coef;
        double res = 0.0;
        for (int i = m; i < n; ++i) {
            res = std::max(res, std::abs(std::abs(f.vectors().row(i).dot(x)) - moduli[i]));
        }
        if (best_res < 0.0 || res < best_res) {
            second_res = best_res;
            second_x = best_x;
            best_res = res;
            best_x = x;
        } else if (second_res < 0.0 || res < second_res) {
            second_res = res;
            second_x = x;
        }
    }

    if (best_res > accept) {
        throw InconsistencyError("classical_sign_recovery: no sign pattern fits the moduli");
    }
    if (second_res >= 0.0 && second_res <= accept) {
        const double sep = std::min((best_x - second_x).norm(), (best_x + second_x).norm());
        if (sep > tol * std::max(1.0, best_x.norm())) {
            throw AmbiguityError("classical_sign_recovery: two sign patterns fit the moduli");
        }
    }
    return best_x;
}

bool is_parseval(const Frame& f, double tol) {
    const Matrix s = f.vectors().transpose() * f.vectors();
    return operator_norm(s - Matrix::Identity(f.ambient(), f.ambient())) <= tol;
}

}  // namespace spr
