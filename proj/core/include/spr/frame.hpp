#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "spr/linalg.hpp"
#include "spr/rng.hpp"

namespace spr {

// Enumeration caps for the exhaustive certificates. Beyond these the
// operations throw ResourceError rather than degrade silently.
inline constexpr unsigned long long kSparkSubsetCap = 2'000'000ull;
inline constexpr int kComplementEnumCap = 24;

// Finite list of vectors in R^M, stored as the rows of an N x M matrix.
// Contiguous index ranges may be designated as orthonormal blocks; the
// constructor validates them.
class Frame {
public:
    explicit Frame(Matrix rows);
    Frame(Matrix rows, std::vector<std::pair<int, int>> ortho_blocks, double tol = 1e-10);

    int ambient() const { return static_cast<int>(rows_.cols()); }
    int count() const { return static_cast<int>(rows_.rows()); }
    const Matrix& vectors() const { return rows_; }
    Vector vec(int n) const { return rows_.row(n).transpose(); }

    // (offset, length) pairs of rows forming orthonormal sets.
    const std::vector<std::pair<int, int>>& ortho_blocks() const { return ortho_blocks_; }

    Frame subframe(const std::vector<int>& indices) const;

private:
    Matrix rows_;
    std::vector<std::pair<int, int>> ortho_blocks_;
};

struct ComplementReport {
    bool holds = false;
    // Minimal-size index set I such that neither {f_n : n in I} nor its
    // complement spans, present exactly when holds is false.
    std::optional<std::vector<int>> failing_subset;
    // Some span decision fell within a factor 10 of the rank threshold;
    // the verdict stands but is numerically delicate.
    bool borderline = false;
};

// `count` orthonormal bases of R^ambient stacked into one frame (N = count *
// ambient vectors). Each basis is drawn by repeatedly sampling a uniform unit
// vector in the complement of the vectors so far; the result is almost surely
// full spark, which is verified exhaustively when the subset count permits and
// spot-checked otherwise, with a bounded number of redraws.
Frame stacked_orthobases(int ambient, int count, RngState& rng);

// Every size-M subset of the frame has rank M. Exhaustive over all C(N, M)
// subsets; throws ResourceError when that count exceeds kSparkSubsetCap.
bool is_full_spark(const Frame& f);

// Checks that for every index set I, either {f_n : n in I} or its complement
// spans R^M. Uses the full-spark shortcut (full spark and N >= 2M-1 implies
// the property) when exhaustive spark verification is feasible; otherwise
// enumerates subsets of size <= N/2 in increasing size, so a reported failing
// subset has minimal size. Enumeration requires N <= kComplementEnumCap.
ComplementReport has_complement_property(const Frame& f);

// For a failing subset I (neither side spans): picks x orthogonal to the span
// of side I and y orthogonal to the span of the complement, and returns
// (x + y, x - y). The two outputs are nonzero, differ beyond global sign, and
// match in modulus against every frame vector. Throws DomainError if I does
// not actually fail.
std::pair<Vector, Vector> complement_failure_witness(const Frame& f,
                                                     const std::vector<int>& subset);

// Recovers x from moduli m_n = |<x, f_n>| for a frame whose first M vectors
// form an orthonormal basis. Enumerates the at most 2^(M-1) sign patterns on
// the leading block (the largest leading modulus is pinned positive, zero
// moduli carry no sign) and scores each candidate by the worst mismatch
// against the trailing moduli. Throws InconsistencyError when no pattern fits
// within tol (relative to the largest modulus) and AmbiguityError when two
// essentially different patterns both fit.
Vector classical_sign_recovery(const Frame& f, const Vector& moduli, double tol = 1e-6);

// Frame operator is the identity: sum_n f_n f_n^T == I within tol.
bool is_parseval(const Frame& f, double tol = 1e-10);

// min(C(n, k), cap + 1) without overflow; used to guard enumerations.
unsigned long long binomial_capped(int n, int k, unsigned long long cap);

}  // namespace spr
