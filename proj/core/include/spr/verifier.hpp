#pragma once

#include <optional>
#include <string>
#include <utility>

#include "spr/builder.hpp"
#include "spr/linalg.hpp"
#include "spr/rng.hpp"
#include "spr/subspace.hpp"

namespace spr {

// Dimension of the space of symmetric M x M matrices.
inline int sym_dim(int ambient) { return ambient * (ambient + 1) / 2; }

// Coordinates of (a + a^T)/2 in the orthonormal symmetric basis {E_ii} u
// {(E_ij + E_ji)/sqrt 2, i<j}: diagonal first, then the upper triangle row by
// row scaled by sqrt 2. Frobenius inner products become dot products.
Vector sym_lift(const Matrix& a);
Matrix sym_unlift(const Vector& v, int ambient);

// Matrix of the linear map taking a symmetric A to (<A, P_n>)_n. Row n is
// sym_lift of the n-th projector, so applying it to sym_lift(x x^T) gives the
// measurement vector of x.
struct LiftOperator {
    int ambient = 0;
    Matrix rows;  // N x sym_dim(ambient)
};
LiftOperator lift_operator(const SubspaceFamily& fam);

// Structural injectivity certificate: both designs invertible over the
// integers and the 2M-1 base vectors have the complement property. When
// `certified` is true the family determines every signal up to sign.
struct Certificate {
    bool certified = false;
    // Some span decision in the complement check was numerically delicate.
    bool borderline = false;
    std::string detail;
};
Certificate certify_structured(const Recipe& recipe);

// Nonzero symmetric C with F(C) ~ 0 and rank <= 2: a constructive refutation
// of injectivity. residual is ||F c|| relative to ||F||; rank_gap is the
// singular-value ratio that justified the rank call (sigma1/sigma2 for rank
// 1, sigma2/sigma3 for rank 2). u, v are the leading unit eigenvectors and
// lam1, lam2 their eigenvalues, |lam1| >= |lam2| (v, lam2 zero for rank 1).
struct WitnessMatrix {
    Matrix c;
    double residual = 0.0;
    int rank = 0;
    double rank_gap = 0.0;
    Vector u, v;
    double lam1 = 0.0, lam2 = 0.0;
    std::string strategy;
};

// Searches Null(F) for a rank <= 2 element: (i) the null basis elements
// themselves, (ii) for M == 3 with null dimension >= 2, bisection on
// t -> det(A cos t + B sin t), whose endpoints det(A) and det(-A) = -det(A)
// bracket a root, (iii) seeded descent on the third singular value over the
// null-space unit sphere. Returns nothing when the null space is trivial or
// every strategy fails; absence of a witness is not a certificate.
std::optional<WitnessMatrix> rank12_witness_search(const SubspaceFamily& fam, RngState& rng,
                                                   int restarts = 16);

// Converts a rank-2 witness with opposite-sign eigenvalues into the pair
// (sqrt|lam1| u, sqrt|lam2| v): orthogonal, nonzero, equal measurements.
// A rank-1 witness (or same signs) means some nonzero vector measures
// identically zero, a trivial refutation with no pair; that throws.
std::pair<Vector, Vector> witness_to_pair(const WitnessMatrix& w);

// Seeded local minimization of sum_n (||P_n u||^2 - ||P_n v||^2)^2 over
// u perp v, ||u|| = 1, 0 < ||v|| <= 1. A returned pair has objective below
// 1e-16 and is a genuine refutation witness; nothing means inconclusive.
std::optional<std::pair<Vector, Vector>> orthogonal_pair_search(const SubspaceFamily& fam,
                                                                RngState& rng, int restarts = 50);

// Orthonormal basis (rows) of W whose first vectors are proportional to
// Px + Py and Px - Py, completed greedily; against it the moduli of x and y
// agree coordinatewise. Requires ||Px|| == ||Py|| within tol.
Matrix adapted_basis(const Subspace& w, const Vector& x, const Vector& y, double tol = 1e-8);

// Upper estimate of the injectivity margin: the smallest value of
// max_n | ||P_n x|| - ||P_n y|| | over sampled and locally refined admissible
// pairs (x perp y, 1 = ||x|| >= ||y|| > 0). Zero (up to search resolution)
// for non-injective families.
double stability_margin(const SubspaceFamily& fam, RngState& rng, int samples = 64);

// Rotates every subspace by an independent small random rotation with
// ||P_n - Q_n|| < eps in operator norm; dimensions are preserved.
SubspaceFamily perturb_family(const SubspaceFamily& fam, double eps, RngState& rng);

// Draws a random orthonormal basis inside every subspace, pools the vectors,
// and checks the complement property, `trials` times. A single failure
// disproves injectivity (returns false); all passes are evidence, not proof.
// Requires sum of dimensions <= kComplementEnumCap.
bool random_basis_complement_check(const SubspaceFamily& fam, RngState& rng, int trials);

}  // namespace spr
