#pragma once

#include <vector>

#include "spr/binary_design.hpp"
#include "spr/frame.hpp"
#include "spr/rng.hpp"
#include "spr/subspace.hpp"

namespace spr {

// Construction record for a real family of 2M-1 subspaces in R^M. The base
// frame holds an orthonormal basis (rows 0..M-1) followed by M-1 rows of a
// second orthonormal set, full spark as a whole. Design A (M x M) groups
// block-one vectors into the first M subspaces; design B ((M-1) x (M-1))
// groups block-two vectors into the rest. A block-B subspace of dimension
// M-1 is complement-encoded: its design row has a single one naming the
// block-two vector whose orthocomplement it is.
struct Recipe {
    Frame base;
    ZeroOneDesign design_a;
    ZeroOneDesign design_b;
    std::vector<bool> complement_rows;  // size M-1, aligned with design_b rows
    std::vector<int> dims;              // requested dimensions, size 2M-1

    int ambient() const { return base.ambient(); }
};

struct BuiltFamily {
    SubspaceFamily family;
    Recipe recipe;
};

// Hyperplane family with the weights that make the unit normals a weighted
// tight frame: sum_n weights[n] * normal_n normal_n^T == I, sum weights != 1.
struct HyperplaneFamily {
    SubspaceFamily family;  // complement-encoded hyperplanes
    Matrix normals;         // N x M unit rows, aligned with the family
    Vector weights;
};

// Decodes a recipe into the subspace family it describes.
SubspaceFamily family_from_recipe(const Recipe& recipe);

// Builds 2M-1 subspaces of the given dimensions (each in [1, M-1]) that
// determine every signal up to sign. Draws the base frame from two stacked
// orthonormal bases and wires the two invertible 0/1 designs.
BuiltFamily build_real_family(int ambient, const std::vector<int>& dims, RngState& rng);

// Complex analogue: 4M-3 subspaces of C^M with the given dimensions, grouped
// from four random unitary bases (all M rows of the first, M-1 of each
// other). No certificate is produced; injectivity is empirical here.
ComplexSubspaceFamily build_complex_family(int ambient, const std::vector<int>& dims,
                                           RngState& rng);

// N > M hyperplanes whose normals form a full-spark Parseval frame with no
// two rows orthogonal; weights are the squared row norms before
// normalization, so they sum to M. Reconstruction additionally wants
// N >= 2M-1 for the sign search to be determined generically.
HyperplaneFamily build_hyperplane_family(int ambient, int count, RngState& rng);

// The five-vector Parseval frame in R^3 built from an origin-centered regular
// pentagon of radius sqrt(2/5) lifted to height 1/sqrt(5): full spark, no two
// vectors orthogonal.
Frame r3_parseval_example();

// Hyperplane family over an explicitly given frame of nonzero, pairwise
// non-orthogonal, full-spark rows: normals are the normalized rows and the
// weights are the squared norms. Requires the rows to form a Parseval frame.
HyperplaneFamily hyperplanes_from_frame(const Frame& f);

// Recovers hyperplane structure (normals and tight weights) from a family
// whose members all have dimension M-1. Throws DomainError when no weight
// vector reproduces the identity within tolerance or the weights sum to 1.
HyperplaneFamily hyperplane_family_from(const SubspaceFamily& fam);

// Five subspaces of R^3 (two planes sharing a line, that line, and two
// coordinate lines of a second basis) that determine signals up to sign,
// together with the family of their orthocomplements, which does not: the
// complement projectors satisfy Q1 + Q2 == Q3, collapsing the lifted
// measurement rank. Deterministic (internally seeded).
struct R3Counterexample {
    SubspaceFamily family;
    SubspaceFamily complements;
    Recipe recipe;  // certifiable recipe for `family`
};
R3Counterexample r3_counterexample_family();

// Grows every subspace of dimension < M-1 to a hyperplane while preserving
// the equal measurements of the witness pair (x, y): each added direction z
// is a unit vector in a 2-plane of the current orthocomplement chosen (by
// bisection) so that |<x,z>| == |<y,z>|. Requires measure(fam, x) ==
// measure(fam, y) within tol and x != +-y.
SubspaceFamily extend_to_hyperplanes(const SubspaceFamily& fam, const Vector& x, const Vector& y,
                                     double tol = 1e-8);

}  // namespace spr
