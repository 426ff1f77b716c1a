#pragma once

#include <vector>

#include "spr/linalg.hpp"

namespace spr {

// Subspace of R^M, stored either directly as an orthonormal basis (rows) or,
// for hyperplanes, as the single unit normal whose orthocomplement it is.
// The complement encoding keeps dimension-(M-1) subspaces exact and cheap:
// ||P x||^2 = ||x||^2 - <x, normal>^2.
class Subspace {
public:
    static Subspace direct(Matrix basis_rows, double tol = 1e-10);
    static Subspace complement(Vector unit_normal, double tol = 1e-10);

    bool complement_encoded() const { return complement_; }
    int ambient() const { return static_cast<int>(stored_.cols()); }
    // Dimension of the subspace itself (M-1 for complement encoding).
    int dim() const { return complement_ ? ambient() - 1 : static_cast<int>(stored_.rows()); }
    // Stored rows: the basis, or the single normal.
    const Matrix& stored() const { return stored_; }

    // Orthonormal basis of the subspace as rows (decodes the complement form).
    Matrix decoded_basis() const;
    // Orthogonal projector onto the subspace.
    Matrix projector() const;
    // ||P x||^2.
    double component_energy(const Vector& x) const;

private:
    Subspace(Matrix stored, bool complement) : stored_(std::move(stored)), complement_(complement) {}

    Matrix stored_;
    bool complement_;
};

class SubspaceFamily {
public:
    SubspaceFamily(int ambient, std::vector<Subspace> subspaces);

    int ambient() const { return ambient_; }
    int count() const { return static_cast<int>(subspaces_.size()); }
    const Subspace& at(int n) const;
    const std::vector<Subspace>& subspaces() const { return subspaces_; }

private:
    int ambient_;
    std::vector<Subspace> subspaces_;
};

// Complex counterparts, used by the 4M-3 construction. Only construction and
// measurement are supported over C; the certification machinery is real-only.
class ComplexSubspace {
public:
    static ComplexSubspace direct(ComplexMatrix basis_rows, double tol = 1e-10);
    static ComplexSubspace complement(ComplexVector unit_normal, double tol = 1e-10);

    bool complement_encoded() const { return complement_; }
    int ambient() const { return static_cast<int>(stored_.cols()); }
    int dim() const { return complement_ ? ambient() - 1 : static_cast<int>(stored_.rows()); }
    const ComplexMatrix& stored() const { return stored_; }
    double component_energy(const ComplexVector& x) const;

private:
    ComplexSubspace(ComplexMatrix stored, bool complement)
        : stored_(std::move(stored)), complement_(complement) {}

    ComplexMatrix stored_;
    bool complement_;
};

class ComplexSubspaceFamily {
public:
    ComplexSubspaceFamily(int ambient, std::vector<ComplexSubspace> subspaces);

    int ambient() const { return ambient_; }
    int count() const { return static_cast<int>(subspaces_.size()); }
    const ComplexSubspace& at(int n) const;
    const std::vector<ComplexSubspace>& subspaces() const { return subspaces_; }

private:
    int ambient_;
    std::vector<ComplexSubspace> subspaces_;
};

using MeasurementVector = Vector;

// Component energies ||P_n x||^2 for every subspace. Values are clamped to 0
// when rounding drives them slightly negative (within 1e-12 * ||x||^2).
MeasurementVector measure(const SubspaceFamily& fam, const Vector& x);
MeasurementVector measure(const ComplexSubspaceFamily& fam, const ComplexVector& x);

}  // namespace spr
