#include "spr/subspace.hpp"

#include <string>

#include "spr/errors.hpp"

namespace spr {
namespace {

constexpr double kMeasureClampTol = 1e-12;

void check_orthonormal_rows(const Matrix& rows, double tol, const char* who) {
    const Matrix gram = rows * rows.transpose();
    const double err = (gram - Matrix::Identity(rows.rows(), rows.rows())).cwiseAbs().maxCoeff();
    if (err > tol) {
        throw DomainError(std::string(who) + ": rows are not orthonormal (deviation " +
                          std::to_string(err) + ")");
    }
}

void check_unitary_rows(const ComplexMatrix& rows, double tol, const char* who) {
    const ComplexMatrix gram = rows * rows.adjoint();
    const double err =
        (gram - ComplexMatrix::Identity(rows.rows(), rows.rows())).cwiseAbs().maxCoeff();
    if (err > tol) {
        throw DomainError(std::string(who) + ": rows are not orthonormal (deviation " +
                          std::to_string(err) + ")");
    }
}

}  // namespace

Subspace Subspace::direct(Matrix basis_rows, double tol) {
    if (basis_rows.rows() < 1 || basis_rows.cols() < 1) {
        throw DomainError("Subspace::direct: empty basis");
    }
    if (basis_rows.rows() >= basis_rows.cols()) {
        throw DomainError("Subspace::direct: subspace must be proper (dim < ambient)");
    }
    check_orthonormal_rows(basis_rows, tol, "Subspace::direct");
    return Subspace(std::move(basis_rows), false);
}

Subspace Subspace::complement(Vector unit_normal, double tol) {
    if (unit_normal.size() < 2) {
        throw DomainError("Subspace::complement: ambient dimension must be at least 2");
    }
    if (std::abs(unit_normal.norm() - 1.0) > tol) {
        throw DomainError("Subspace::complement: normal must be a unit vector");
    }
    Matrix row(1, unit_normal.size());
    row.row(0) = unit_normal.transpose();
    return Subspace(std::move(row), true);
}

Matrix Subspace::decoded_basis() const {
    if (!complement_) return stored_;
    return null_space(stored_).transpose();
}

Matrix Subspace::projector() const {
    const int m = ambient();
    if (complement_) {
        return Matrix::Identity(m, m) - stored_.transpose() * stored_;
    }
    return stored_.transpose() * stored_;
}

double Subspace::component_energy(const Vector& x) const {
    if (x.size() != ambient()) throw DomainError("component_energy: wrong signal length");
    if (complement_) {
        const double ip = stored_.row(0).dot(x);
        return x.squaredNorm() - ip * ip;
    }
    return (stored_ * x).squaredNorm();
}

SubspaceFamily::SubspaceFamily(int ambient, std::vector<Subspace> subspaces)
    : ambient_(ambient), subspaces_(std::move(subspaces)) {
    if (ambient_ < 1) throw DomainError("SubspaceFamily: ambient must be positive");
    if (subspaces_.empty()) throw DomainError("SubspaceFamily: need at least one subspace");
    for (const Subspace& s : subspaces_) {
        if (s.ambient() != ambient_) {
            throw DomainError("SubspaceFamily: mixed ambient dimensions");
        }
    }
}

const Subspace& SubspaceFamily::at(int n) const {
    if (n < 0 || n >= count()) throw DomainError("SubspaceFamily::at: index out of range");
    return subspaces_[static_cast<std::size_t>(n)];
}

ComplexSubspace ComplexSubspace::direct(ComplexMatrix basis_rows, double tol) {
    if (basis_rows.rows() < 1 || basis_rows.cols() < 1) {
        throw DomainError("ComplexSubspace::direct: empty basis");
    }
    if (basis_rows.rows() >= basis_rows.cols()) {
        throw DomainError("ComplexSubspace::direct: subspace must be proper (dim < ambient)");
    }
    check_unitary_rows(basis_rows, tol, "ComplexSubspace::direct");
    return ComplexSubspace(std::move(basis_rows), false);
}

ComplexSubspace ComplexSubspace::complement(ComplexVector unit_normal, double tol) {
    if (unit_normal.size() < 2) {
        throw DomainError("ComplexSubspace::complement: ambient dimension must be at least 2");
    }
    if (std::abs(unit_normal.norm() - 1.0) > tol) {
        throw DomainError("ComplexSubspace::complement: normal must be a unit vector");
    }
    ComplexMatrix row(1, unit_normal.size());
    row.row(0) = unit_normal.transpose();
    return ComplexSubspace(std::move(row), true);
}

double ComplexSubspace::component_energy(const ComplexVector& x) const {
    if (x.size() != ambient()) throw DomainError("component_energy: wrong signal length");
    if (complement_) {
        // Eigen's dot conjugates its left operand, so this is <normal, x>
        // in the Hermitian sense; only its squared modulus is used.
        const std::complex<double> ip = stored_.row(0).dot(x);
        return x.squaredNorm() - std::norm(ip);
    }
    return (stored_.conjugate() * x).squaredNorm();
}

ComplexSubspaceFamily::ComplexSubspaceFamily(int ambient, std::vector<ComplexSubspace> subspaces)
    : ambient_(ambient), subspaces_(std::move(subspaces)) {
    if (ambient_ < 1) throw DomainError("ComplexSubspaceFamily: ambient must be positive");
    if (subspaces_.empty()) throw DomainError("ComplexSubspaceFamily: need at least one subspace");
    for (const ComplexSubspace& s : subspaces_) {
        if (s.ambient() != ambient_) {
            throw DomainError("ComplexSubspaceFamily: mixed ambient dimensions");
        }
    }
}

const ComplexSubspace& ComplexSubspaceFamily::at(int n) const {
    if (n < 0 || n >= count()) throw DomainError("ComplexSubspaceFamily::at: index out of range");
    return subspaces_[static_cast<std::size_t>(n)];
}

namespace {

double clamp_energy(double v, double scale, const char* who) {
    if (v >= 0.0) return v;
    if (v >= -kMeasureClampTol * scale) return 0.0;
    throw InconsistencyError(std::string(who) + ": component energy below the clamp window");
}

}  // namespace

MeasurementVector measure(const SubspaceFamily& fam, const Vector& x) {
    if (x.size() != fam.ambient()) throw DomainError("measure: wrong signal length");
    const double scale = std::max(x.squaredNorm(), 1e-300);
    MeasurementVector out(fam.count());
    for (int n = 0; n < fam.count(); ++n) {
        out[n] = clamp_energy(fam.at(n).component_energy(x), scale, "measure");
    }
    return out;
}

MeasurementVector measure(const ComplexSubspaceFamily& fam, const ComplexVector& x) {
    if (x.size() != fam.ambient()) throw DomainError("measure: wrong signal length");
    const double scale = std::max(x.squaredNorm(), 1e-300);
    MeasurementVector out(fam.count());
    for (int n = 0; n < fam.count(); ++n) {
        out[n] = clamp_energy(fam.at(n).component_energy(x), scale, "measure");
    }
    return out;
}

}  // namespace spr
