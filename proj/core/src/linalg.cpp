#include "spr/linalg.hpp"

#include <Eigen/SVD>

#include "spr/errors.hpp"

namespace spr {

std::vector<Vector> orthonormalize(const std::vector<Vector>& vs, double tol) {
    std::vector<Vector> q;
    q.reserve(vs.size());
    for (std::size_t k = 0; k < vs.size(); ++k) {
        const Vector& v = vs[k];
        if (!q.empty() && v.size() != q.front().size()) {
            throw DomainError("orthonormalize: inconsistent dimensions");
        }
        const double scale = v.norm();
        if (scale == 0.0) throw DependencyError("orthonormalize: zero vector");
        Vector r = v;
        // Two projection passes keep the result orthogonal to working
        // precision even when the input is poorly conditioned.
        for (int pass = 0; pass < 2; ++pass) {
            for (const Vector& u : q) r -= u.dot(r) * u;
        }
        const double rem = r.norm();
        if (rem <= tol * scale) {
            throw DependencyError("orthonormalize: vector " + std::to_string(k) +
                                  " is dependent on its predecessors");
        }
        q.push_back(r / rem);
    }
    return q;
}

int numeric_rank(const Matrix& m, double tol) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv[0] : 0.0;
    if (smax == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv[i] > tol * smax) ++r;
    }
    return r;
}

Matrix null_space(const Matrix& m, double tol) {
    if (m.cols() == 0) return Matrix(0, 0);
    if (m.rows() == 0) return Matrix::Identity(m.cols(), m.cols());
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv[0] : 0.0;
    int r = 0;
    if (smax > 0.0) {
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
            if (sv[i] > tol * smax) ++r;
        }
    }
    return svd.matrixV().rightCols(m.cols() - r);
}

Vector random_unit_in_complement(const std::vector<Vector>& vs, int dim, RngState& rng) {
    if (dim <= 0) throw DomainError("random_unit_in_complement: dim must be positive");
    for (const Vector& v : vs) {
        if (v.size() != dim) throw DomainError("random_unit_in_complement: wrong vector length");
    }
    if (static_cast<int>(vs.size()) >= dim) {
        throw DomainError("random_unit_in_complement: complement is trivial");
    }
    const std::vector<Vector> q = orthonormalize(vs);  // rejects dependent spans
    for (;;) {
        Vector g = rng.gaussian_vector(dim);
        for (int pass = 0; pass < 2; ++pass) {
            for (const Vector& u : q) g -= u.dot(g) * u;
        }
        const double n = g.norm();
        if (n > 1e-8) return g / n;
    }
}

double operator_norm(const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()[0];
}

}  // namespace spr
