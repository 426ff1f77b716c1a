#include <doctest.h>

#include <cmath>
#include <vector>

#include "spr/errors.hpp"
#include "spr/linalg.hpp"
#include "spr/rng.hpp"

using spr::Matrix;
using spr::Vector;

TEST_SUITE("linalg") {

TEST_CASE("orthonormalize produces an orthonormal flag-preserving set") {
    spr::RngState rng(1);
    std::vector<Vector> vs;
    for (int i = 0; i < 4; ++i) vs.push_back(rng.gaussian_vector(6));
    const std::vector<Vector> q = spr::orthonormalize(vs);
    REQUIRE(q.size() == 4);
    for (size_t i = 0; i < q.size(); ++i) {
        CHECK(std::abs(q[i].norm() - 1.0) < 1e-12);
        for (size_t j = 0; j < i; ++j) CHECK(std::abs(q[i].dot(q[j])) < 1e-12);
    }
    // vs[k] lies in span(q[0..k]).
    for (size_t k = 0; k < vs.size(); ++k) {
        Vector r = vs[k];
        for (size_t j = 0; j <= k; ++j) r -= q[j].dot(r) * q[j];
        CHECK(r.norm() < 1e-10 * vs[k].norm());
    }
}

TEST_CASE("orthonormalize rejects dependent inputs") {
    std::vector<Vector> vs;
    vs.push_back(Vector::Unit(3, 0));
    vs.push_back(Vector::Unit(3, 1));
    vs.push_back(Vector::Unit(3, 0) + Vector::Unit(3, 1));
    CHECK_THROWS_AS(spr::orthonormalize(vs), spr::DependencyError);
}

TEST_CASE("numeric rank counts relative singular values") {
    Matrix d = Matrix::Zero(3, 3);
    d(0, 0) = 1.0;
    d(1, 1) = 1e-3;
    CHECK(spr::numeric_rank(d) == 2);
    d(1, 1) = 1e-12;  // below the relative threshold
    CHECK(spr::numeric_rank(d) == 1);
    CHECK(spr::numeric_rank(Matrix::Zero(4, 2)) == 0);

    spr::RngState rng(2);
    const Vector u = rng.gaussian_vector(5), v = rng.gaussian_vector(5);
    CHECK(spr::numeric_rank(u * v.transpose()) == 1);
}

TEST_CASE("null space is orthonormal and annihilated") {
    spr::RngState rng(3);
    Matrix m(3, 5);
    for (int i = 0; i < 3; ++i) m.row(i) = rng.gaussian_vector(5).transpose();
    const Matrix ns = spr::null_space(m);
    REQUIRE(ns.cols() == 2);
    CHECK((m * ns).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((ns.transpose() * ns - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(spr::numeric_rank(m) + ns.cols() == m.cols());
}

TEST_CASE("full-rank square matrices have empty null space") {
    CHECK(spr::null_space(Matrix::Identity(4, 4)).cols() == 0);
}

TEST_CASE("random unit complement vectors are orthogonal to the inputs") {
    spr::RngState rng(4);
    std::vector<Vector> vs = {rng.gaussian_vector(5), rng.gaussian_vector(5)};
    const Vector z = spr::random_unit_in_complement(vs, 5, rng);
    CHECK(std::abs(z.norm() - 1.0) < 1e-12);
    for (const Vector& v : vs) CHECK(std::abs(z.dot(v)) < 1e-10 * v.norm());
}

TEST_CASE("operator norm matches the top singular value") {
    Matrix d = Matrix::Zero(3, 3);
    d(0, 0) = 2.5;
    d(1, 1) = -7.0;
    CHECK(spr::operator_norm(d) == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(spr::operator_norm(Matrix::Zero(2, 2)) == 0.0);
}

}  // TEST_SUITE
