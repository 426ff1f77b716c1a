#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "spr/builder.hpp"
#include "spr/errors.hpp"
#include "spr/frame.hpp"
#include "spr/linalg.hpp"
#include "spr/rng.hpp"
#include "spr/subspace.hpp"
#include "spr/verifier.hpp"

using spr::Matrix;
using spr::Vector;

namespace {

spr::Subspace random_subspace(int ambient, int dim, spr::RngState& rng, bool encode_hyperplane) {
    if (encode_hyperplane && dim == ambient - 1) {
        return spr::Subspace::complement(rng.unit_vector(ambient));
    }
    std::vector<Vector> vs;
    for (int i = 0; i < dim; ++i) vs.push_back(rng.gaussian_vector(ambient));
    const std::vector<Vector> q = spr::orthonormalize(vs);
    Matrix rows(dim, ambient);
    for (int i = 0; i < dim; ++i) rows.row(i) = q[static_cast<size_t>(i)].transpose();
    return spr::Subspace::direct(rows);
}

spr::SubspaceFamily random_family(int ambient, const std::vector<int>& dims, spr::RngState& rng) {
    std::vector<spr::Subspace> subs;
    int n = 0;
    for (int d : dims) subs.push_back(random_subspace(ambient, d, rng, (n++ % 2) == 0));
    return spr::SubspaceFamily(ambient, std::move(subs));
}

}  // namespace

TEST_SUITE("verifier") {

TEST_CASE("symmetric lift is an isometry with exact inverse") {
    spr::RngState rng(51);
    for (int t = 0; t < 10; ++t) {
        Matrix a = Matrix::NullaryExpr(4, 4, [&](Eigen::Index, Eigen::Index) {
            return rng.next_gaussian();
        });
        a = ((a + a.transpose()) / 2.0).eval();
        Matrix b = Matrix::NullaryExpr(4, 4, [&](Eigen::Index, Eigen::Index) {
            return rng.next_gaussian();
        });
        b = ((b + b.transpose()) / 2.0).eval();

        const Vector va = spr::sym_lift(a);
        REQUIRE(va.size() == spr::sym_dim(4));
        CHECK((spr::sym_unlift(va, 4) - a).cwiseAbs().maxCoeff() < 1e-14);
        const double frob = (a.transpose() * b).trace();
        CHECK(va.dot(spr::sym_lift(b)) == doctest::Approx(frob).epsilon(1e-12));
    }
}

TEST_CASE("lift operator rows reproduce the measurement map") {
    spr::RngState rng(52);
    const spr::SubspaceFamily fam = random_family(4, {1, 3, 2, 2, 1}, rng);
    const spr::LiftOperator op = spr::lift_operator(fam);
    REQUIRE(op.rows.rows() == fam.count());
    REQUIRE(op.rows.cols() == spr::sym_dim(4));
    for (int t = 0; t < 20; ++t) {
        const Vector x = rng.gaussian_vector(4);
        const Vector via_lift = op.rows * spr::sym_lift(x * x.transpose());
        const spr::MeasurementVector meas = spr::measure(fam, x);
        CHECK((via_lift - meas).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, x.squaredNorm()));
    }
}

TEST_CASE("structured certificates accept the construction") {
    spr::RngState rng(53);
    const spr::BuiltFamily built = spr::build_real_family(4, {2, 1, 3, 2, 1, 3, 2}, rng);
    const spr::Certificate cert = spr::certify_structured(built.recipe);
    CHECK(cert.certified);
    CHECK(!cert.detail.empty());
}

TEST_CASE("structured certificates reject a singular design") {
    spr::RngState rng(54);
    spr::BuiltFamily built = spr::build_real_family(4, {2, 2, 2, 2, 1, 1, 1}, rng);
    // Singular 0/1 matrix with the same row sums: rows 0+1 equal rows 2+3.
    spr::IntMatrix sing(4, 4);
    sing << 1, 1, 0, 0,
            0, 0, 1, 1,
            1, 0, 1, 0,
            0, 1, 0, 1;
    spr::Recipe tampered = built.recipe;
    tampered.design_a = spr::ZeroOneDesign::from_matrix(sing);
    const spr::Certificate cert = spr::certify_structured(tampered);
    CHECK_FALSE(cert.certified);
    CHECK(cert.detail.find("singular") != std::string::npos);
}

TEST_CASE("structured certificates reject a base frame without the complement property") {
    // Second orthonormal block repeats directions of the first, so the base
    // frame omits e4 from one side split.
    Matrix rows(7, 4);
    rows.setZero();
    for (int i = 0; i < 4; ++i) rows(i, i) = 1.0;
    for (int k = 0; k < 3; ++k) rows(4 + k, k) = 1.0;
    const spr::Frame base(rows, {{0, 4}, {4, 3}});

    spr::Recipe recipe{base, spr::zero_one_invertible({1, 1, 1, 1}),
                       spr::zero_one_invertible({1, 1, 1}), {false, false, false},
                       {1, 1, 1, 1, 1, 1, 1}};
    const spr::Certificate cert = spr::certify_structured(recipe);
    CHECK_FALSE(cert.certified);
    CHECK(cert.detail.find("complement") != std::string::npos);
}

TEST_CASE("witness search refutes underdetermined R^3 families") {
    spr::RngState rng(55);
    for (int trial = 0; trial < 5; ++trial) {
        spr::RngState sub = rng.fork(trial);
        const spr::SubspaceFamily fam = random_family(3, {2, 1, 2, 1}, sub);
        const spr::LiftOperator op = spr::lift_operator(fam);
        const auto witness = spr::rank12_witness_search(fam, sub, 16);
        REQUIRE(witness.has_value());
        CHECK(witness->rank <= 2);
        CHECK(witness->rank >= 1);
        const double f_norm = spr::operator_norm(op.rows);
        CHECK((op.rows * spr::sym_lift(witness->c)).norm() <= 1e-10 * f_norm);
        CHECK(spr::numeric_rank(witness->c, 1e-6) <= 2);

        const auto [u, v] = spr::witness_to_pair(*witness);
        CHECK(std::abs(u.dot(v)) < 1e-8 * u.norm() * v.norm());
        const spr::MeasurementVector mu = spr::measure(fam, u);
        const spr::MeasurementVector mv = spr::measure(fam, v);
        CHECK((mu - mv).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("witness search comes back empty on a certified family") {
    spr::RngState rng(56);
    const spr::BuiltFamily built = spr::build_real_family(3, {1, 2, 2, 1, 1}, rng);
    CHECK_FALSE(spr::rank12_witness_search(built.family, rng, 8).has_value());
}

TEST_CASE("pair conversion rejects definite witnesses") {
    spr::WitnessMatrix w;
    w.rank = 2;
    w.u = Vector::Unit(3, 0);
    w.v = Vector::Unit(3, 1);
    w.lam1 = 2.0;
    w.lam2 = 1.0;  // same sign: no equal-measurement pair exists
    w.c = 2.0 * w.u * w.u.transpose() + w.v * w.v.transpose();
    CHECK_THROWS_AS(spr::witness_to_pair(w), spr::DomainError);
}

TEST_CASE("orthogonal pair search finds the collapse of the counterexample complements") {
    const spr::R3Counterexample rc = spr::r3_counterexample_family();
    spr::RngState rng(57);
    const auto pair = spr::orthogonal_pair_search(rc.complements, rng, 50);
    REQUIRE(pair.has_value());
    const auto& [u, v] = *pair;
    CHECK(std::abs(u.dot(v)) < 1e-7);
    CHECK(u.norm() > 1e-6);
    CHECK(v.norm() > 1e-6);
    const spr::MeasurementVector mu = spr::measure(rc.complements, u);
    const spr::MeasurementVector mv = spr::measure(rc.complements, v);
    CHECK((mu - mv).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("orthogonal pair search stays empty on a certified family") {
    spr::RngState rng(58);
    const spr::BuiltFamily built = spr::build_real_family(3, {2, 1, 1, 2, 1}, rng);
    CHECK_FALSE(spr::orthogonal_pair_search(built.family, rng, 10).has_value());
}

TEST_CASE("adapted bases align moduli for norm-matched pairs") {
    spr::RngState rng(59);
    for (int trial = 0; trial < 20; ++trial) {
        spr::RngState sub = rng.fork(trial);
        const int m = 3 + static_cast<int>(sub.next_double() * 3);       // 3..5
        const int d = 1 + static_cast<int>(sub.next_double() * (m - 1)); // 1..m-1
        const spr::Subspace w = random_subspace(m, d, sub, trial % 2 == 0);
        const Vector x = sub.gaussian_vector(m);
        Vector y = sub.gaussian_vector(m);
        const double nx = std::sqrt(w.component_energy(x));
        const double ny = std::sqrt(w.component_energy(y));
        if (ny < 1e-9) continue;
        y *= nx / ny;

        const Matrix basis = spr::adapted_basis(w, x, y);
        REQUIRE(basis.rows() == d);
        CHECK((basis * basis.transpose() - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <
              1e-10);
        const Matrix p = w.projector();
        for (int i = 0; i < d; ++i) {
            const Vector row = basis.row(i).transpose();
            CHECK((p * row - row).norm() < 1e-9);
            CHECK(std::abs(std::abs(row.dot(x)) - std::abs(row.dot(y))) < 1e-10);
        }
    }
}

TEST_CASE("adapted bases require matching norms") {
    spr::RngState rng(60);
    const spr::Subspace w = random_subspace(4, 2, rng, false);
    const Vector x = rng.gaussian_vector(4);
    const Vector y = 3.0 * rng.gaussian_vector(4);
    CHECK_THROWS_AS(spr::adapted_basis(w, x, y), spr::DomainError);
}

TEST_CASE("stability margin separates certified families from collapsed ones") {
    spr::RngState rng(61);
    const spr::BuiltFamily built = spr::build_real_family(3, {1, 2, 1, 1, 2}, rng);
    const double margin = spr::stability_margin(built.family, rng, 32);
    CHECK(margin > 0.0);
    CHECK(std::isfinite(margin));

    const spr::R3Counterexample rc = spr::r3_counterexample_family();
    const double collapsed = spr::stability_margin(rc.complements, rng, 32);
    CHECK(collapsed < 1e-6);
    CHECK(collapsed < margin);
}

TEST_CASE("perturbations stay within the requested operator distance") {
    spr::RngState rng(62);
    const spr::BuiltFamily built = spr::build_real_family(4, {1, 2, 3, 1, 2, 3, 1}, rng);
    const double eps = 1e-3;
    const spr::SubspaceFamily moved = spr::perturb_family(built.family, eps, rng);
    REQUIRE(moved.count() == built.family.count());
    for (int n = 0; n < moved.count(); ++n) {
        CHECK(moved.at(n).dim() == built.family.at(n).dim());
        const Matrix q = moved.at(n).projector();
        CHECK((q - q.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((q * q - q).cwiseAbs().maxCoeff() < 1e-11);
        CHECK(spr::operator_norm(q - built.family.at(n).projector()) < eps);
    }
}

TEST_CASE("random basis pooling confirms certified families and exposes trivial gaps") {
    spr::RngState rng(63);
    const spr::BuiltFamily built = spr::build_real_family(3, {1, 1, 1, 1, 1}, rng);
    CHECK(spr::random_basis_complement_check(built.family, rng, 8));

    // Two orthogonal lines in R^2 cannot distinguish e1 + e2 from e1 - e2.
    Matrix r1(1, 2), r2(1, 2);
    r1 << 1.0, 0.0;
    r2 << 0.0, 1.0;
    const spr::SubspaceFamily axes(
        2, {spr::Subspace::direct(r1), spr::Subspace::direct(r2)});
    CHECK_FALSE(spr::random_basis_complement_check(axes, rng, 4));
}

TEST_CASE("random basis pooling enforces the enumeration cap") {
    spr::RngState rng(64);
    std::vector<spr::Subspace> subs;
    for (int i = 0; i < 9; ++i) subs.push_back(random_subspace(4, 3, rng, false));
    const spr::SubspaceFamily fam(4, subs);
    CHECK_THROWS_AS(spr::random_basis_complement_check(fam, rng, 1), spr::ResourceError);
}

}  // TEST_SUITE
