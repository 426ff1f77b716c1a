#include <doctest.h>

#include <complex>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "spr/builder.hpp"
#include "spr/errors.hpp"
#include "spr/io.hpp"
#include "spr/rng.hpp"
#include "spr/subspace.hpp"

using spr::Matrix;
using spr::Vector;

namespace {

template <typename Writer, typename Reader>
auto roundtrip(Writer write, Reader read) {
    std::stringstream s;
    write(s);
    return read(s);
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("real families round-trip bit for bit") {
    const spr::R3Counterexample rc = spr::r3_counterexample_family();
    for (const spr::SubspaceFamily* fam : {&rc.family, &rc.complements}) {
        std::stringstream s;
        spr::write_family(s, *fam);
        const spr::AnyFamily back = spr::read_family(s);
        REQUIRE(std::holds_alternative<spr::SubspaceFamily>(back));
        const spr::SubspaceFamily& got = std::get<spr::SubspaceFamily>(back);
        REQUIRE(got.count() == fam->count());
        CHECK(got.ambient() == fam->ambient());
        for (int n = 0; n < got.count(); ++n) {
            CHECK(got.at(n).complement_encoded() == fam->at(n).complement_encoded());
            CHECK(got.at(n).dim() == fam->at(n).dim());
            CHECK((got.at(n).stored() - fam->at(n).stored()).cwiseAbs().maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("complex families round-trip bit for bit") {
    spr::RngState rng(81);
    const spr::ComplexSubspaceFamily fam =
        spr::build_complex_family(3, {1, 2, 1, 2, 1, 2, 1, 2, 1}, rng);
    std::stringstream s;
    spr::write_family(s, fam);
    const spr::AnyFamily back = spr::read_family(s);
    REQUIRE(std::holds_alternative<spr::ComplexSubspaceFamily>(back));
    const spr::ComplexSubspaceFamily& got = std::get<spr::ComplexSubspaceFamily>(back);
    REQUIRE(got.count() == fam.count());
    for (int n = 0; n < got.count(); ++n) {
        CHECK(got.at(n).complement_encoded() == fam.at(n).complement_encoded());
        CHECK((got.at(n).stored() - fam.at(n).stored()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("recipes round-trip with designs and flags intact") {
    spr::RngState rng(82);
    const spr::BuiltFamily built = spr::build_real_family(4, {3, 2, 1, 2, 3, 1, 2}, rng);
    std::stringstream s;
    spr::write_recipe(s, built.recipe);
    const spr::Recipe back = spr::read_recipe(s);
    CHECK((back.base.vectors() - built.recipe.base.vectors()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.base.ortho_blocks() == built.recipe.base.ortho_blocks());
    CHECK((back.design_a.matrix() - built.recipe.design_a.matrix()).cwiseAbs().maxCoeff() == 0);
    CHECK((back.design_b.matrix() - built.recipe.design_b.matrix()).cwiseAbs().maxCoeff() == 0);
    CHECK(back.complement_rows == built.recipe.complement_rows);
    CHECK(back.dims == built.recipe.dims);
}

TEST_CASE("measurements and signals round-trip") {
    spr::RngState rng(83);
    const spr::MeasurementVector meas = rng.gaussian_vector(7).cwiseAbs();
    std::stringstream s1;
    spr::write_measurement(s1, meas);
    CHECK((spr::read_measurement(s1) - meas).cwiseAbs().maxCoeff() == 0.0);

    const Vector x = rng.gaussian_vector(4);
    std::stringstream s2;
    spr::write_signal(s2, x);
    const spr::AnySignal back = spr::read_signal(s2);
    REQUIRE(std::holds_alternative<Vector>(back));
    CHECK((std::get<Vector>(back) - x).cwiseAbs().maxCoeff() == 0.0);

    spr::ComplexVector z(3);
    z << std::complex<double>(1.5, -2.25), std::complex<double>(0, 1),
        std::complex<double>(-3, 0.125);
    std::stringstream s3;
    spr::write_signal(s3, z);
    const spr::AnySignal zback = spr::read_signal(s3);
    REQUIRE(std::holds_alternative<spr::ComplexVector>(zback));
    CHECK((std::get<spr::ComplexVector>(zback) - z).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("reports round-trip every section") {
    spr::Report report;
    report.mode = "witness";
    report.verdict = "refuted";
    report.notes = {"first note", "second note with spaces"};
    Matrix c(2, 2);
    c << 0.5, -1.25, -1.25, 3.0;
    report.witness_matrix = c;
    Vector u(2), v(2);
    u << 1.0, 0.0;
    v << 0.0, -2.0;
    report.witness_pair = {u, v};
    Vector res(2);
    res << 1e-16, 2e8;
    report.residuals = res;

    std::stringstream s;
    spr::write_report(s, report);
    const spr::Report back = spr::read_report(s);
    CHECK(back.mode == report.mode);
    CHECK(back.verdict == report.verdict);
    CHECK(back.notes == report.notes);
    REQUIRE(back.witness_matrix.has_value());
    CHECK((*back.witness_matrix - c).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(back.witness_pair.has_value());
    CHECK((back.witness_pair->first - u).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.witness_pair->second - v).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(back.residuals.has_value());
    CHECK((*back.residuals - res).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("comments and blank lines are ignored") {
    std::stringstream s;
    s << "# a comment\n"
      << "SVF 1\n"
      << "\n"
      << "field real  # trailing comment\n"
      << "ambient 3\n"
      << "1 2.5 -3\n";
    const spr::AnySignal sig = spr::read_signal(s);
    REQUIRE(std::holds_alternative<Vector>(sig));
    const Vector& x = std::get<Vector>(sig);
    CHECK(x[0] == 1.0);
    CHECK(x[1] == 2.5);
    CHECK(x[2] == -3.0);
}

TEST_CASE("parse failures carry a line number") {
    std::stringstream s;
    s << "SMF 1\ncount 2\n1.5\nnot_a_number\n";
    try {
        spr::read_measurement(s);
        FAIL("expected a parse error");
    } catch (const spr::DomainError& e) {
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }

    std::stringstream bad_magic;
    bad_magic << "XXX 1\ncount 1\n1\n";
    CHECK_THROWS_AS(spr::read_measurement(bad_magic), spr::DomainError);

    std::stringstream truncated;
    truncated << "SMF 1\ncount 3\n1\n2\n";
    CHECK_THROWS_AS(spr::read_measurement(truncated), spr::DomainError);
}

TEST_CASE("unknown report sections are rejected") {
    std::stringstream s;
    s << "SRP 1\nmode witness\nverdict refuted\nmystery 3\n";
    CHECK_THROWS_AS(spr::read_report(s), spr::DomainError);
}

TEST_CASE("path helpers flag missing files") {
    CHECK_THROWS_AS(spr::load_family("/nonexistent/path/fam.sff"), spr::ResourceError);
}

TEST_CASE("recipe files are cross-validated on load") {
    spr::RngState rng(84);
    const spr::BuiltFamily built = spr::build_real_family(3, {1, 2, 2, 1, 1}, rng);
    std::stringstream s;
    spr::write_recipe(s, built.recipe);
    std::string text = s.str();
    // Corrupt one dimension so the designs no longer match.
    const std::string needle = "dims";
    const size_t pos = text.find(needle);
    REQUIRE(pos != std::string::npos);
    text[text.find_first_of("12", pos)] = '3';
    std::stringstream corrupted(text);
    CHECK_THROWS_AS(spr::read_recipe(corrupted), spr::DomainError);
}

}  // TEST_SUITE
