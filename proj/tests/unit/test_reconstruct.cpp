#include <doctest.h>

#include <cmath>
#include <vector>

#include "spr/builder.hpp"
#include "spr/errors.hpp"
#include "spr/reconstruct.hpp"
#include "spr/rng.hpp"
#include "spr/subspace.hpp"

using spr::Vector;

namespace {

double sign_invariant_error(const Vector& got, const Vector& want) {
    return std::min((got - want).norm(), (got + want).norm()) / std::max(want.norm(), 1e-300);
}

}  // namespace

TEST_SUITE("reconstruct") {

TEST_CASE("structured round trip recovers signals up to sign") {
    spr::RngState rng(71);
    for (int m = 2; m <= 5; ++m) {
        spr::RngState sub = rng.fork(static_cast<std::uint64_t>(m));
        std::vector<int> dims(static_cast<size_t>(2 * m - 1));
        for (size_t i = 0; i < dims.size(); ++i) {
            dims[i] = 1 + static_cast<int>(sub.next_double() * (m - 1));
        }
        dims[0] = m - 1;  // exercise the complement trick
        const spr::BuiltFamily built = spr::build_real_family(m, dims, sub);
        for (int t = 0; t < 20; ++t) {
            const Vector x = sub.gaussian_vector(m);
            const spr::MeasurementVector meas = spr::measure(built.family, x);
            const spr::ReconstructionResult rec = spr::reconstruct(built.recipe, meas);
            CAPTURE(m);
            CHECK(sign_invariant_error(rec.signal, x) < 1e-9);
            CHECK(rec.residual < 1e-9);
        }
    }
}

TEST_CASE("the recovered sign is canonical") {
    spr::RngState rng(72);
    const spr::BuiltFamily built = spr::build_real_family(4, {1, 2, 3, 1, 2, 3, 1}, rng);
    const Vector x = rng.gaussian_vector(4);
    const Vector a = spr::reconstruct(built.recipe, spr::measure(built.family, x)).signal;
    const Vector b = spr::reconstruct(built.recipe, spr::measure(built.family, -x)).signal;
    CHECK((a - b).norm() == 0.0);
}

TEST_CASE("the zero signal round-trips") {
    spr::RngState rng(73);
    const spr::BuiltFamily built = spr::build_real_family(3, {1, 2, 2, 1, 1}, rng);
    const spr::ReconstructionResult rec =
        spr::reconstruct(built.recipe, spr::MeasurementVector::Zero(5));
    CHECK(rec.signal.norm() == 0.0);
    CHECK(rec.residual == 0.0);
}

TEST_CASE("corrupt structured measurements are flagged") {
    spr::RngState rng(74);
    const spr::BuiltFamily built = spr::build_real_family(3, {2, 1, 1, 2, 1}, rng);
    const Vector x = rng.gaussian_vector(3);
    spr::MeasurementVector meas = spr::measure(built.family, x);

    spr::MeasurementVector wrong_size = meas.head(4);
    CHECK_THROWS_AS(spr::reconstruct(built.recipe, wrong_size), spr::DomainError);

    spr::MeasurementVector corrupted = meas;
    corrupted[1] += 0.6 * meas.maxCoeff();
    CHECK_THROWS_AS(spr::reconstruct(built.recipe, corrupted), spr::InconsistencyError);

    spr::MeasurementVector negative = meas;
    negative[0] = -0.5 * meas.maxCoeff();
    CHECK_THROWS_AS(spr::reconstruct(built.recipe, negative), spr::InconsistencyError);
}

TEST_CASE("hyperplane round trip over the pentagon frame") {
    const spr::HyperplaneFamily hf = spr::hyperplanes_from_frame(spr::r3_parseval_example());
    spr::RngState rng(75);
    for (int t = 0; t < 20; ++t) {
        const Vector x = rng.gaussian_vector(3);
        const spr::MeasurementVector meas = spr::measure(hf.family, x);
        const spr::ReconstructionResult rec = spr::reconstruct_hyperplanes(hf, meas);
        CHECK(sign_invariant_error(rec.signal, x) < 1e-9);
        CHECK(rec.residual < 1e-9);
    }
}

TEST_CASE("hyperplane round trip over seeded families") {
    spr::RngState rng(76);
    const spr::HyperplaneFamily hf = spr::build_hyperplane_family(4, 7, rng);
    for (int t = 0; t < 20; ++t) {
        const Vector x = rng.gaussian_vector(4);
        const spr::MeasurementVector meas = spr::measure(hf.family, x);
        CHECK(sign_invariant_error(spr::reconstruct_hyperplanes(hf, meas).signal, x) < 1e-9);
    }
}

TEST_CASE("scaling all hyperplane measurements rescales the signal") {
    // Componentwise scaling by t > 0 is *consistent*: it is the measurement
    // vector of sqrt(t) x, so no inconsistency can be detected.
    const spr::HyperplaneFamily hf = spr::hyperplanes_from_frame(spr::r3_parseval_example());
    spr::RngState rng(77);
    const Vector x = rng.gaussian_vector(3);
    const spr::MeasurementVector meas = spr::measure(hf.family, x);
    const Vector rec = spr::reconstruct_hyperplanes(hf, 2.0 * meas).signal;
    CHECK(sign_invariant_error(rec, std::sqrt(2.0) * x) < 1e-9);
}

TEST_CASE("corrupt hyperplane measurements are flagged") {
    const spr::HyperplaneFamily hf = spr::hyperplanes_from_frame(spr::r3_parseval_example());
    spr::RngState rng(78);
    const Vector x = rng.gaussian_vector(3);
    spr::MeasurementVector meas = spr::measure(hf.family, x);
    meas[2] += 0.7 * meas.maxCoeff();
    CHECK_THROWS_AS(spr::reconstruct_hyperplanes(hf, meas), spr::InconsistencyError);
}

TEST_CASE("hyperplane zero signal round-trips") {
    const spr::HyperplaneFamily hf = spr::hyperplanes_from_frame(spr::r3_parseval_example());
    const spr::ReconstructionResult rec =
        spr::reconstruct_hyperplanes(hf, spr::MeasurementVector::Zero(5));
    CHECK(rec.signal.norm() == 0.0);
}

}  // TEST_SUITE
