#pragma once

#include "spr/builder.hpp"
#include "spr/subspace.hpp"

namespace spr {

// Recovered signal together with the worst re-measurement mismatch, relative
// to the recovered energy. The global sign is canonical: the first
// coordinate of magnitude above 1e-9 * ||signal|| is nonnegative, so a signal
// and its negation reconstruct to the identical vector.
struct ReconstructionResult {
    Vector signal;
    double residual = 0.0;
};

// Inverts the structured measurement pipeline: solves the A-system exactly
// over the integers for the leading squared moduli, recovers ||x||^2 as their
// sum, converts complement-encoded entries via ||P x||^2 = ||x||^2 - <x,f>^2,
// solves the B-system, and finishes with sign recovery over the base frame.
// Requires an invertible-design recipe (certified structured in practice).
ReconstructionResult reconstruct(const Recipe& recipe, const MeasurementVector& meas,
                                 double tol = 1e-6);

// Hyperplane counterpart: ||x||^2 = sum_n (a_n/b) meas[n] with
// b = sum a_n - 1, squared moduli ||x||^2 - meas[n] against the unit normals,
// signs recovered by exhaustive enumeration over a greedily selected
// best-conditioned M-subset of the normals.
ReconstructionResult reconstruct_hyperplanes(const HyperplaneFamily& hf,
                                             const MeasurementVector& meas, double tol = 1e-6);

}  // namespace spr
