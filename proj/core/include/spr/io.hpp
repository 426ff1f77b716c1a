#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "spr/builder.hpp"
#include "spr/subspace.hpp"

namespace spr {

// Line-oriented plain-text formats. Every file starts with a magic header
// ("SFF 1" family, "SRF 1" recipe, "SMF 1" measurement, "SVF 1" signal,
// "SRP 1" report), '#' starts a comment, and floating-point numbers are
// written with 17 significant digits so parse(serialize(x)) == x bit for bit.
// A complement-encoded subspace stores its unit normal as its single row;
// direct subspaces store their orthonormal basis rows. Complex rows
// interleave re/im.

using AnyFamily = std::variant<SubspaceFamily, ComplexSubspaceFamily>;
using AnySignal = std::variant<Vector, ComplexVector>;

// Verification outcome written by the CLI: the mode that ran, its verdict,
// free-form notes, and whatever evidence the run produced.
struct Report {
    std::string mode;     // certificate | witness | empirical
    std::string verdict;  // certified | not-certified | refuted | no-witness | pass
    std::vector<std::string> notes;
    std::optional<Matrix> witness_matrix;
    std::optional<std::pair<Vector, Vector>> witness_pair;
    std::optional<Vector> residuals;
};

void write_family(std::ostream& out, const AnyFamily& fam);
AnyFamily read_family(std::istream& in);

void write_recipe(std::ostream& out, const Recipe& recipe);
Recipe read_recipe(std::istream& in);

void write_measurement(std::ostream& out, const MeasurementVector& meas);
MeasurementVector read_measurement(std::istream& in);

void write_signal(std::ostream& out, const AnySignal& signal);
AnySignal read_signal(std::istream& in);

void write_report(std::ostream& out, const Report& report);
Report read_report(std::istream& in);

// Path convenience wrappers; they throw ResourceError when the file cannot
// be opened and DomainError (with a line number) on parse failures.
void save_family(const std::string& path, const AnyFamily& fam);
AnyFamily load_family(const std::string& path);
void save_recipe(const std::string& path, const Recipe& recipe);
Recipe load_recipe(const std::string& path);
void save_measurement(const std::string& path, const MeasurementVector& meas);
MeasurementVector load_measurement(const std::string& path);
void save_signal(const std::string& path, const AnySignal& signal);
AnySignal load_signal(const std::string& path);
void save_report(const std::string& path, const Report& report);
Report load_report(const std::string& path);

}  // namespace spr
