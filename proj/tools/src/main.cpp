// spr: construct, verify, measure, and reconstruct subspace families whose
// projection-norm measurements determine signals up to global sign.
//
// Exit codes: 0 success/certified/no witness, 1 usage or domain error,
// 2 refuted (witness found), 3 inconclusive, 4 inconsistent data.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spr/builder.hpp"
#include "spr/errors.hpp"
#include "spr/frame.hpp"
#include "spr/io.hpp"
#include "spr/reconstruct.hpp"
#include "spr/verifier.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRefuted = 2;
constexpr int kExitInconclusive = 3;
constexpr int kExitInconsistent = 4;

struct ConstructOpts {
    int ambient = 0;
    std::vector<int> dims;
    std::uint64_t seed = 0;
    std::string out_family;
    std::string out_recipe;
};

struct HyperplaneOpts {
    int ambient = 0;
    int count = 0;
    std::uint64_t seed = 0;
    std::string out_family;
};

struct VerifyOpts {
    std::string family;
    std::string recipe;
    std::string mode;
    std::uint64_t seed = 0;
    std::string report;
    int trials = 100;
    int restarts = 50;
};

struct MeasureOpts {
    std::string family;
    std::string signal_in;
    std::string out;
};

struct ReconstructOpts {
    std::string recipe;
    std::string family;
    std::string meas;
    std::string out;
};

struct DemoOpts {
    std::string name;
    std::string out_dir = ".";
};

int run_construct(const ConstructOpts& o) {
    spr::RngState rng(o.seed);
    const spr::BuiltFamily built = spr::build_real_family(o.ambient, o.dims, rng);
    const spr::Certificate cert = spr::certify_structured(built.recipe);
    if (!o.out_family.empty()) spr::save_family(o.out_family, built.family);
    if (!o.out_recipe.empty()) spr::save_recipe(o.out_recipe, built.recipe);
    std::cout << (cert.certified ? "certified" : "not certified") << ": " << cert.detail << "\n";
    if (cert.borderline) std::cout << "warning: borderline span decisions\n";
    return cert.certified ? kExitOk : kExitInconclusive;
}

int run_construct_complex(const ConstructOpts& o) {
    spr::RngState rng(o.seed);
    const spr::ComplexSubspaceFamily fam = spr::build_complex_family(o.ambient, o.dims, rng);
    if (!o.out_family.empty()) spr::save_family(o.out_family, fam);
    std::cout << "built " << fam.count() << " complex subspaces in dimension " << fam.ambient()
              << " (no injectivity certificate; use verify --mode empirical)\n";
    return kExitOk;
}

int run_construct_hyperplanes(const HyperplaneOpts& o) {
    spr::RngState rng(o.seed);
    const spr::HyperplaneFamily hf = spr::build_hyperplane_family(o.ambient, o.count, rng);
    if (!o.out_family.empty()) spr::save_family(o.out_family, hf.family);
    std::cout << "built " << o.count << " hyperplanes in dimension " << o.ambient
              << "; tight weights sum to " << hf.weights.sum() << "\n";
    return kExitOk;
}

const spr::SubspaceFamily& require_real(const spr::AnyFamily& fam, const char* what) {
    if (!std::holds_alternative<spr::SubspaceFamily>(fam)) {
        throw spr::DomainError(std::string(what) + " requires a real family");
    }
    return std::get<spr::SubspaceFamily>(fam);
}

// Monte-Carlo distinguishability for complex families: seeded random pairs
// must yield measurably different measurement vectors.
bool complex_distinguishable(const spr::ComplexSubspaceFamily& fam, spr::RngState& rng,
                             int trials, double* min_gap) {
    *min_gap = std::numeric_limits<double>::infinity();
    const int m = fam.ambient();
    for (int t = 0; t < trials; ++t) {
        spr::RngState sub = rng.fork(t);
        spr::ComplexVector x(m), y(m);
        for (int i = 0; i < m; ++i) {
            x[i] = std::complex<double>(sub.next_gaussian(), sub.next_gaussian());
            y[i] = std::complex<double>(sub.next_gaussian(), sub.next_gaussian());
        }
        // Skip (almost surely absent) phase-equivalent draws.
        if (std::abs(std::abs(x.dot(y)) - x.norm() * y.norm()) < 1e-12 * x.norm() * y.norm()) {
            continue;
        }
        const spr::MeasurementVector mx = spr::measure(fam, x);
        const spr::MeasurementVector my = spr::measure(fam, y);
        const double gap = (mx - my).cwiseAbs().maxCoeff();
        *min_gap = std::min(*min_gap, gap);
        if (gap <= 1e-6) return false;
    }
    return true;
}

int run_verify(const VerifyOpts& o) {
    const spr::AnyFamily fam = spr::load_family(o.family);
    std::string mode = o.mode;
    if (mode.empty()) mode = o.recipe.empty() ? "witness" : "certificate";

    spr::Report report;
    report.mode = mode;
    int exit_code = kExitOk;

    if (mode == "certificate") {
        if (o.recipe.empty()) {
            throw spr::DomainError("verify --mode certificate requires --recipe");
        }
        const spr::Recipe recipe = spr::load_recipe(o.recipe);
        const spr::Certificate cert = spr::certify_structured(recipe);
        report.verdict = cert.certified ? "certified" : "not-certified";
        report.notes.push_back(cert.detail);
        if (cert.borderline) report.notes.push_back("borderline span decisions");
        exit_code = cert.certified ? kExitOk : kExitInconclusive;
    } else if (mode == "witness") {
        const spr::SubspaceFamily& real = require_real(fam, "witness search");
        spr::RngState rng(o.seed);
        const auto witness = spr::rank12_witness_search(real, rng, o.restarts);
        if (witness) {
            report.verdict = "refuted";
            report.witness_matrix = witness->c;
            report.notes.push_back("rank " + std::to_string(witness->rank) +
                                   " element of the measurement null space, strategy " +
                                   witness->strategy);
            spr::Vector res(2);
            res << witness->residual, witness->rank_gap;
            report.residuals = res;
            try {
                report.witness_pair = spr::witness_to_pair(*witness);
            } catch (const spr::DomainError& e) {
                report.notes.push_back(e.what());
            }
            exit_code = kExitRefuted;
        } else {
            spr::RngState rng2(o.seed + 1);
            const auto pair = spr::orthogonal_pair_search(real, rng2, o.restarts);
            if (pair) {
                report.verdict = "refuted";
                report.witness_pair = pair;
                report.notes.push_back("orthogonal pair with equal measurements");
                exit_code = kExitRefuted;
            } else {
                report.verdict = "no-witness";
                report.notes.push_back(
                    "no rank <= 2 null element or equal-measurement pair found; evidence "
                    "of injectivity, not a certificate");
                exit_code = kExitOk;
            }
        }
    } else if (mode == "empirical") {
        spr::RngState rng(o.seed);
        if (std::holds_alternative<spr::SubspaceFamily>(fam)) {
            const bool ok = spr::random_basis_complement_check(
                std::get<spr::SubspaceFamily>(fam), rng, o.trials);
            report.verdict = ok ? "pass" : "refuted";
            report.notes.push_back(ok ? "all sampled orthonormal bases pooled to frames with "
                                        "the complement property"
                                      : "a sampled basis pool violates the complement "
                                        "property; the family is not injective");
            exit_code = ok ? kExitOk : kExitRefuted;
        } else {
            double min_gap = 0.0;
            const bool ok = complex_distinguishable(std::get<spr::ComplexSubspaceFamily>(fam),
                                                    rng, o.trials, &min_gap);
            report.verdict = ok ? "pass" : "refuted";
            spr::Vector res(1);
            res << min_gap;
            report.residuals = res;
            report.notes.push_back(
                ok ? "all sampled signal pairs are distinguished (empirical evidence only)"
                   : "two sampled signals share measurements within 1e-6");
            exit_code = ok ? kExitOk : kExitRefuted;
        }
    } else {
        throw spr::DomainError("unknown mode '" + mode +
                               "' (expected certificate, witness, or empirical)");
    }

    if (!o.report.empty()) spr::save_report(o.report, report);
    std::cout << "verify mode " << mode << ": " << report.verdict << "\n";
    for (const std::string& note : report.notes) std::cout << "  " << note << "\n";
    return exit_code;
}

int run_measure(const MeasureOpts& o) {
    const spr::AnyFamily fam = spr::load_family(o.family);
    const spr::AnySignal sig = spr::load_signal(o.signal_in);
    spr::MeasurementVector meas;
    if (std::holds_alternative<spr::SubspaceFamily>(fam)) {
        if (!std::holds_alternative<spr::Vector>(sig)) {
            throw spr::DomainError("real family requires a real signal");
        }
        meas = spr::measure(std::get<spr::SubspaceFamily>(fam), std::get<spr::Vector>(sig));
    } else {
        if (!std::holds_alternative<spr::ComplexVector>(sig)) {
            throw spr::DomainError("complex family requires a complex signal");
        }
        meas = spr::measure(std::get<spr::ComplexSubspaceFamily>(fam),
                            std::get<spr::ComplexVector>(sig));
    }
    spr::save_measurement(o.out, meas);
    std::cout << "wrote " << meas.size() << " measurements to " << o.out << "\n";
    return kExitOk;
}

int run_reconstruct(const ReconstructOpts& o) {
    if (o.recipe.empty() == o.family.empty()) {
        throw spr::DomainError("reconstruct needs exactly one of --recipe or --family");
    }
    const spr::MeasurementVector meas = spr::load_measurement(o.meas);
    spr::ReconstructionResult result;
    if (!o.recipe.empty()) {
        const spr::Recipe recipe = spr::load_recipe(o.recipe);
        result = spr::reconstruct(recipe, meas);
    } else {
        const spr::AnyFamily fam = spr::load_family(o.family);
        const spr::HyperplaneFamily hf =
            spr::hyperplane_family_from(require_real(fam, "hyperplane reconstruction"));
        result = spr::reconstruct_hyperplanes(hf, meas);
    }
    spr::save_signal(o.out, result.signal);
    std::cout << "reconstructed signal (up to sign), re-measurement mismatch "
              << result.residual << "\n";
    return kExitOk;
}

std::filesystem::path demo_path(const DemoOpts& o, const char* name) {
    std::filesystem::create_directories(o.out_dir);
    return std::filesystem::path(o.out_dir) / name;
}

int demo_r3_example(const DemoOpts& o) {
    const spr::Frame f = spr::r3_parseval_example();
    spr::Matrix gram = spr::Matrix::Zero(3, 3);
    for (int n = 0; n < f.count(); ++n) gram += f.vec(n) * f.vec(n).transpose();
    const double parseval = (gram - spr::Matrix::Identity(3, 3)).cwiseAbs().maxCoeff();
    const bool spark = spr::is_full_spark(f);
    double min_pair = std::numeric_limits<double>::infinity();
    for (int i = 0; i < f.count(); ++i) {
        for (int j = i + 1; j < f.count(); ++j) {
            min_pair = std::min(min_pair, std::abs(f.vec(i).dot(f.vec(j))));
        }
    }
    std::cout << "five-vector pentagon frame in R^3\n";
    std::cout << "  max |sum f f^T - I| = " << parseval << "\n";
    std::cout << "  full spark: " << (spark ? "yes" : "no") << "\n";
    std::cout << "  smallest pairwise |<f_i,f_j>| = " << min_pair << "\n";
    const spr::HyperplaneFamily hf = spr::hyperplanes_from_frame(f);
    const auto fam_path = demo_path(o, "r3-example-family.sff");
    spr::save_family(fam_path.string(), hf.family);
    std::cout << "  wrote hyperplane family to " << fam_path.string() << "\n";
    return (parseval <= 1e-12 && spark && min_pair > 1e-6) ? kExitOk : kExitInconclusive;
}

int demo_r3_counterexample(const DemoOpts& o) {
    const spr::R3Counterexample rc = spr::r3_counterexample_family();
    const spr::Certificate cert = spr::certify_structured(rc.recipe);
    std::cout << "five subspaces of R^3 whose complements lose injectivity\n";
    std::cout << "  structured certificate: " << (cert.certified ? "certified" : "not certified")
              << " (" << cert.detail << ")\n";

    // The first three complements satisfy Q1 + Q2 = Q3 exactly.
    const spr::Matrix q1 = rc.complements.at(0).projector();
    const spr::Matrix q2 = rc.complements.at(1).projector();
    const spr::Matrix q3 = rc.complements.at(2).projector();
    const double collapse = (q1 + q2 - q3).cwiseAbs().maxCoeff();
    std::cout << "  max |(Q1 + Q2) - Q3| = " << collapse << "\n";

    spr::RngState rng(17);
    const auto witness = spr::rank12_witness_search(rc.complements, rng, 32);
    bool refuted = false;
    spr::Report report;
    report.mode = "witness";
    if (witness) {
        refuted = true;
        report.verdict = "refuted";
        report.witness_matrix = witness->c;
        std::cout << "  complements witness: rank " << witness->rank << ", residual "
                  << witness->residual << ", strategy " << witness->strategy << "\n";
        try {
            const auto pair = spr::witness_to_pair(*witness);
            report.witness_pair = pair;
            const spr::MeasurementVector mu = spr::measure(rc.complements, pair.first);
            const spr::MeasurementVector mv = spr::measure(rc.complements, pair.second);
            std::cout << "  witness pair measurement mismatch = "
                      << (mu - mv).cwiseAbs().maxCoeff() << "\n";
        } catch (const spr::DomainError& e) {
            std::cout << "  " << e.what() << "\n";
        }
    } else {
        report.verdict = "no-witness";
        std::cout << "  no witness found for the complements (unexpected)\n";
    }

    spr::save_family(demo_path(o, "r3-counterexample-family.sff").string(), rc.family);
    spr::save_family(demo_path(o, "r3-counterexample-complements.sff").string(),
                     rc.complements);
    spr::save_recipe(demo_path(o, "r3-counterexample-recipe.srf").string(), rc.recipe);
    spr::save_report(demo_path(o, "r3-counterexample-report.srp").string(), report);
    std::cout << "  wrote family, complements, recipe, and report to " << o.out_dir << "\n";

    return (cert.certified && collapse <= 1e-12 && refuted) ? kExitOk : kExitInconclusive;
}

int demo_parseval_hyperplanes(const DemoOpts& o) {
    const spr::Frame f = spr::r3_parseval_example();
    const spr::HyperplaneFamily hf = spr::hyperplanes_from_frame(f);
    std::cout << "hyperplane family from the pentagon frame\n";
    std::cout << "  tight weights sum to " << hf.weights.sum() << "\n";

    spr::RngState rng(99);
    const spr::Vector x0 = rng.gaussian_vector(3);
    const spr::MeasurementVector meas = spr::measure(hf.family, x0);
    const spr::ReconstructionResult rec = spr::reconstruct_hyperplanes(hf, meas);
    const double err =
        std::min((rec.signal - x0).norm(), (rec.signal + x0).norm()) / x0.norm();
    std::cout << "  round-trip relative error on a random signal = " << err << "\n";

    spr::save_family(demo_path(o, "parseval-hyperplanes-family.sff").string(), hf.family);
    spr::save_measurement(demo_path(o, "parseval-hyperplanes-meas.smf").string(), meas);
    spr::save_signal(demo_path(o, "parseval-hyperplanes-signal.svf").string(), rec.signal);
    std::cout << "  wrote family, measurement, and signal to " << o.out_dir << "\n";
    return err <= 1e-8 ? kExitOk : kExitInconclusive;
}

int run_demo(const DemoOpts& o) {
    if (o.name == "r3-example") return demo_r3_example(o);
    if (o.name == "r3-counterexample") return demo_r3_counterexample(o);
    return demo_parseval_hyperplanes(o);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"subspace phase retrieval: construct, verify, measure, reconstruct"};
    app.require_subcommand(1);

    ConstructOpts construct_opts;
    auto* construct = app.add_subcommand(
        "construct", "build a certified real family of 2M-1 subspaces");
    construct->add_option("--ambient", construct_opts.ambient, "ambient dimension M")
        ->required();
    construct
        ->add_option("--dims", construct_opts.dims,
                     "comma-separated subspace dimensions (2M-1 values in [1, M-1])")
        ->required()
        ->delimiter(',');
    construct->add_option("--seed", construct_opts.seed, "rng seed")->default_val(0);
    construct->add_option("--out", construct_opts.out_family, "family file to write");
    construct->add_option("--recipe", construct_opts.out_recipe, "recipe file to write");

    ConstructOpts complex_opts;
    auto* construct_complex = app.add_subcommand(
        "construct-complex", "build a 4M-3 complex family (empirical injectivity only)");
    construct_complex->add_option("--ambient", complex_opts.ambient, "ambient dimension M")
        ->required();
    construct_complex
        ->add_option("--dims", complex_opts.dims,
                     "comma-separated subspace dimensions (4M-3 values in [1, M-1])")
        ->required()
        ->delimiter(',');
    construct_complex->add_option("--seed", complex_opts.seed, "rng seed")->default_val(0);
    construct_complex->add_option("--out", complex_opts.out_family, "family file to write");

    HyperplaneOpts hyper_opts;
    auto* construct_hyper = app.add_subcommand(
        "construct-hyperplanes", "build N hyperplanes from a random Parseval frame");
    construct_hyper->add_option("--ambient", hyper_opts.ambient, "ambient dimension M")
        ->required();
    construct_hyper->add_option("--count", hyper_opts.count, "number of hyperplanes N")
        ->required();
    construct_hyper->add_option("--seed", hyper_opts.seed, "rng seed")->default_val(0);
    construct_hyper->add_option("--out", hyper_opts.out_family, "family file to write");

    VerifyOpts verify_opts;
    auto* verify = app.add_subcommand("verify", "certify, refute, or empirically test a family");
    verify->add_option("--family", verify_opts.family, "family file")->required();
    verify->add_option("--recipe", verify_opts.recipe, "recipe file (certificate mode)");
    verify->add_option("--mode", verify_opts.mode, "certificate | witness | empirical");
    verify->add_option("--seed", verify_opts.seed, "rng seed")->default_val(0);
    verify->add_option("--report", verify_opts.report, "report file to write");
    verify->add_option("--trials", verify_opts.trials, "empirical trial count")->default_val(100);
    verify->add_option("--restarts", verify_opts.restarts, "witness search restarts")
        ->default_val(50);

    MeasureOpts measure_opts;
    auto* measure = app.add_subcommand("measure", "apply the measurement map to a signal");
    measure->add_option("--family", measure_opts.family, "family file")->required();
    measure->add_option("--signal-in", measure_opts.signal_in, "signal file")->required();
    measure->add_option("--out", measure_opts.out, "measurement file to write")->required();

    ReconstructOpts reconstruct_opts;
    auto* reconstruct = app.add_subcommand(
        "reconstruct", "recover a signal (up to sign) from measurements");
    reconstruct->add_option("--recipe", reconstruct_opts.recipe, "recipe file (structured)");
    reconstruct->add_option("--family", reconstruct_opts.family,
                            "hyperplane family file (alternative to --recipe)");
    reconstruct->add_option("--meas", reconstruct_opts.meas, "measurement file")->required();
    reconstruct->add_option("--out", reconstruct_opts.out, "signal file to write")->required();

    DemoOpts demo_opts;
    auto* demo = app.add_subcommand("demo", "emit worked artifacts with a verification log");
    demo->add_option("name", demo_opts.name, "r3-example | r3-counterexample | parseval-hyperplanes")
        ->required()
        ->check(CLI::IsMember({"r3-example", "r3-counterexample", "parseval-hyperplanes"}));
    demo->add_option("--out-dir", demo_opts.out_dir, "directory for emitted files");

    try {
        app.parse(argc, argv);
        if (construct->parsed()) return run_construct(construct_opts);
        if (construct_complex->parsed()) return run_construct_complex(complex_opts);
        if (construct_hyper->parsed()) return run_construct_hyperplanes(hyper_opts);
        if (verify->parsed()) return run_verify(verify_opts);
        if (measure->parsed()) return run_measure(measure_opts);
        if (reconstruct->parsed()) return run_reconstruct(reconstruct_opts);
        if (demo->parsed()) return run_demo(demo_opts);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const spr::InconsistencyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInconsistent;
    } catch (const spr::AmbiguityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInconsistent;
    } catch (const spr::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
