// qtel: command-line surface over the two-qubit teleportation toolbox.
//
// Exit codes: 0 ok, 1 verification failure, 2 invalid input, 3 solver
// failure, 4 degenerate normal form.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qteleport/fstar.hpp"
#include "qteleport/measures.hpp"
#include "qteleport/normal_form.hpp"
#include "qteleport/random_states.hpp"
#include "qteleport/state_io.hpp"
#include "qteleport/teleport.hpp"
#include "qteleport/verify.hpp"

namespace {

using namespace qtel;

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::fputs(text.c_str(), stdout);
    else
        write_text_file(out_path, text);
}

Preprocessing parse_mode(const std::string& s) {
    if (s == "LU") return Preprocessing::LU;
    if (s == "LOCC") return Preprocessing::LOCC;
    if (s == "SLOCC") return Preprocessing::SLOCC;
    throw ValidationError("mode must be one of LU, LOCC, SLOCC");
}

int run(int argc, char** argv) {
    CLI::App app{
        "two-qubit entanglement measures, optimal-fidelity solver, filtering "
        "normal form and teleportation-channel imaging"};
    app.require_subcommand(1);
    int rc = 0;

    // analyze
    std::string an_input, an_out;
    double an_tol = 1e-10;
    auto* an = app.add_subcommand(
        "analyze", "entanglement measures and fidelities of a state file");
    an->add_option("input", an_input, "state JSON file")->required();
    an->add_option("--tol", an_tol, "density-matrix validation tolerance");
    an->add_option("--out", an_out, "write the report here instead of stdout");
    an->callback([&] {
        const DensityMatrix rho = read_state_json(an_input, an_tol);
        emit(measure_report_json(analyze(rho)), an_out);
    });

    // fstar
    std::string fs_input, fs_out;
    double fs_tol = 1e-8;
    auto* fs = app.add_subcommand(
        "fstar",
        "maximal teleportation singlet fraction over trace-preserving local "
        "protocols, with optimal filter and dual certificate");
    fs->add_option("input", fs_input, "state JSON file")->required();
    fs->add_option("--tol", fs_tol, "certified duality-gap tolerance");
    fs->add_option("--out", fs_out, "write the report here instead of stdout");
    fs->callback([&] {
        const DensityMatrix rho = read_state_json(fs_input);
        const FstarSolution p = solve_primal(rho, fs_tol);
        const DualSolution d = solve_dual(rho, fs_tol);
        emit(fstar_report_json(p, d), fs_out);
    });

    // normal-form
    std::string nf_input, nf_out;
    double nf_tol = 1e-10;
    auto* nf = app.add_subcommand(
        "normal-form", "Bell-diagonal filtering normal form of a state file");
    nf->add_option("input", nf_input, "state JSON file")->required();
    nf->add_option("--tol", nf_tol, "marginal convergence tolerance");
    nf->add_option("--out", nf_out, "write the report here instead of stdout");
    nf->callback([&] {
        const DensityMatrix rho = read_state_json(nf_input);
        emit(normal_form_json(normal_form(rho, nf_tol)), nf_out);
    });

    // bloch-image
    std::string bi_input, bi_out, bi_mode = "LU";
    int bi_count = 500;
    unsigned bi_seed = 0;
    auto* bi = app.add_subcommand(
        "bloch-image",
        "sample the Bloch-sphere image of the teleportation channel after "
        "local preprocessing (CSV + sidecar JSON)");
    bi->add_option("input", bi_input, "state JSON file")->required();
    bi->add_option("--mode", bi_mode, "preprocessing: LU, LOCC or SLOCC")
        ->check(CLI::IsMember({"LU", "LOCC", "SLOCC"}));
    bi->add_option("--count", bi_count, "number of sphere directions")
        ->check(CLI::PositiveNumber);
    bi->add_option("--seed", bi_seed, "lattice rotation seed");
    bi->add_option("--out", bi_out, "output CSV path")->required();
    bi->callback([&] {
        const DensityMatrix rho = read_state_json(bi_input);
        const ChannelImage img =
            bloch_image(rho, parse_mode(bi_mode), bi_count, bi_seed);
        write_text_file(bi_out, channel_csv(img));
        std::filesystem::path sidecar(bi_out);
        sidecar.replace_extension(".json");
        write_text_file(sidecar.string(), channel_sidecar_json(img));
        std::printf("wrote %d samples to %s (summary: %s)\n", bi_count,
                    bi_out.c_str(), sidecar.string().c_str());
    });

    // random
    std::string rd_out, rd_ensemble = "hilbert-schmidt";
    int rd_count = 10, rd_rank = 4;
    unsigned long long rd_seed = 0;
    auto* rd = app.add_subcommand(
        "random", "generate random density-matrix state files");
    rd->add_option("--count", rd_count, "number of states")
        ->check(CLI::PositiveNumber);
    rd->add_option("--rank", rd_rank, "rank of the sampled states (1..4)")
        ->check(CLI::Range(1, 4));
    rd->add_option("--seed", rd_seed, "generator seed");
    rd->add_option("--ensemble", rd_ensemble, "sampling measure")
        ->check(CLI::IsMember({"hilbert-schmidt"}));
    rd->add_option("--out", rd_out, "output directory")->required();
    rd->callback([&] {
        std::error_code ec;
        std::filesystem::create_directories(rd_out, ec);
        if (ec) throw IoError("cannot create directory: " + rd_out);
        Rng rng(rd_seed);
        for (int i = 0; i < rd_count; ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "state_%03d.json", i);
            write_state_json(
                (std::filesystem::path(rd_out) / name).string(),
                rng.density(rd_rank));
        }
        std::printf("wrote %d rank-%d states to %s\n", rd_count, rd_rank,
                    rd_out.c_str());
    });

    // verify
    int vf_count = 200;
    unsigned long long vf_seed = 1234;
    auto* vf = app.add_subcommand(
        "verify", "run the built-in cross-module property suites");
    vf->add_option("--count", vf_count, "sample size per suite")
        ->check(CLI::PositiveNumber);
    vf->add_option("--seed", vf_seed, "sampling seed");
    vf->callback([&] {
        const VerifyReport rep =
            run_verification(vf_count, static_cast<unsigned>(vf_seed));
        int failed = 0;
        for (const auto& c : rep.checks) {
            std::printf("%s  %-42s %s\n", c.passed ? "PASS" : "FAIL",
                        c.name.c_str(), c.detail.c_str());
            if (!c.passed) ++failed;
        }
        if (rep.all_passed) {
            std::printf("all %zu checks passed\n", rep.checks.size());
        } else {
            std::printf("%d of %zu checks FAILED\n", failed,
                        rep.checks.size());
            if (!rep.failing_state_json.empty())
                std::fprintf(stderr, "first failing case for replay:\n%s",
                             rep.failing_state_json.c_str());
            rc = 1;
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return 2;
    }
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const DegenerateNormalForm& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
