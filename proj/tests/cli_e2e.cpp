// End-to-end exercise of the qtel binary: spawn it the way a user would and
// check exit codes, JSON payloads and reproducibility. argv[1] is the path
// to the binary (wired up by CTest).

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#include "qteleport/fstar.hpp"
#include "qteleport/qmat.hpp"
#include "qteleport/state_io.hpp"
#include "qteleport/types.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qtel;

namespace {

int g_failures = 0;
fs::path g_dir;
std::string g_qtel;
int g_run_id = 0;

void check(bool ok, const std::string& what) {
    std::printf("%s  %s\n", ok ? "PASS" : "FAIL", what.c_str());
    if (!ok) ++g_failures;
}

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run(const std::string& args) {
    const fs::path o = g_dir / ("stdout" + std::to_string(g_run_id) + ".txt");
    const fs::path e = g_dir / ("stderr" + std::to_string(g_run_id) + ".txt");
    ++g_run_id;
    const std::string cmd = "\"" + g_qtel + "\" " + args + " > \"" +
                            o.string() + "\" 2> \"" + e.string() + "\"";
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(o);
    r.err = slurp(e);
    return r;
}

fs::path write_state(const std::string& name, const DensityMatrix& rho) {
    const fs::path p = g_dir / name;
    write_state_json(p.string(), rho);
    return p;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: cli_e2e <path-to-qtel>\n");
        return 64;
    }
    g_qtel = argv[1];
    g_dir = fs::temp_directory_path() / "qtel_e2e";
    fs::remove_all(g_dir);
    fs::create_directories(g_dir);

    const fs::path family = write_state("family04.json", family_state(0.4));

    // analyze: happy path
    {
        RunResult r = run("analyze \"" + family.string() + "\"");
        bool ok = r.code == 0;
        double f = 0.0, c = 0.0;
        if (ok) {
            const json j = json::parse(r.out, nullptr, false);
            ok = !j.is_discarded();
            if (ok) {
                f = j.at("singlet_fraction").get<double>();
                c = j.at("concurrence").get<double>();
                ok = std::abs(f - 0.4) < 1e-12 && std::abs(c - 0.4) < 1e-9 &&
                     j.at("entangled").get<bool>();
            }
        }
        check(ok, "analyze reports F = C = 0.4 on the family state");
    }

    // analyze: trace-2 input must be rejected with code 2
    {
        const fs::path bad = g_dir / "bad.json";
        {
            json j = json::parse(slurp(family));
            for (int k = 0; k < 4; ++k)
                j["re"][k][k] = j["re"][k][k].get<double>() * 2.0;
            std::ofstream(bad) << j.dump();
        }
        RunResult r = run("analyze \"" + bad.string() + "\"");
        check(r.code == 2 && !r.err.empty(),
              "analyze rejects an unnormalized state with exit code 2");
    }

    // analyze: missing file is an I/O error, also code 2
    {
        RunResult r = run("analyze \"" + (g_dir / "nope.json").string() + "\"");
        check(r.code == 2, "analyze on a missing file exits with code 2");
    }

    // fstar: certified solve of the family point
    {
        RunResult r = run("fstar \"" + family.string() + "\"");
        bool ok = r.code == 0;
        if (ok) {
            const json j = json::parse(r.out);
            ok = std::abs(j.at("fstar").get<double>() - 8.0 / 15.0) < 1e-6 &&
                 std::abs(j.at("duality_gap").get<double>()) < 1e-6 &&
                 !j.at("no_filter").get<bool>();
        }
        check(ok, "fstar certifies 8/15 on the family state");
    }

    // normal-form: Werner(0.6) has fidelity_nf = 0.7
    {
        const Mat4 w = 0.6 * proj(bell_ket(0)) +
                       0.4 * 0.25 * Mat4::Identity();
        const fs::path p = write_state("werner06.json", validate_density(w));
        RunResult r = run("normal-form \"" + p.string() + "\"");
        bool ok = r.code == 0;
        if (ok) {
            const json j = json::parse(r.out);
            ok = std::abs(j.at("fidelity_nf").get<double>() - 0.7) < 1e-9 &&
                 !j.at("separable").get<bool>();
        }
        check(ok, "normal-form reproduces fidelity 0.7 for Werner(0.6)");
    }

    // normal-form: pure product state is the degenerate class, code 4
    {
        Mat4 m = Mat4::Zero();
        m(0, 0) = 1.0;
        const fs::path p = write_state("prod.json", validate_density(m));
        RunResult r = run("normal-form \"" + p.string() + "\"");
        check(r.code == 4,
              "normal-form on |00><00| exits with the degenerate code 4");

        RunResult rb = run("bloch-image \"" + p.string() +
                           "\" --mode SLOCC --count 16 --out \"" +
                           (g_dir / "deg.csv").string() + "\"");
        check(rb.code == 4, "bloch-image SLOCC shares the degenerate code 4");
    }

    // bloch-image: CSV shape, sidecar fidelity, determinism
    {
        const fs::path csv1 = g_dir / "img1.csv";
        const fs::path csv2 = g_dir / "img2.csv";
        RunResult r1 = run("bloch-image \"" + family.string() +
                           "\" --mode LU --count 50 --seed 3 --out \"" +
                           csv1.string() + "\"");
        RunResult r2 = run("bloch-image \"" + family.string() +
                           "\" --mode LU --count 50 --seed 3 --out \"" +
                           csv2.string() + "\"");
        bool ok = r1.code == 0 && r2.code == 0;
        if (ok) {
            const std::string body = slurp(csv1);
            size_t lines = 0;
            for (char ch : body)
                if (ch == '\n') ++lines;
            ok = lines == 51 && body.rfind("nx,ny,nz,ox,oy,oz\n", 0) == 0 &&
                 body == slurp(csv2);
        }
        if (ok) {
            fs::path side = csv1;
            side.replace_extension(".json");
            const json j = json::parse(slurp(side));
            ok = std::abs(j.at("avg_fidelity").get<double>() - 0.6) < 1e-9;
        }
        check(ok, "bloch-image writes a 50-row deterministic CSV with an "
                  "avg_fidelity 0.6 sidecar");
    }

    // random: reproducible valid states on disk
    {
        const fs::path d1 = g_dir / "rand1";
        const fs::path d2 = g_dir / "rand2";
        RunResult r1 = run("random --count 3 --rank 2 --seed 5 --out \"" +
                           d1.string() + "\"");
        RunResult r2 = run("random --count 3 --rank 2 --seed 5 --out \"" +
                           d2.string() + "\"");
        bool ok = r1.code == 0 && r2.code == 0;
        for (int i = 0; ok && i < 3; ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "state_%03d.json", i);
            const fs::path p1 = d1 / name;
            ok = fs::exists(p1) && slurp(p1) == slurp(d2 / name);
            if (ok) {
                const DensityMatrix rho = read_state_json(p1.string());
                ok = herm_eig(rho.mat).w(0) > -1e-12;
            }
        }
        check(ok, "random --count 3 writes reproducible valid states");
    }

    // verify: the built-in self-check agrees with everything above
    {
        RunResult r = run("verify --count 25 --seed 4");
        check(r.code == 0 && r.out.find("FAIL") == std::string::npos,
              "verify --count 25 passes every internal check");
    }

    // CLI hygiene
    {
        RunResult r = run("frobnicate");
        check(r.code == 2, "unknown subcommand exits with code 2");
        RunResult h = run("--help");
        check(h.code == 0 && h.out.find("analyze") != std::string::npos,
              "--help exits 0 and lists subcommands");
        RunResult n = run("");
        check(n.code == 2, "missing subcommand exits with code 2");
    }

    std::printf("%s: %d checks failed\n",
                g_failures == 0 ? "E2E PASS" : "E2E FAIL", g_failures);
    return g_failures;
}
