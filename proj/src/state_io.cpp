#include "qteleport/state_io.hpp"

#include <algorithm>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qteleport/qmat.hpp"

namespace qtel {

namespace {

using nlohmann::json;

std::string num_row(const double* v, int n) {
    std::string out = "[";
    for (int i = 0; i < n; ++i) {
        if (i) out += ", ";
        out += fmt17(v[i]);
    }
    out += "]";
    return out;
}

// [[...], [...]] for the real or imaginary part of a matrix
template <typename M>
std::string part_json(const M& m, bool imag) {
    std::string out = "[";
    for (int i = 0; i < m.rows(); ++i) {
        if (i) out += ", ";
        std::string row = "[";
        for (int j = 0; j < m.cols(); ++j) {
            if (j) row += ", ";
            const cplx v = m(i, j);
            row += fmt17(imag ? v.imag() : v.real());
        }
        out += row + "]";
    }
    return out + "]";
}

template <typename M>
std::string cmat_json(const M& m) {
    return "{\"re\": " + part_json(m, false) + ", \"im\": " + part_json(m, true) +
           "}";
}

// density-matrix fields carry the basis tag so they are themselves valid
// state documents (can be cut out and fed back to any subcommand)
std::string state_json_inline(const Mat4& m) {
    return "{\"basis\": \"AB-comp\", \"re\": " + part_json(m, false) +
           ", \"im\": " + part_json(m, true) + "}";
}

std::string cvec_json(const Vec4& v) {
    double re[4], im[4];
    for (int i = 0; i < 4; ++i) {
        re[i] = v(i).real();
        im[i] = v(i).imag();
    }
    return "{\"re\": " + num_row(re, 4) + ", \"im\": " + num_row(im, 4) + "}";
}

std::string rmat_json(const Mat3r& m) {
    std::string out = "[";
    for (int i = 0; i < 3; ++i) {
        if (i) out += ", ";
        double row[3] = {m(i, 0), m(i, 1), m(i, 2)};
        out += num_row(row, 3);
    }
    return out + "]";
}

}  // namespace

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

DensityMatrix parse_state_json(const std::string& text, double tol) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("state file: invalid JSON: ") +
                              e.what());
    }
    if (!j.is_object() || !j.contains("basis") || !j["basis"].is_string() ||
        j["basis"].get<std::string>() != "AB-comp")
        throw ValidationError(
            "state file: missing or unsupported basis tag (expected "
            "\"AB-comp\")");
    Mat4 m;
    for (const char* key : {"re", "im"}) {
        if (!j.contains(key) || !j[key].is_array() || j[key].size() != 4)
            throw ValidationError(std::string("state file: field '") + key +
                                  "' must be a 4x4 array");
        for (int i = 0; i < 4; ++i) {
            const auto& row = j[key][i];
            if (!row.is_array() || row.size() != 4)
                throw ValidationError(std::string("state file: field '") + key +
                                      "' must be a 4x4 array");
            for (int jj = 0; jj < 4; ++jj) {
                if (!row[jj].is_number())
                    throw ValidationError("state file: non-numeric entry");
                const double v = row[jj].get<double>();
                if (key[0] == 'r')
                    m(i, jj) = cplx(v, 0.0);
                else
                    m(i, jj) += cplx(0.0, v);
            }
        }
    }
    // bit-exact path: hand back exactly what was written when it is already
    // a valid state at machine precision
    try {
        return validate_density(m, std::min(tol, 1e-14));
    } catch (const ValidationError&) {
    }
    DensityMatrix checked = validate_density(m, tol);
    // repair parse-scale dust (hermitize, clip negative eigen-dust) so
    // downstream code sees an exact state
    const Mat4 h = 0.5 * (checked.mat + checked.mat.adjoint());
    return DensityMatrix{psd_clip(h)};
}

DensityMatrix read_state_json(const std::string& path, double tol) {
    return parse_state_json(read_text_file(path), tol);
}

std::string state_to_json(const DensityMatrix& rho) {
    std::string out = "{\n  \"basis\": \"AB-comp\",\n";
    out += "  \"re\": " + part_json(rho.mat, false) + ",\n";
    out += "  \"im\": " + part_json(rho.mat, true) + "\n}\n";
    return out;
}

void write_state_json(const std::string& path, const DensityMatrix& rho) {
    write_text_file(path, state_to_json(rho));
}

std::string measure_report_json(const MeasureReport& r) {
    std::string out = "{\n";
    out += "  \"singlet_fraction\": " + fmt17(r.singlet_fraction) + ",\n";
    out += "  \"psi_max\": " + cvec_json(r.achieving_me_state.vec) + ",\n";
    out += "  \"concurrence\": " + fmt17(r.concurrence) + ",\n";
    out += "  \"negativity\": " + fmt17(r.negativity) + ",\n";
    out += std::string("  \"entangled\": ") + (r.entangled ? "true" : "false") +
           ",\n";
    out += std::string("  \"near_boundary\": ") +
           (r.near_boundary ? "true" : "false") + ",\n";
    out += "  \"teleport_fidelity\": " + fmt17(r.teleport_fidelity) + "\n}\n";
    return out;
}

std::string fstar_report_json(const FstarSolution& p, const DualSolution& d) {
    std::string out = "{\n";
    out += "  \"fstar\": " + fmt17(p.fstar) + ",\n";
    out += "  \"fstar_fidelity\": " + fmt17((2.0 * p.fstar + 1.0) / 3.0) +
           ",\n";
    out += "  \"dual_value\": " + fmt17(d.g) + ",\n";
    out += "  \"duality_gap\": " + fmt17(p.duality_gap) + ",\n";
    out += "  \"filter_a\": " + cmat_json(p.filter_A.mat) + ",\n";
    out += std::string("  \"no_filter\": ") + (p.no_filter ? "true" : "false") +
           ",\n";
    out += std::string("  \"filter_unitary\": ") +
           (p.filter_unitary ? "true" : "false") + ",\n";
    out += "  \"rank_gap\": " + fmt17(p.rank_gap) + ",\n";
    out += "  \"x_opt\": " + cmat_json(p.x_opt) + ",\n";
    out += "  \"feasibility_margin_primal\": " + fmt17(p.feasibility_margin) +
           ",\n";
    out += "  \"auto_constraint_margin\": " + fmt17(p.auto_constraint_margin) +
           ",\n";
    out += "  \"iterations_primal\": " + std::to_string(p.iterations) + ",\n";
    out += "  \"mixing_p\": " + fmt17(d.mixing_p) + ",\n";
    out += "  \"rho_z\": " + state_json_inline(d.rho_z.mat) + ",\n";
    out += "  \"rho_mix\": " + state_json_inline(d.rho_mix.mat) + ",\n";
    out += "  \"feasibility_margin_dual\": " + fmt17(d.feasibility_margin) +
           ",\n";
    out += "  \"iterations_dual\": " + std::to_string(d.iterations) + "\n}\n";
    return out;
}

std::string normal_form_json(const NormalFormResult& r) {
    double bc[4] = {r.bell_coefficients[0], r.bell_coefficients[1],
                    r.bell_coefficients[2], r.bell_coefficients[3]};
    std::string out = "{\n";
    out += "  \"bell_coefficients\": " + num_row(bc, 4) + ",\n";
    out += "  \"rho_nf\": " + state_json_inline(r.rho_nf.mat) + ",\n";
    out += "  \"filter_a\": " + cmat_json(r.filter_A.mat) + ",\n";
    out += "  \"filter_b\": " + cmat_json(r.filter_B.mat) + ",\n";
    out += "  \"success_prob\": " + fmt17(r.success_prob) + ",\n";
    out += "  \"fidelity_nf\": " + fmt17(r.fidelity_nf) + ",\n";
    out += std::string("  \"separable\": ") + (r.separable ? "true" : "false") +
           ",\n";
    out += "  \"iterations\": " + std::to_string(r.iterations) + "\n}\n";
    return out;
}

std::string channel_sidecar_json(const ChannelImage& img) {
    double c[3] = {img.c(0), img.c(1), img.c(2)};
    std::string out = "{\n";
    out += "  \"m\": " + rmat_json(img.m) + ",\n";
    out += "  \"c\": " + num_row(c, 3) + ",\n";
    out += "  \"avg_fidelity\": " + fmt17(img.avg_fidelity) + "\n}\n";
    return out;
}

std::string channel_csv(const ChannelImage& img) {
    std::string out = "nx,ny,nz,ox,oy,oz\n";
    for (const auto& s : img.samples) {
        for (int i = 0; i < 6; ++i) {
            if (i) out += ",";
            out += fmt17(s[i]);
        }
        out += "\n";
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    if (f.bad()) throw IoError("read failed: " + path);
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << content;
    f.flush();
    if (!f) throw IoError("write failed: " + path);
}

}  // namespace qtel
