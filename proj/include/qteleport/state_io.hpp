#pragma once

// Serialization for the CLI surface. State files are JSON with separate
// real/imaginary 4x4 arrays and an explicit basis tag ("AB-comp" =
// |00>,|01>,|10>,|11> with the A qubit first). All floats are emitted with 17
// significant digits so doubles round-trip bit-faithfully and repeated runs
// are byte-identical.

#include <string>

#include "qteleport/fstar.hpp"
#include "qteleport/measures.hpp"
#include "qteleport/normal_form.hpp"
#include "qteleport/teleport.hpp"
#include "qteleport/types.hpp"

namespace qtel {

// %.17g, C locale
std::string fmt17(double x);

// Parse a StateFile JSON document; validates the density matrix with `tol`.
// Malformed documents and invariant violations raise ValidationError.
DensityMatrix parse_state_json(const std::string& text, double tol = 1e-10);
DensityMatrix read_state_json(const std::string& path, double tol = 1e-10);

std::string state_to_json(const DensityMatrix& rho);
void write_state_json(const std::string& path, const DensityMatrix& rho);

std::string measure_report_json(const MeasureReport& r);
std::string fstar_report_json(const FstarSolution& p, const DualSolution& d);
std::string normal_form_json(const NormalFormResult& r);

// sidecar {m: [[..]], c: [..], avg_fidelity: ..}
std::string channel_sidecar_json(const ChannelImage& img);

// header nx,ny,nz,ox,oy,oz and one row per sample
std::string channel_csv(const ChannelImage& img);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace qtel
