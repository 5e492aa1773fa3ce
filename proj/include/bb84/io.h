#ifndef BB84_IO_H_
#define BB84_IO_H_

#include <filesystem>
#include <span>
#include <string>

#include "bb84/bb84sim.h"
#include "bb84/channel.h"
#include "bb84/keyrate.h"
#include "json.hpp"

namespace bb84 {

// {"R": [[r_zz, r_zx, r_zy], [r_xz, r_xx, r_xy], [r_yz, r_yx, r_yy]], "t": [t_z, t_x, t_y]}
// or {"amplitude_damping": {"p": <float>}}. Throws InvalidInput.
QubitChannel channel_from_json(const nlohmann::json &j);
nlohmann::json channel_to_json(const QubitChannel &ch);

// "amplitude_damping:<p>" or a path to a channel JSON file.
QubitChannel parse_channel_arg(const std::string &arg);

// {"shots": n, "counts": {"z0z": [n0, n1], ...}}
nlohmann::json counts_to_json(const OutcomeCounts &counts);
OutcomeCounts counts_from_json(const nlohmann::json &j);

nlohmann::json report_to_json(const KeyRateReport &report);
nlohmann::json estimate_to_json(const OmegaEstimate &estimate);
nlohmann::json tpcp_to_json(const TpcpDiagnostics &diag);

// Header plus one line per row, rates clamped at zero, 9 significant digits.
std::string sweep_csv(std::span<const SweepRow> rows);

// Writes through a temporary file in the same directory, then renames, so a
// failed write never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path &path, const std::string &contents);

std::string read_file(const std::filesystem::path &path);

}  // namespace bb84

#endif  // BB84_IO_H_
