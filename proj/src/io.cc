#include "bb84/io.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "bb84/error.h"

namespace bb84 {

using nlohmann::json;

namespace {

constexpr std::array<Basis, 2> kBases{Basis::kZ, Basis::kX};

double number_at(const json &j, const char *what) {
    if (!j.is_number()) throw InvalidInput(std::string("expected a number for ") + what);
    return j.get<double>();
}

std::string fmt9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

double clamp0(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

QubitChannel channel_from_json(const json &j) {
    if (!j.is_object()) throw InvalidInput("channel must be a JSON object");
    if (j.contains("amplitude_damping")) {
        const json &ad = j.at("amplitude_damping");
        if (!ad.is_object() || !ad.contains("p")) throw InvalidInput("amplitude_damping needs a \"p\" field");
        return QubitChannel::amplitude_damping(number_at(ad.at("p"), "amplitude_damping.p"));
    }
    if (!j.contains("R") || !j.contains("t")) throw InvalidInput("channel needs \"R\" and \"t\"");
    const json &r = j.at("R");
    const json &t = j.at("t");
    if (!r.is_array() || r.size() != 3 || !t.is_array() || t.size() != 3) {
        throw InvalidInput("\"R\" must be 3x3 and \"t\" must have 3 entries");
    }
    QubitChannel ch;
    for (int a = 0; a < 3; ++a) {
        if (!r[a].is_array() || r[a].size() != 3) throw InvalidInput("\"R\" must be 3x3");
        for (int b = 0; b < 3; ++b) ch.R(a, b) = number_at(r[a][b], "R");
        ch.t[a] = number_at(t[a], "t");
    }
    return ch;
}

json channel_to_json(const QubitChannel &ch) {
    json r = json::array();
    for (int a = 0; a < 3; ++a) r.push_back({ch.R(a, 0), ch.R(a, 1), ch.R(a, 2)});
    return {{"R", r}, {"t", {ch.t[0], ch.t[1], ch.t[2]}}};
}

QubitChannel parse_channel_arg(const std::string &arg) {
    static const std::string kPrefix = "amplitude_damping:";
    if (arg.rfind(kPrefix, 0) == 0) {
        const std::string value = arg.substr(kPrefix.size());
        std::size_t used = 0;
        double p = 0.0;
        try {
            p = std::stod(value, &used);
        } catch (const std::exception &) {
            throw InvalidInput("cannot parse damping parameter '" + value + "'");
        }
        if (used != value.size()) throw InvalidInput("cannot parse damping parameter '" + value + "'");
        return QubitChannel::amplitude_damping(p);
    }
    json j;
    try {
        j = json::parse(read_file(arg));
    } catch (const json::parse_error &e) {
        throw InvalidInput("channel file " + arg + ": " + e.what());
    }
    return channel_from_json(j);
}

json counts_to_json(const OutcomeCounts &counts) {
    json cells = json::object();
    for (Basis a : kBases) {
        for (int bit = 0; bit < 2; ++bit) {
            for (Basis b : kBases) {
                cells[stratum_key(a, bit, b)] = {counts.at(a, bit, b, 0), counts.at(a, bit, b, 1)};
            }
        }
    }
    return {{"shots", counts.total()}, {"counts", cells}};
}

OutcomeCounts counts_from_json(const json &j) {
    if (!j.is_object() || !j.contains("counts") || !j.at("counts").is_object()) {
        throw InvalidInput("counts file needs a \"counts\" object");
    }
    const json &cells = j.at("counts");
    OutcomeCounts counts;
    for (Basis a : kBases) {
        for (int bit = 0; bit < 2; ++bit) {
            for (Basis b : kBases) {
                const std::string key = stratum_key(a, bit, b);
                if (!cells.contains(key)) continue;
                const json &pair = cells.at(key);
                if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() ||
                    !pair[1].is_number_unsigned()) {
                    throw InvalidInput("counts." + key + " must be [n0, n1] with nonnegative integers");
                }
                counts.at(a, bit, b, 0) = pair[0].get<std::uint64_t>();
                counts.at(a, bit, b, 1) = pair[1].get<std::uint64_t>();
            }
        }
    }
    if (j.contains("shots")) {
        if (!j.at("shots").is_number_unsigned() || j.at("shots").get<std::uint64_t>() != counts.total()) {
            throw InvalidInput("\"shots\" does not match the sum of the counts");
        }
    }
    return counts;
}

json report_to_json(const KeyRateReport &report) {
    return {{"q", report.q},
            {"direction", to_string(report.direction)},
            {"rate", report.rate},
            {"rate_clamped", report.clamped_rate()},
            {"worst_case_R_yy", report.worst_case_r_yy},
            {"eve_ambiguity", report.eve_ambiguity},
            {"classical_leak", report.classical_leak}};
}

json estimate_to_json(const OmegaEstimate &estimate) {
    const OmegaParams &w = estimate.omega;
    const auto &e = estimate.std_err;
    return {{"omega", {{"R_zz", w.r_zz}, {"R_zx", w.r_zx}, {"R_xz", w.r_xz}, {"R_xx", w.r_xx}, {"t_z", w.t_z},
                       {"t_x", w.t_x}}},
            {"std_err", {{"R_zz", e[0]}, {"R_zx", e[1]}, {"R_xz", e[2]}, {"R_xx", e[3]}, {"t_z", e[4]},
                         {"t_x", e[5]}}}};
}

json tpcp_to_json(const TpcpDiagnostics &diag) {
    return {{"valid", diag.valid}, {"min_eigenvalue", diag.min_eigenvalue}, {"trace_defect", diag.trace_defect}};
}

std::string sweep_csv(std::span<const SweepRow> rows) {
    std::string out =
        "p,q_conventional,rate_direct_conv,rate_reverse_conv,q_hat_direct,rate_direct_opt,q_hat_reverse,"
        "rate_reverse_opt\n";
    for (const SweepRow &r : rows) {
        out += fmt9(r.p) + ',' + fmt9(r.q_conventional) + ',' + fmt9(clamp0(r.rate_direct_conv)) + ',' +
               fmt9(clamp0(r.rate_reverse_conv)) + ',' + fmt9(r.q_hat_direct) + ',' + fmt9(clamp0(r.rate_direct_opt)) +
               ',' + fmt9(r.q_hat_reverse) + ',' + fmt9(clamp0(r.rate_reverse_opt)) + '\n';
    }
    return out;
}

void write_file_atomic(const std::filesystem::path &path, const std::string &contents) {
    namespace fs = std::filesystem;
    const fs::path tmp = path.parent_path() / ("." + path.filename().string() + ".tmp." + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidInput("cannot open " + tmp.string() + " for writing");
        out << contents;
        out.close();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw InvalidInput("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw InvalidInput("cannot move output into place at " + path.string());
    }
}

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace bb84
