#include "bb84/cli.h"

#include <algorithm>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "bb84/bb84sim.h"
#include "bb84/error.h"
#include "bb84/io.h"
#include "bb84/keyrate.h"
#include "bb84/scalar_search.h"

namespace bb84 {

namespace {

using nlohmann::json;

struct Flags {
    std::string channel;
    double q = 0.5;
    std::string direction = "reverse";
    std::optional<double> p;
    double p_min = 0.0;
    double p_max = 0.0;
    int steps = 0;
    double q_conventional = 0.5;
    std::string out_path;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    bool exact = false;
    double basis_prob_z = 0.5;
    unsigned partitions = 1;
    std::string counts_path;
};

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

void add_direction(CLI::App *cmd, Flags &f, bool required) {
    auto *opt = cmd->add_option("--direction", f.direction, "direct or reverse")
                    ->check(CLI::IsMember({"direct", "reverse"}));
    if (required) opt->required();
}

void emit(std::ostream &out, const json &j) { out << j.dump(2) << '\n'; }

int run_rate(const Flags &f, std::ostream &out) {
    const QubitChannel ch = parse_channel_arg(f.channel);
    emit(out, report_to_json(key_rate(ch, SourceDistribution(f.q), parse_reconciliation(f.direction))));
    return kExitOk;
}

int run_optimize(const Flags &f, std::ostream &out) {
    const Reconciliation direction = parse_reconciliation(f.direction);
    json j;
    BiasOptimum best;
    if (f.p) {
        best = optimize_bias(*f.p, direction);
        j["p"] = *f.p;
    } else {
        const QubitChannel ch = parse_channel_arg(f.channel);
        best = optimize_bias(OmegaParams::from_channel(ch), direction);
        j["channel"] = channel_to_json(ch);
    }
    j["direction"] = to_string(direction);
    j["q_hat"] = best.q_hat;
    j["rate"] = best.rate;
    j["rate_clamped"] = std::max(best.rate, 0.0);
    j["unimodal"] = best.unimodal;
    emit(out, j);
    return kExitOk;
}

int run_sweep(const Flags &f, std::ostream &out) {
    if (f.p_max < f.p_min) throw DomainError("--p-max must not be below --p-min");
    const std::vector<double> grid = linspace(f.p_min, f.p_max, f.steps);
    const std::string csv = sweep_csv(sweep(grid, f.q_conventional));
    if (f.out_path.empty()) {
        out << csv;
    } else {
        write_file_atomic(f.out_path, csv);
    }
    return kExitOk;
}

int run_validate(const Flags &f, std::ostream &out) {
    const QubitChannel ch = parse_channel_arg(f.channel);
    json j = tpcp_to_json(is_tpcp(ch));
    j["channel"] = channel_to_json(ch);
    emit(out, j);
    return kExitOk;
}

int run_simulate(const Flags &f, std::ostream &out) {
    const QubitChannel ch = parse_channel_arg(f.channel);
    ProtocolConfig cfg;
    cfg.q = f.q;
    cfg.basis_prob_z = f.basis_prob_z;
    cfg.shots = f.shots;
    cfg.seed = f.seed;
    cfg.partitions = f.partitions;
    cfg.validate();
    const Reconciliation direction = parse_reconciliation(f.direction);

    json j;
    EndToEndReport report;
    if (f.exact) {
        report = end_to_end_rate(ch, cfg, direction, true);
        j["exact"] = true;
    } else {
        const OutcomeCounts counts = simulate(ch, cfg);
        report = end_to_end_rate(ch, cfg, direction, counts);
        j["exact"] = false;
        j["counts"] = counts_to_json(counts);
        if (!f.counts_path.empty()) write_file_atomic(f.counts_path, counts_to_json(counts).dump(2) + "\n");
    }
    j["estimate"] = estimate_to_json(report.estimate);
    j["projection_distance"] = report.projection_distance;
    j["report"] = report_to_json(report.estimated);
    j["true_report"] = report_to_json(report.truth);
    emit(out, j);
    return kExitOk;
}

int run_estimate(const Flags &f, std::ostream &out) {
    json j;
    try {
        j = json::parse(read_file(f.counts_path));
    } catch (const json::parse_error &e) {
        throw InvalidInput("counts file " + f.counts_path + ": " + e.what());
    }
    emit(out, estimate_to_json(estimate_omega(counts_from_json(j))));
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    Flags f;
    CLI::App app{"Asymptotic BB84 key rates with a biased bit source"};
    app.require_subcommand(1);

    auto *rate = app.add_subcommand("rate", "Worst-case key rate of a channel at a given bias");
    rate->add_option("--channel", f.channel, "amplitude_damping:<p> or a channel JSON file")->required();
    rate->add_option("--q", f.q, "probability of bit 0")->required();
    add_direction(rate, f, true);

    auto *optimize = app.add_subcommand("optimize", "Bias that maximizes the key rate");
    auto *source = optimize->add_option_group("source", "exactly one of --p, --channel");
    source->add_option("--p", f.p, "amplitude damping parameter (closed-form rates)");
    source->add_option("--channel", f.channel, "general channel (entropic rates)");
    source->require_option(1);
    add_direction(optimize, f, true);

    auto *sweep_cmd = app.add_subcommand("sweep", "Conventional vs optimized rates over amplitude damping");
    sweep_cmd->add_option("--p-min", f.p_min)->required();
    sweep_cmd->add_option("--p-max", f.p_max)->required();
    sweep_cmd->add_option("--steps", f.steps, "number of grid points")->required()->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--q-conventional", f.q_conventional, "bias of the conventional protocol");
    sweep_cmd->add_option("--out", f.out_path, "CSV output path (default stdout)");

    auto *validate = app.add_subcommand("validate", "TPCP diagnostics of a channel");
    validate->add_option("--channel", f.channel)->required();

    auto *simulate_cmd = app.add_subcommand("simulate", "Monte Carlo run, estimation and end-to-end rate");
    simulate_cmd->add_option("--channel", f.channel)->required();
    simulate_cmd->add_option("--q", f.q)->required();
    simulate_cmd->add_option("--shots", f.shots)->required()->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--seed", f.seed)->required();
    simulate_cmd->add_flag("--exact", f.exact, "use exact outcome probabilities instead of sampling");
    simulate_cmd->add_option("--basis-prob-z", f.basis_prob_z);
    simulate_cmd->add_option("--partitions", f.partitions)->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--counts-out", f.counts_path, "also write the counts JSON here");
    add_direction(simulate_cmd, f, false);

    auto *estimate = app.add_subcommand("estimate", "Estimate the observable channel parameters from counts");
    estimate->add_option("--counts", f.counts_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: FlagError: " << one_line(e.what()) << '\n';
        return kExitFlagError;
    }

    try {
        if (rate->parsed()) return run_rate(f, out);
        if (optimize->parsed()) return run_optimize(f, out);
        if (sweep_cmd->parsed()) return run_sweep(f, out);
        if (validate->parsed()) return run_validate(f, out);
        if (simulate_cmd->parsed()) return run_simulate(f, out);
        if (estimate->parsed()) return run_estimate(f, out);
    } catch (const Error &e) {
        err << "error: " << e.kind() << ": " << one_line(e.what()) << '\n';
        return kExitDomainError;
    } catch (const std::exception &e) {
        err << "error: InternalError: " << one_line(e.what()) << '\n';
        return kExitDomainError;
    }
    return kExitFlagError;
}

}  // namespace bb84
