#include "bb84/bb84sim.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include "bb84/error.h"

namespace bb84 {

namespace {

constexpr std::array<Basis, 2> kBases{Basis::kZ, Basis::kX};

// Uniform double in [0, 1) from the top 53 bits; independent of the
// standard library's distribution implementations.
double uniform01(std::mt19937_64 &gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

std::mt19937_64 partition_stream(std::uint64_t seed, unsigned partition) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), partition};
    return std::mt19937_64(seq);
}

// Bloch vector Alice prepares: bit 0 is the +1 eigenstate of the basis.
BlochVector prepared_state(Basis basis, int bit) {
    const double s = bit == 0 ? 1.0 : -1.0;
    return basis == Basis::kZ ? BlochVector{s, 0.0, 0.0} : BlochVector{0.0, s, 0.0};
}

double component(const BlochVector &v, Basis basis) { return basis == Basis::kZ ? v.z : v.x; }

// P(outcome 0) for every (alice basis, bit, bob basis).
std::array<double, 8> outcome_zero_probabilities(const QubitChannel &ch) {
    std::array<double, 8> probs{};
    for (Basis a : kBases) {
        for (int bit = 0; bit < 2; ++bit) {
            const BlochVector out = apply_channel(ch, prepared_state(a, bit));
            for (Basis b : kBases) {
                const double p0 = 0.5 * (1.0 + component(out, b));
                probs[OutcomeCounts::index(a, bit, b, 0) / 2] = std::clamp(p0, 0.0, 1.0);
            }
        }
    }
    return probs;
}

OutcomeCounts run_partition(const std::array<double, 8> &p_zero, const ProtocolConfig &cfg, std::uint64_t shots,
                            unsigned partition) {
    std::mt19937_64 gen = partition_stream(cfg.seed, partition);
    OutcomeCounts counts;
    for (std::uint64_t i = 0; i < shots; ++i) {
        const Basis alice = uniform01(gen) < cfg.basis_prob_z ? Basis::kZ : Basis::kX;
        const int bit = uniform01(gen) < cfg.q ? 0 : 1;
        const Basis bob = uniform01(gen) < cfg.basis_prob_z ? Basis::kZ : Basis::kX;
        const std::size_t stratum = OutcomeCounts::index(alice, bit, bob, 0);
        const int outcome = uniform01(gen) < p_zero[stratum / 2] ? 0 : 1;
        ++counts.cells[stratum + outcome];
    }
    return counts;
}

struct Stratum {
    Basis alice;
    int bit;
    Basis bob;
    double weight;      // least-squares weight
    double expectation; // estimate of <sigma_bob>
    double variance;    // variance of that estimate
};

OmegaEstimate fit(const std::vector<Stratum> &strata) {
    // Unknowns: r_zz, r_zx, r_xz, r_xx, t_z, t_x.
    Eigen::Matrix<double, 8, 6> design = Eigen::Matrix<double, 8, 6>::Zero();
    Eigen::Matrix<double, 8, 1> observed;
    Eigen::Matrix<double, 8, 1> weights;
    Eigen::Matrix<double, 8, 1> variances;
    for (int i = 0; i < 8; ++i) {
        const Stratum &s = strata[i];
        const double sign = s.bit == 0 ? 1.0 : -1.0;
        const bool z_in = s.alice == Basis::kZ;
        if (s.bob == Basis::kZ) {
            design(i, z_in ? 0 : 1) = sign;
            design(i, 4) = 1.0;
        } else {
            design(i, z_in ? 2 : 3) = sign;
            design(i, 5) = 1.0;
        }
        observed[i] = s.expectation;
        weights[i] = s.weight;
        variances[i] = s.variance;
    }
    const Eigen::Matrix<double, 6, 8> weighted_t = design.transpose() * weights.asDiagonal();
    const Eigen::Matrix<double, 6, 6> normal = weighted_t * design;
    const Eigen::Matrix<double, 6, 8> solver = normal.ldlt().solve(weighted_t);
    const Eigen::Matrix<double, 6, 1> beta = solver * observed;
    const Eigen::Matrix<double, 6, 6> cov = solver * variances.asDiagonal() * solver.transpose();

    OmegaEstimate est;
    est.omega = {beta[0], beta[1], beta[2], beta[3], beta[4], beta[5]};
    for (int k = 0; k < 6; ++k) est.std_err[k] = std::sqrt(std::max(cov(k, k), 0.0));
    if ((variances.array() > 0.0).all()) {
        const Eigen::Matrix<double, 6, 8> design_t = design.transpose();
        est.information = design_t * variances.cwiseInverse().asDiagonal() * design;
    }
    return est;
}

}  // namespace

void ProtocolConfig::validate() const {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("q must lie in (0, 1)");
    if (!(basis_prob_z > 0.0 && basis_prob_z < 1.0)) throw DomainError("basis probability must lie in (0, 1)");
    if (shots < 1) throw DomainError("shots must be at least 1");
    if (partitions < 1) throw DomainError("partitions must be at least 1");
}

std::string stratum_key(Basis alice, int bit, Basis bob) {
    std::string key;
    key += alice == Basis::kZ ? 'z' : 'x';
    key += bit == 0 ? '0' : '1';
    key += bob == Basis::kZ ? 'z' : 'x';
    return key;
}

OutcomeCounts simulate(const QubitChannel &ch, const ProtocolConfig &cfg) {
    cfg.validate();
    const std::array<double, 8> p_zero = outcome_zero_probabilities(ch);
    std::vector<OutcomeCounts> parts(cfg.partitions);
    std::vector<std::thread> workers;
    const std::uint64_t base = cfg.shots / cfg.partitions;
    const std::uint64_t extra = cfg.shots % cfg.partitions;
    for (unsigned i = 0; i < cfg.partitions; ++i) {
        const std::uint64_t n = base + (i < extra ? 1 : 0);
        workers.emplace_back([&, i, n] { parts[i] = run_partition(p_zero, cfg, n, i); });
    }
    for (auto &w : workers) w.join();

    OutcomeCounts merged;
    for (const auto &part : parts) {
        for (std::size_t c = 0; c < merged.cells.size(); ++c) merged.cells[c] += part.cells[c];
    }
    return merged;
}

OutcomeProbabilities exact_outcomes(const QubitChannel &ch, const ProtocolConfig &cfg) {
    cfg.validate();
    const std::array<double, 8> p_zero = outcome_zero_probabilities(ch);
    auto basis_prob = [&](Basis b) { return b == Basis::kZ ? cfg.basis_prob_z : 1.0 - cfg.basis_prob_z; };
    OutcomeProbabilities probs;
    for (Basis a : kBases) {
        for (int bit = 0; bit < 2; ++bit) {
            for (Basis b : kBases) {
                const double w = basis_prob(a) * (bit == 0 ? cfg.q : 1.0 - cfg.q) * basis_prob(b);
                const double p0 = p_zero[OutcomeCounts::index(a, bit, b, 0) / 2];
                probs.at(a, bit, b, 0) = w * p0;
                probs.at(a, bit, b, 1) = w * (1.0 - p0);
            }
        }
    }
    return probs;
}

OmegaEstimate estimate_omega(const OutcomeCounts &counts) {
    std::vector<Stratum> strata;
    for (Basis a : kBases) {
        for (int bit = 0; bit < 2; ++bit) {
            for (Basis b : kBases) {
                const auto n0 = static_cast<double>(counts.at(a, bit, b, 0));
                const double n = n0 + static_cast<double>(counts.at(a, bit, b, 1));
                if (n == 0.0) throw InsufficientData("stratum " + stratum_key(a, bit, b) + " has no shots");
                const double m = n0 / n;
                // Inverse-variance weights. The add-half smoothing keeps the
                // variance of a deterministic stratum (m = 0 or 1) small but
                // positive, so such strata act as near-exact constraints.
                const double smooth = (n0 + 0.5) / (n + 1.0);
                const double variance = 4.0 * smooth * (1.0 - smooth) / n;
                strata.push_back({a, bit, b, 1.0 / variance, 2.0 * m - 1.0, variance});
            }
        }
    }
    return fit(strata);
}

OmegaEstimate estimate_omega(const OutcomeProbabilities &probs) {
    std::vector<Stratum> strata;
    for (Basis a : kBases) {
        for (int bit = 0; bit < 2; ++bit) {
            for (Basis b : kBases) {
                const double p0 = probs.at(a, bit, b, 0);
                const double w = p0 + probs.at(a, bit, b, 1);
                if (!(w > 0.0)) throw InsufficientData("stratum " + stratum_key(a, bit, b) + " has zero probability");
                strata.push_back({a, bit, b, w, 2.0 * p0 / w - 1.0, 0.0});
            }
        }
    }
    return fit(strata);
}

namespace {

template <typename T>
JointDistribution matched_z_joint(const OutcomeTable<T> &table) {
    double total = 0.0;
    std::array<std::array<double, 2>, 2> p{};
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            p[x][y] = static_cast<double>(table.at(Basis::kZ, x, Basis::kZ, y));
            total += p[x][y];
        }
    }
    if (!(total > 0.0)) throw InsufficientData("no z-basis matched rounds");
    for (auto &row : p) {
        for (double &v : row) v /= total;
    }
    return JointDistribution(p);
}

}  // namespace

JointDistribution empirical_joint(const OutcomeCounts &counts) { return matched_z_joint(counts); }
JointDistribution empirical_joint(const OutcomeProbabilities &probs) { return matched_z_joint(probs); }

namespace {

EndToEndReport finish_report(const QubitChannel &ch, const ProtocolConfig &cfg, Reconciliation direction,
                             const OmegaEstimate &estimate, const JointDistribution &joint) {
    const SourceDistribution source(cfg.q);
    EndToEndReport report;
    report.estimate = estimate;
    ParamMetric metric = estimate.information;
    if (Eigen::LLT<ParamMetric>(metric).info() != Eigen::Success || !metric.allFinite()) {
        metric = ParamMetric::Identity();
    }
    const OmegaParams physical = nearest_physical(estimate.omega, metric, &report.projection_distance);
    report.estimated = key_rate(physical, source, direction, joint);
    report.truth = key_rate(ch, source, direction);
    return report;
}

}  // namespace

EndToEndReport end_to_end_rate(const QubitChannel &ch, const ProtocolConfig &cfg, Reconciliation direction,
                               const OutcomeCounts &counts) {
    cfg.validate();
    return finish_report(ch, cfg, direction, estimate_omega(counts), empirical_joint(counts));
}

EndToEndReport end_to_end_rate(const QubitChannel &ch, const ProtocolConfig &cfg, Reconciliation direction,
                               bool exact) {
    cfg.validate();
    if (exact) {
        const OutcomeProbabilities probs = exact_outcomes(ch, cfg);
        return finish_report(ch, cfg, direction, estimate_omega(probs), empirical_joint(probs));
    }
    return end_to_end_rate(ch, cfg, direction, simulate(ch, cfg));
}

}  // namespace bb84
