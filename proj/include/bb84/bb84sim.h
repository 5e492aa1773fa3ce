#ifndef BB84_BB84SIM_H_
#define BB84_BB84SIM_H_

#include <array>
#include <cstdint>
#include <string>

#include "bb84/channel.h"
#include "bb84/keyrate.h"

namespace bb84 {

enum class Basis { kZ = 0, kX = 1 };

struct ProtocolConfig {
    double q = 0.5;             // probability of bit 0, in both bases
    double basis_prob_z = 0.5;  // shared by Alice and Bob
    std::uint64_t shots = 1;
    std::uint64_t seed = 0;
    // Shots are split into this many independent streams, each seeded from
    // (seed, partition index). Results depend on the partition count.
    unsigned partitions = 1;

    // Throws DomainError on out-of-range fields.
    void validate() const;
};

// Cell index layout: ((alice_basis * 2 + bit) * 2 + bob_basis) * 2 + outcome.
template <typename T>
struct OutcomeTable {
    std::array<T, 16> cells{};

    static constexpr std::size_t index(Basis alice, int bit, Basis bob, int outcome) {
        return ((static_cast<std::size_t>(alice) * 2 + bit) * 2 + static_cast<std::size_t>(bob)) * 2 + outcome;
    }
    T &at(Basis alice, int bit, Basis bob, int outcome) { return cells[index(alice, bit, bob, outcome)]; }
    const T &at(Basis alice, int bit, Basis bob, int outcome) const { return cells[index(alice, bit, bob, outcome)]; }
    T total() const {
        T sum{};
        for (const T &c : cells) sum += c;
        return sum;
    }
};

using OutcomeCounts = OutcomeTable<std::uint64_t>;
// Infinite-shot limit: cell probabilities summing to 1.
using OutcomeProbabilities = OutcomeTable<double>;

// Stratum key such as "z0x" (alice basis, bit, bob basis).
std::string stratum_key(Basis alice, int bit, Basis bob);

struct OmegaEstimate {
    OmegaParams omega;
    // Standard errors in the order r_zz, r_zx, r_xz, r_xx, t_z, t_x.
    std::array<double, 6> std_err{};
    // Inverse covariance of the estimate in the same order; zero when the
    // input had no sampling noise.
    ParamMetric information = ParamMetric::Zero();
};

OutcomeCounts simulate(const QubitChannel &ch, const ProtocolConfig &cfg);
OutcomeProbabilities exact_outcomes(const QubitChannel &ch, const ProtocolConfig &cfg);

// Inverse-variance weighted least squares over the eight (alice basis, bit,
// bob basis) strata with t_z and t_x shared; binomial standard errors.
// Throws InsufficientData if a stratum is empty.
OmegaEstimate estimate_omega(const OutcomeCounts &counts);
// Same fit on exact probabilities; standard errors are zero.
OmegaEstimate estimate_omega(const OutcomeProbabilities &probs);

// z-basis preparation / z-basis measurement table, normalized.
JointDistribution empirical_joint(const OutcomeCounts &counts);
JointDistribution empirical_joint(const OutcomeProbabilities &probs);

struct EndToEndReport {
    KeyRateReport estimated;
    KeyRateReport truth;
    OmegaEstimate estimate;
    // Mahalanobis distance from the estimate to the completable parameters
    // the rate was computed on (0 when the estimate was already completable).
    double projection_distance = 0.0;
};

// simulate -> estimate_omega -> nearest_physical -> worst-case rate, next to the
// rate of the true channel. With exact = true the sampling step is replaced
// by exact_outcomes.
EndToEndReport end_to_end_rate(const QubitChannel &ch, const ProtocolConfig &cfg, Reconciliation direction,
                               bool exact = false);

// Estimation and rate stages only, on counts already simulated with cfg.
EndToEndReport end_to_end_rate(const QubitChannel &ch, const ProtocolConfig &cfg, Reconciliation direction,
                               const OutcomeCounts &counts);

}  // namespace bb84

#endif  // BB84_BB84SIM_H_
