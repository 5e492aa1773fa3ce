#include "bb84/bb84sim.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "bb84/error.h"
#include "gtest/gtest.h"
#include "test_util.h"

using namespace bb84;

namespace {

constexpr Basis kZb = Basis::kZ;
constexpr Basis kXb = Basis::kX;

ProtocolConfig config(double q, std::uint64_t shots, std::uint64_t seed, unsigned partitions = 1) {
    ProtocolConfig cfg;
    cfg.q = q;
    cfg.shots = shots;
    cfg.seed = seed;
    cfg.partitions = partitions;
    return cfg;
}

double frequency_zero(const OutcomeCounts &c, Basis a, int bit, Basis b) {
    const double n0 = static_cast<double>(c.at(a, bit, b, 0));
    return n0 / (n0 + static_cast<double>(c.at(a, bit, b, 1)));
}

std::array<double, 6> as_array(const OmegaParams &w) { return {w.r_zz, w.r_zx, w.r_xz, w.r_xx, w.t_z, w.t_x}; }

double max_abs_error(const OmegaParams &a, const OmegaParams &b) {
    const auto x = as_array(a);
    const auto y = as_array(b);
    double m = 0.0;
    for (int k = 0; k < 6; ++k) m = std::max(m, std::abs(x[k] - y[k]));
    return m;
}

// Single-threaded replay of the partitioned streams, written against the
// documented draw order: alice basis, bit, bob basis, outcome.
OutcomeCounts sequential_replay(const QubitChannel &ch, const ProtocolConfig &cfg) {
    OutcomeCounts counts;
    for (unsigned part = 0; part < cfg.partitions; ++part) {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32), part};
        std::mt19937_64 gen(seq);
        auto u = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
        const std::uint64_t n = cfg.shots / cfg.partitions + (part < cfg.shots % cfg.partitions ? 1 : 0);
        for (std::uint64_t i = 0; i < n; ++i) {
            const Basis a = u() < cfg.basis_prob_z ? kZb : kXb;
            const int bit = u() < cfg.q ? 0 : 1;
            const Basis b = u() < cfg.basis_prob_z ? kZb : kXb;
            const double s = bit == 0 ? 1.0 : -1.0;
            const BlochVector in = a == kZb ? BlochVector{s, 0, 0} : BlochVector{0, s, 0};
            const BlochVector out = apply_channel(ch, in);
            const double p0 = 0.5 * (1.0 + (b == kZb ? out.z : out.x));
            ++counts.at(a, bit, b, u() < p0 ? 0 : 1);
        }
    }
    return counts;
}

}  // namespace

TEST(ProtocolConfig, Validation) {
    EXPECT_THROW(config(0.0, 10, 1).validate(), DomainError);
    EXPECT_THROW(config(1.0, 10, 1).validate(), DomainError);
    EXPECT_THROW(config(0.5, 0, 1).validate(), DomainError);
    EXPECT_THROW(config(0.5, 10, 1, 0).validate(), DomainError);
    ProtocolConfig cfg = config(0.5, 10, 1);
    cfg.basis_prob_z = 1.0;
    EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(StratumKey, Format) {
    EXPECT_EQ(stratum_key(kZb, 0, kXb), "z0x");
    EXPECT_EQ(stratum_key(kXb, 1, kZb), "x1z");
}

TEST(Simulate, Reproducible) {
    const QubitChannel ch = QubitChannel::amplitude_damping(0.3);
    const ProtocolConfig cfg = config(0.4, 20000, 99);
    EXPECT_EQ(simulate(ch, cfg).cells, simulate(ch, cfg).cells);
    EXPECT_NE(simulate(ch, cfg).cells, simulate(ch, config(0.4, 20000, 100)).cells);
}

TEST(Simulate, PartitionsMatchSequentialReplay) {
    const QubitChannel ch = QubitChannel::amplitude_damping(0.45);
    for (unsigned parts : {1u, 3u, 8u}) {
        const ProtocolConfig cfg = config(0.35, 10007, 0x123456789abcULL, parts);
        const OutcomeCounts counts = simulate(ch, cfg);
        EXPECT_EQ(counts.cells, sequential_replay(ch, cfg).cells) << parts;
        EXPECT_EQ(counts.total(), cfg.shots);
    }
}

TEST(Simulate, IdentityMatchedBasisOutcomeEqualsBit) {
    const OutcomeCounts c = simulate(QubitChannel::identity(), config(0.5, 50000, 5));
    for (Basis b : {kZb, kXb}) {
        for (int bit = 0; bit < 2; ++bit) {
            EXPECT_GT(c.at(b, bit, b, bit), 0u);
            EXPECT_EQ(c.at(b, bit, b, 1 - bit), 0u);
        }
    }
}

TEST(Simulate, DampingBinomialFrequencies) {
    const double p = 0.3;
    const OutcomeCounts c = simulate(QubitChannel::amplitude_damping(p), config(0.5, 100000, 17));
    auto check = [&](Basis a, int bit, Basis b, double expected) {
        const double n = static_cast<double>(c.at(a, bit, b, 0) + c.at(a, bit, b, 1));
        const double sigma = std::sqrt(expected * (1 - expected) / n);
        EXPECT_NEAR(frequency_zero(c, a, bit, b), expected, 3 * sigma) << stratum_key(a, bit, b);
    };
    check(kZb, 1, kZb, p);
    check(kXb, 0, kZb, (1 + p) / 2);
    check(kZb, 0, kZb, 1.0);
}

TEST(Simulate, StratumMarginals) {
    ProtocolConfig cfg = config(0.3, 200000, 23);
    cfg.basis_prob_z = 0.7;
    const OutcomeCounts c = simulate(QubitChannel::amplitude_damping(0.2), cfg);
    const double n = static_cast<double>(cfg.shots);
    double alice_z = 0, bit0 = 0, bob_z = 0;
    for (Basis a : {kZb, kXb}) {
        for (int bit = 0; bit < 2; ++bit) {
            for (Basis b : {kZb, kXb}) {
                const double cell = static_cast<double>(c.at(a, bit, b, 0) + c.at(a, bit, b, 1));
                if (a == kZb) alice_z += cell;
                if (bit == 0) bit0 += cell;
                if (b == kZb) bob_z += cell;
            }
        }
    }
    auto within = [&](double count, double prob) {
        EXPECT_NEAR(count / n, prob, 3 * std::sqrt(prob * (1 - prob) / n));
    };
    within(alice_z, 0.7);
    within(bit0, 0.3);
    within(bob_z, 0.7);
}

TEST(ExactOutcomes, SumToOne) {
    const OutcomeProbabilities probs = exact_outcomes(QubitChannel::amplitude_damping(0.6), config(0.2, 1, 0));
    EXPECT_NEAR(probs.total(), 1.0, 1e-15);
    for (double cell : probs.cells) EXPECT_GE(cell, 0.0);
}

TEST(EstimateOmega, ExactDampingFrequencies) {
    const OmegaEstimate est =
        estimate_omega(exact_outcomes(QubitChannel::amplitude_damping(0.3), config(0.5, 1, 0)));
    const std::array<double, 6> expected{0.7, 0.0, 0.0, std::sqrt(0.7), 0.3, 0.0};
    const std::array<double, 6> got = as_array(est.omega);
    for (int k = 0; k < 6; ++k) {
        EXPECT_NEAR(got[k], expected[k], 1e-12) << k;
        EXPECT_EQ(est.std_err[k], 0.0);
    }
}

TEST(EstimateOmega, ExactFrequenciesRecoverRandomChannels) {
    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> uq(0.05, 0.95);
    for (int i = 0; i < 100; ++i) {
        const QubitChannel ch = testutil::random_channel(gen);
        ProtocolConfig cfg = config(uq(gen), 1, 0);
        cfg.basis_prob_z = uq(gen);
        const OmegaEstimate est = estimate_omega(exact_outcomes(ch, cfg));
        EXPECT_LT(max_abs_error(est.omega, OmegaParams::from_channel(ch)), 1e-12);
    }
}

TEST(EstimateOmega, IdentityWithinThreeStandardErrors) {
    const OmegaEstimate est = estimate_omega(simulate(QubitChannel::identity(), config(0.5, 1000000, 2024, 4)));
    const std::array<double, 6> truth{1, 0, 0, 1, 0, 0};
    const std::array<double, 6> got = as_array(est.omega);
    for (int k = 0; k < 6; ++k) {
        EXPECT_GE(est.std_err[k], 0.0);
        EXPECT_LE(std::abs(got[k] - truth[k]), 3 * est.std_err[k]) << k;
    }
}

TEST(EstimateOmega, DampingWithinThreeStandardErrors) {
    const OmegaEstimate est =
        estimate_omega(simulate(QubitChannel::amplitude_damping(0.3), config(0.5, 1000000, 7, 4)));
    const std::array<double, 6> truth{0.7, 0.0, 0.0, std::sqrt(0.7), 0.3, 0.0};
    const std::array<double, 6> got = as_array(est.omega);
    for (int k = 0; k < 6; ++k) {
        EXPECT_GT(est.std_err[k], 0.0);
        EXPECT_LE(std::abs(got[k] - truth[k]), 3 * est.std_err[k]) << k;
    }
}

TEST(EstimateOmega, EmptyStratum) {
    OutcomeCounts counts;
    for (auto &cell : counts.cells) cell = 10;
    counts.at(kXb, 1, kZb, 0) = 0;
    counts.at(kXb, 1, kZb, 1) = 0;
    EXPECT_THROW(estimate_omega(counts), InsufficientData);
    EXPECT_THROW(estimate_omega(OutcomeCounts{}), InsufficientData);
}

TEST(EstimateOmega, ErrorShrinksWithShots) {
    const QubitChannel ch = QubitChannel::amplitude_damping(0.3);
    const OmegaParams truth = OmegaParams::from_channel(ch);
    std::vector<double> ratios;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const double small = max_abs_error(estimate_omega(simulate(ch, config(0.5, 10000, seed))).omega, truth);
        const double large =
            max_abs_error(estimate_omega(simulate(ch, config(0.5, 1000000, seed + 1000, 4))).omega, truth);
        ratios.push_back(small / large);
    }
    std::nth_element(ratios.begin(), ratios.begin() + 10, ratios.end());
    const double median = ratios[10];
    EXPECT_GE(median, 5.0);
    EXPECT_LE(median, 20.0);
}

TEST(EmpiricalJoint, ExactMatchesModel) {
    const QubitChannel ch = QubitChannel::amplitude_damping(0.4);
    const JointDistribution j = empirical_joint(exact_outcomes(ch, config(0.3, 1, 0)));
    const JointDistribution expected = joint_distribution(ch, SourceDistribution(0.3));
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) EXPECT_NEAR(j(x, y), expected(x, y), 1e-14);
    }
}

TEST(EndToEnd, DampingReverseNearClosedForm) {
    const EndToEndReport r =
        end_to_end_rate(QubitChannel::amplitude_damping(0.2), config(0.5, 1000000, 11, 4), Reconciliation::kReverse);
    const double expected = closed_form_rate(0.2, 0.5, Reconciliation::kReverse);
    EXPECT_NEAR(r.estimated.rate, expected, 0.01);
    EXPECT_NEAR(r.truth.rate, expected, 1e-8);
    EXPECT_GE(r.projection_distance, 0.0);
}

TEST(EndToEnd, ExactModeMatchesKeyRate) {
    std::mt19937_64 gen(3);
    for (double p : {0.0, 0.2, 0.55, 0.9}) {
        for (Reconciliation dir : {Reconciliation::kDirect, Reconciliation::kReverse}) {
            const EndToEndReport r = end_to_end_rate(QubitChannel::amplitude_damping(p), config(0.4, 1, 0), dir, true);
            const KeyRateReport direct = key_rate(QubitChannel::amplitude_damping(p), SourceDistribution(0.4), dir);
            EXPECT_NEAR(r.estimated.rate, direct.rate, 1e-8) << p;
            EXPECT_EQ(r.projection_distance, 0.0);
        }
    }
    for (int i = 0; i < 10; ++i) {
        const QubitChannel ch = testutil::random_channel(gen);
        const EndToEndReport r = end_to_end_rate(ch, config(0.6, 1, 0), Reconciliation::kDirect, true);
        EXPECT_NEAR(r.estimated.rate, r.truth.rate, 1e-8);
    }
}

TEST(EndToEnd, IdentityNearBinaryEntropy) {
    const EndToEndReport r =
        end_to_end_rate(QubitChannel::identity(), config(0.3, 1000000, 8, 4), Reconciliation::kDirect);
    EXPECT_NEAR(r.estimated.rate, binary_entropy(0.3), 0.01);
}
