#include "bb84/entropy.h"

#include <cmath>
#include <random>

#include "bb84/error.h"
#include "gtest/gtest.h"
#include "test_util.h"

using namespace bb84;

namespace {

// Independent closed forms for amplitude damping, written directly from the
// binary entropy so they share no code with the entropic path.
double h2(double x) { return (x <= 0.0 || x >= 1.0) ? 0.0 : -x * std::log2(x) - (1 - x) * std::log2(1 - x); }
double damping_h_x_given_e(double p, double q) {
    const double u = p * (1 - q);
    const double h_x_given_y = h2(q) + (1 - q) * h2(p) - h2(q + u);
    return h2(q + u) - h2(u) + h_x_given_y;
}
double damping_h_y_given_e(double p, double q) {
    const double h_y_given_x = (1 - q) * h2(p);
    return h2(q) - h2(p * (1 - q)) + h_y_given_x;
}

}  // namespace

TEST(BinaryEntropy, Examples) {
    EXPECT_DOUBLE_EQ(binary_entropy(0.5), 1.0);
    EXPECT_EQ(binary_entropy(0.0), 0.0);
    EXPECT_EQ(binary_entropy(1.0), 0.0);
    EXPECT_NEAR(binary_entropy(0.25), 0.811278124459132864, 1e-15);
}

TEST(BinaryEntropy, DomainError) {
    EXPECT_THROW(binary_entropy(-0.01), DomainError);
    EXPECT_THROW(binary_entropy(1.01), DomainError);
    EXPECT_THROW(binary_entropy(std::nan("")), DomainError);
}

TEST(SourceDistribution, RejectsEndpoints) {
    EXPECT_THROW(SourceDistribution(0.0), DomainError);
    EXPECT_THROW(SourceDistribution(1.0), DomainError);
    EXPECT_NO_THROW(SourceDistribution(0.3));
}

TEST(VonNeumannEntropy, Examples) {
    EXPECT_NEAR(von_neumann_entropy(bloch_to_density({0, 0, 0})), 1.0, 1e-14);
    EXPECT_NEAR(von_neumann_entropy(bloch_to_density({0, 1, 0})), 0.0, 1e-14);
    EXPECT_NEAR(von_neumann_entropy(bloch_to_density({0.6, 0, 0})), 0.721928094887362348, 1e-14);
}

TEST(JointDistribution, IdentityChannel) {
    const JointDistribution j = joint_distribution(QubitChannel::identity(), SourceDistribution(0.5));
    EXPECT_DOUBLE_EQ(j(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(j(1, 1), 0.5);
    EXPECT_EQ(j(0, 1), 0.0);
    EXPECT_EQ(j(1, 0), 0.0);
}

TEST(JointDistribution, AmplitudeDamping) {
    const double p = 0.3;
    const double q = 0.6;
    const JointDistribution j = joint_distribution(QubitChannel::amplitude_damping(p), SourceDistribution(q));
    EXPECT_NEAR(j(0, 0), q, 1e-15);
    EXPECT_NEAR(j(0, 1), 0.0, 1e-15);
    EXPECT_NEAR(j(1, 0), (1 - q) * p, 1e-15);
    EXPECT_NEAR(j(1, 1), (1 - q) * (1 - p), 1e-15);

    const JointDistribution full = joint_distribution(QubitChannel::amplitude_damping(1.0), SourceDistribution(q));
    EXPECT_NEAR(full(0, 1) + full(1, 1), 0.0, 1e-15);
}

TEST(JointDistribution, RejectsBadTables) {
    EXPECT_THROW(JointDistribution({{{0.5, 0.5}, {0.5, 0.0}}}), DomainError);
    EXPECT_THROW(JointDistribution({{{1.1, -0.1}, {0.0, 0.0}}}), DomainError);
}

TEST(ConditionalShannon, Examples) {
    const JointDistribution diag({{{0.5, 0.0}, {0.0, 0.5}}});
    EXPECT_NEAR(conditional_shannon(diag, Conditioning::kXGivenY), 0.0, 1e-15);
    EXPECT_NEAR(conditional_shannon(diag, Conditioning::kYGivenX), 0.0, 1e-15);
    const JointDistribution uniform({{{0.25, 0.25}, {0.25, 0.25}}});
    EXPECT_NEAR(conditional_shannon(uniform, Conditioning::kXGivenY), 1.0, 1e-15);
    EXPECT_NEAR(conditional_shannon(uniform, Conditioning::kYGivenX), 1.0, 1e-15);

    const JointDistribution damped = joint_distribution(QubitChannel::amplitude_damping(0.5), SourceDistribution(0.5));
    EXPECT_NEAR(conditional_shannon(damped, Conditioning::kYGivenX), 0.5, 1e-15);
    // Table {0.5, 0, 0.25, 0.25}: H(XY) - H(Y) = 1.5 - h(0.75), by enumeration.
    EXPECT_NEAR(conditional_shannon(damped, Conditioning::kXGivenY), 0.688721875540867136, 1e-14);
}

TEST(HXGivenE, Examples) {
    for (double q : {0.1, 0.3, 0.5, 0.8}) {
        EXPECT_NEAR(h_x_given_e(QubitChannel::identity(), SourceDistribution(q)), binary_entropy(q), 1e-12);
        EXPECT_NEAR(h_x_given_e(QubitChannel::amplitude_damping(1.0), SourceDistribution(q)), 0.0, 1e-12);
    }
    // Direct rate is 0 here, so H(X|E) equals H(X|Y) = 1.5 - h(0.75).
    EXPECT_NEAR(h_x_given_e(QubitChannel::amplitude_damping(0.5), SourceDistribution(0.5)), 0.688721875540867136,
                1e-12);
}

TEST(HYGivenE, Examples) {
    for (double q : {0.1, 0.3, 0.5, 0.8}) {
        EXPECT_NEAR(h_y_given_e(QubitChannel::identity(), SourceDistribution(q)), binary_entropy(q), 1e-12);
    }
    EXPECT_NEAR(h_y_given_e(QubitChannel::amplitude_damping(0.0), SourceDistribution(0.3)), 0.881290899230692618,
                1e-12);
    EXPECT_NEAR(h_y_given_e(QubitChannel::amplitude_damping(0.5), SourceDistribution(0.5)), 0.688721875540867136,
                1e-12);
}

TEST(EntropyProperties, ConditioningBounds) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> uq(0.02, 0.98);
    for (int i = 0; i < 100; ++i) {
        const QubitChannel ch = testutil::random_channel(gen);
        const SourceDistribution source(uq(gen));
        const JointDistribution joint = joint_distribution(ch, source);
        const double h_x = binary_entropy(source.q());
        const double h_y = binary_entropy(joint(0, 0) + joint(1, 0));
        const double hxe = h_x_given_e(ch, source);
        const double hye = h_y_given_e(ch, source);
        EXPECT_GE(hxe, -1e-10);
        EXPECT_LE(hxe, h_x + 1e-10);
        EXPECT_GE(hye, -1e-10);
        EXPECT_LE(hye, h_y + 1e-10);
    }
}

TEST(EntropyProperties, PurificationIsPureAndReducesBack) {
    std::mt19937_64 gen(12);
    for (int i = 0; i < 50; ++i) {
        const QubitChannel ch = testutil::random_channel(gen);
        const Matrix4c rho_ab = bipartite_state(ch, SourceDistribution(0.37));
        const Eigen::VectorXcd psi = purify(rho_ab, kEnvironmentDim);
        EXPECT_NEAR(psi.squaredNorm(), 1.0, 1e-12);
        EXPECT_LT(hermitian_entropy(psi * psi.adjoint()), 1e-10);
        Matrix4c reduced = Matrix4c::Zero();
        for (int s = 0; s < 4; ++s) {
            for (int t = 0; t < 4; ++t) {
                for (int e = 0; e < kEnvironmentDim; ++e) {
                    reduced(s, t) += psi[s * kEnvironmentDim + e] * std::conj(psi[t * kEnvironmentDim + e]);
                }
            }
        }
        EXPECT_LT((reduced - rho_ab).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(EntropyProperties, DampingClosedFormAgreement) {
    for (int i = 0; i <= 9; ++i) {
        const double p = 0.1 * i;
        for (int k = 1; k <= 9; ++k) {
            const double q = 0.1 * k;
            const QubitChannel ch = QubitChannel::amplitude_damping(p);
            EXPECT_NEAR(h_x_given_e(ch, SourceDistribution(q)), damping_h_x_given_e(p, q), 1e-8) << p << " " << q;
            EXPECT_NEAR(h_y_given_e(ch, SourceDistribution(q)), damping_h_y_given_e(p, q), 1e-8) << p << " " << q;
        }
    }
}

TEST(EntropyProperties, KrausUnitaryFreedom) {
    std::mt19937_64 gen(13);
    for (int i = 0; i < 50; ++i) {
        const QubitChannel ch = testutil::random_channel(gen);
        const SourceDistribution source(0.2 + 0.006 * i);
        KrausSet kraus = choi_to_kraus(channel_to_choi(ch));
        kraus.operators.resize(kEnvironmentDim, Matrix2c::Zero());
        const Eigen::MatrixXcd u = testutil::random_unitary(gen, kEnvironmentDim);
        KrausSet rotated;
        for (int a = 0; a < kEnvironmentDim; ++a) {
            Matrix2c op = Matrix2c::Zero();
            for (int b = 0; b < kEnvironmentDim; ++b) op += u(a, b) * kraus.operators[b];
            rotated.operators.push_back(op);
        }
        EXPECT_LT(rotated.completeness_defect(), 1e-12);
        EXPECT_NEAR(h_x_given_e(rotated, source), h_x_given_e(ch, source), 1e-9);
    }
}
