#include "bb84/entropy.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bb84/error.h"

namespace bb84 {

namespace {

// Eigenvalues below this are treated as exact zeros inside logarithms.
constexpr double kLogFloor = 1e-12;

double plogp(double x) { return x < kLogFloor ? 0.0 : -x * std::log2(x); }

// Drops values within rounding distance of zero before the table is validated.
double clean_probability(double v) { return (v < 0.0 && v > -1e-12) ? 0.0 : v; }

}  // namespace

SourceDistribution::SourceDistribution(double q) : q_(q) {
    if (!(q > 0.0 && q < 1.0)) {
        std::ostringstream os;
        os << "bit-0 probability q = " << q << " must lie in (0, 1)";
        throw DomainError(os.str());
    }
}

JointDistribution::JointDistribution(std::array<std::array<double, 2>, 2> p) : p_(p) {
    double total = 0.0;
    for (const auto &row : p_) {
        for (double v : row) {
            if (!(v >= 0.0)) throw DomainError("joint distribution has a negative entry");
            total += v;
        }
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError("joint distribution does not sum to 1");
}

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        std::ostringstream os;
        os << "binary entropy argument " << x << " outside [0, 1]";
        throw DomainError(os.str());
    }
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double shannon_entropy(std::span<const double> probs) {
    double h = 0.0;
    for (double p : probs) {
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

double hermitian_entropy(const MatrixXc &m) {
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(m, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd &evals = es.eigenvalues();
    if (evals.minCoeff() < -kPsdTolerance) {
        std::ostringstream os;
        os << "negative eigenvalue " << evals.minCoeff() << " in entropy evaluation";
        throw NonPhysicalState(os.str());
    }
    double h = 0.0;
    for (Eigen::Index i = 0; i < evals.size(); ++i) h += plogp(evals[i]);
    return h;
}

double von_neumann_entropy(const DensityMatrix &rho) { return hermitian_entropy(rho.matrix()); }

JointDistribution joint_distribution(const QubitChannel &ch, SourceDistribution source) {
    std::array<std::array<double, 2>, 2> p{};
    for (int x = 0; x < 2; ++x) {
        const BlochVector in{x == 0 ? 1.0 : -1.0, 0.0, 0.0};
        const double theta_z = apply_channel(ch, in).z;
        const double y0 = 0.5 * (1.0 + theta_z);
        p[x][0] = clean_probability(source.prob(x) * y0);
        p[x][1] = clean_probability(source.prob(x) * (1.0 - y0));
    }
    return JointDistribution(p);
}

double conditional_shannon(const JointDistribution &joint, Conditioning which) {
    const std::array<double, 4> cells{joint(0, 0), joint(0, 1), joint(1, 0), joint(1, 1)};
    std::array<double, 2> marginal{};
    if (which == Conditioning::kXGivenY) {
        marginal = {joint(0, 0) + joint(1, 0), joint(0, 1) + joint(1, 1)};
    } else {
        marginal = {joint(0, 0) + joint(0, 1), joint(1, 0) + joint(1, 1)};
    }
    return shannon_entropy(cells) - shannon_entropy(marginal);
}

double h_x_given_e(const KrausSet &kraus, SourceDistribution source) {
    constexpr int kEnv = kEnvironmentDim;
    MatrixXc rho_xe = MatrixXc::Zero(2 * kEnv, 2 * kEnv);
    Matrix4c rho_e = Matrix4c::Zero();
    for (int x = 0; x < 2; ++x) {
        Matrix2c basis = Matrix2c::Zero();
        basis(x, x) = 1.0;
        const Matrix4c block = source.prob(x) * complementary_output(kraus, basis);
        rho_xe.block<kEnv, kEnv>(x * kEnv, x * kEnv) = block;
        rho_e += block;
    }
    return hermitian_entropy(rho_xe) - hermitian_entropy(rho_e);
}

double h_x_given_e(const QubitChannel &ch, SourceDistribution source) {
    return h_x_given_e(choi_to_kraus(channel_to_choi(ch)), source);
}

Matrix4c bipartite_state(const QubitChannel &ch, SourceDistribution source) {
    const double amp[2] = {std::sqrt(source.q()), std::sqrt(1.0 - source.q())};
    Matrix4c rho = Matrix4c::Zero();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            Matrix2c unit = Matrix2c::Zero();
            unit(i, j) = 1.0;
            rho.block<2, 2>(2 * i, 2 * j) = amp[i] * amp[j] * apply_channel(ch, unit);
        }
    }
    return rho;
}

Eigen::VectorXcd purify(const MatrixXc &rho, int env_dim) {
    const Eigen::Index dim = rho.rows();
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(rho);
    const Eigen::VectorXd &evals = es.eigenvalues();
    if (evals.minCoeff() < -kPsdTolerance) throw NonPhysicalState("cannot purify a non-positive operator");
    // Eigenvalues are ascending; keep the env_dim largest.
    const Eigen::Index dropped = std::max<Eigen::Index>(0, dim - env_dim);
    for (Eigen::Index k = 0; k < dropped; ++k) {
        if (evals[k] > kLogFloor) throw InvalidInput("environment dimension is smaller than the rank");
    }
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim * env_dim);
    for (Eigen::Index k = dropped; k < dim; ++k) {
        const Eigen::Index e = k - dropped;
        const double weight = std::sqrt(std::max(evals[k], 0.0));
        for (Eigen::Index s = 0; s < dim; ++s) psi[s * env_dim + e] = weight * es.eigenvectors()(s, k);
    }
    return psi;
}

double h_y_given_e(const QubitChannel &ch, SourceDistribution source) {
    constexpr int kEnv = kEnvironmentDim;
    const Eigen::VectorXcd psi = purify(bipartite_state(ch, source), kEnv);

    // Measuring B in z kills the b != b' blocks of rho_BE, so only the
    // diagonal blocks of rho_YE are assembled.
    MatrixXc rho_ye = MatrixXc::Zero(2 * kEnv, 2 * kEnv);
    Matrix4c rho_e = Matrix4c::Zero();
    for (int b = 0; b < 2; ++b) {
        Matrix4c block = Matrix4c::Zero();
        for (int a = 0; a < 2; ++a) {
            const Eigen::Vector4cd slice = psi.segment<kEnv>((2 * a + b) * kEnv);
            block += slice * slice.adjoint();
        }
        rho_ye.block<kEnv, kEnv>(b * kEnv, b * kEnv) = block;
        rho_e += block;
    }
    return hermitian_entropy(rho_ye) - hermitian_entropy(rho_e);
}

}  // namespace bb84
