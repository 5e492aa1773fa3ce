#include "bb84/channel.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <sstream>

#include "bb84/error.h"

namespace bb84 {

namespace {

using cd = std::complex<double>;

const std::array<Matrix2c, 3> &paulis() {
    static const std::array<Matrix2c, 3> kPaulis = [] {
        std::array<Matrix2c, 3> s;
        s[kZ] << 1.0, 0.0, 0.0, -1.0;
        s[kX] << 0.0, 1.0, 1.0, 0.0;
        s[kY] << 0.0, cd(0.0, -1.0), cd(0.0, 1.0), 0.0;
        return s;
    }();
    return kPaulis;
}

// Square root of the inverse of a positive definite 2x2 matrix.
Matrix2c inverse_sqrt(const Matrix2c &s) {
    Eigen::SelfAdjointEigenSolver<Matrix2c> es(s);
    Eigen::Vector2d inv = es.eigenvalues().cwiseSqrt().cwiseInverse();
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double BlochVector::norm() const { return std::sqrt(z * z + x * x + y * y); }

DensityMatrix::DensityMatrix(MatrixXc entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
        throw NonPhysicalState("density matrix must be square and nonempty");
    }
    const double herm = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-12) {
        std::ostringstream os;
        os << "matrix is not Hermitian (defect " << herm << ")";
        throw NonPhysicalState(os.str());
    }
    const double trace = entries_.trace().real();
    if (std::abs(trace - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "trace " << trace << " differs from 1";
        throw NonPhysicalState(os.str());
    }
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(entries_, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -kPsdTolerance) {
        std::ostringstream os;
        os << "negative eigenvalue " << min_eig;
        throw NonPhysicalState(os.str());
    }
}

QubitChannel QubitChannel::amplitude_damping(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("amplitude damping parameter must lie in [0, 1]");
    }
    QubitChannel ch;
    const double s = std::sqrt(1.0 - p);
    ch.R = Eigen::Vector3d(1.0 - p, s, s).asDiagonal();
    ch.t = Eigen::Vector3d(p, 0.0, 0.0);
    return ch;
}

double KrausSet::completeness_defect() const {
    Matrix2c sum = Matrix2c::Zero();
    for (const auto &k : operators) sum += k.adjoint() * k;
    return (sum - Matrix2c::Identity()).cwiseAbs().maxCoeff();
}

BlochVector apply_channel(const QubitChannel &ch, const BlochVector &v) {
    return BlochVector::from_vector(ch.R * v.as_vector() + ch.t);
}

Matrix2c apply_channel(const QubitChannel &ch, const Matrix2c &op) {
    const auto &s = paulis();
    const cd m0 = op.trace();
    Eigen::Vector3cd m;
    for (int a = 0; a < 3; ++a) m[a] = (s[a] * op).trace();
    const Eigen::Vector3cd out = ch.R.cast<cd>() * m + m0 * ch.t.cast<cd>();
    Matrix2c result = m0 * Matrix2c::Identity();
    for (int a = 0; a < 3; ++a) result += out[a] * s[a];
    return 0.5 * result;
}

DensityMatrix bloch_to_density(const BlochVector &v) {
    if (v.norm() > 1.0 + kBlochSlack) {
        std::ostringstream os;
        os << "Bloch vector norm " << v.norm() << " exceeds 1";
        throw NonPhysicalState(os.str());
    }
    const auto &s = paulis();
    Matrix2c rho = Matrix2c::Identity() + v.z * s[kZ] + v.x * s[kX] + v.y * s[kY];
    return DensityMatrix(0.5 * rho);
}

BlochVector density_to_bloch(const DensityMatrix &rho) {
    if (rho.dim() != 2) throw NonPhysicalState("Bloch vectors describe qubit states only");
    const auto &s = paulis();
    const Matrix2c m = rho.matrix();
    return {(s[kZ] * m).trace().real(), (s[kX] * m).trace().real(), (s[kY] * m).trace().real()};
}

ChoiState channel_to_choi(const QubitChannel &ch) {
    ChoiState choi;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            Matrix2c unit = Matrix2c::Zero();
            unit(i, j) = 1.0;
            choi.entries.block<2, 2>(2 * i, 2 * j) = 0.5 * apply_channel(ch, unit);
        }
    }
    return choi;
}

TpcpDiagnostics is_tpcp(const QubitChannel &ch) {
    const ChoiState choi = channel_to_choi(ch);
    TpcpDiagnostics diag;
    Eigen::SelfAdjointEigenSolver<Matrix4c> es(choi.entries, Eigen::EigenvaluesOnly);
    diag.min_eigenvalue = es.eigenvalues().minCoeff();
    Matrix2c reduced;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            reduced(i, j) = choi.entries(2 * i, 2 * j) + choi.entries(2 * i + 1, 2 * j + 1);
        }
    }
    diag.trace_defect = (reduced - 0.5 * Matrix2c::Identity()).cwiseAbs().maxCoeff();
    diag.valid = diag.min_eigenvalue >= -kPsdTolerance && diag.trace_defect <= kPsdTolerance;
    return diag;
}

KrausSet choi_to_kraus(const ChoiState &choi) {
    Eigen::SelfAdjointEigenSolver<Matrix4c> es(choi.entries);
    const Eigen::Vector4d &evals = es.eigenvalues();
    if (evals.minCoeff() < -kPsdTolerance) {
        std::ostringstream os;
        os << "Choi state has eigenvalue " << evals.minCoeff();
        throw InvalidChoi(os.str());
    }
    KrausSet kraus;
    // Largest eigenvalue first so the dominant operator leads.
    for (int k = 3; k >= 0; --k) {
        if (evals[k] < kPsdTolerance) continue;
        const double scale = std::sqrt(2.0 * evals[k]);
        Matrix2c op;
        for (int i = 0; i < 2; ++i) {
            for (int a = 0; a < 2; ++a) op(a, i) = scale * es.eigenvectors()(2 * i + a, k);
        }
        kraus.operators.push_back(op);
    }
    if (kraus.operators.empty()) throw InvalidChoi("Choi state is numerically zero");

    // Dropped eigenvalues leave a completeness defect of the same order;
    // restore sum K^dagger K = I exactly.
    Matrix2c sum = Matrix2c::Zero();
    for (const auto &k : kraus.operators) sum += k.adjoint() * k;
    if ((sum - Matrix2c::Identity()).cwiseAbs().maxCoeff() > 1e-15) {
        const Matrix2c fix = inverse_sqrt(sum);
        for (auto &k : kraus.operators) k = k * fix;
    }
    return kraus;
}

Matrix2c apply_kraus(const KrausSet &kraus, const Matrix2c &rho) {
    Matrix2c out = Matrix2c::Zero();
    for (const auto &k : kraus.operators) out += k * rho * k.adjoint();
    return out;
}

QubitChannel kraus_to_channel(const KrausSet &kraus) {
    const auto &s = paulis();
    QubitChannel ch;
    const Matrix2c image_of_identity = apply_kraus(kraus, Matrix2c::Identity());
    for (int a = 0; a < 3; ++a) {
        ch.t[a] = 0.5 * (s[a] * image_of_identity).trace().real();
        for (int b = 0; b < 3; ++b) {
            ch.R(a, b) = 0.5 * (s[a] * apply_kraus(kraus, s[b])).trace().real();
        }
    }
    return ch;
}

Matrix4c complementary_output(const KrausSet &kraus, const Matrix2c &rho) {
    const auto n = static_cast<int>(kraus.operators.size());
    if (n > kEnvironmentDim) throw InvalidInput("at most four Kraus operators are supported");
    Matrix4c env = Matrix4c::Zero();
    for (int i = 0; i < n; ++i) {
        const Matrix2c left = kraus.operators[i] * rho;
        for (int j = 0; j < n; ++j) {
            env(i, j) = (left * kraus.operators[j].adjoint()).trace();
        }
    }
    return env;
}

DensityMatrix complementary_channel(const KrausSet &kraus, const DensityMatrix &rho) {
    if (rho.dim() != 2) throw NonPhysicalState("complementary channel takes a qubit state");
    return DensityMatrix(complementary_output(kraus, rho.matrix()));
}

}  // namespace bb84
