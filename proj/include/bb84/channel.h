#ifndef BB84_CHANNEL_H_
#define BB84_CHANNEL_H_

#include <Eigen/Dense>
#include <vector>

namespace bb84 {

using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;
using MatrixXc = Eigen::MatrixXcd;

// Stokes components are always stored in (z, x, y) order.
inline constexpr int kZ = 0;
inline constexpr int kX = 1;
inline constexpr int kY = 2;

// Slack on |v| <= 1 for vectors that represent physical states.
inline constexpr double kBlochSlack = 1e-12;
// Eigenvalues in [-kPsdTolerance, 0) are numerical noise; below that is a violation.
inline constexpr double kPsdTolerance = 1e-10;

struct BlochVector {
    double z = 0.0;
    double x = 0.0;
    double y = 0.0;

    double norm() const;
    Eigen::Vector3d as_vector() const { return {z, x, y}; }
    static BlochVector from_vector(const Eigen::Vector3d &v) { return {v[kZ], v[kX], v[kY]}; }
};

// Hermitian, unit-trace, positive semidefinite operator. Construction checks
// the invariants and throws NonPhysicalState when they fail.
class DensityMatrix {
  public:
    explicit DensityMatrix(MatrixXc entries);

    const MatrixXc &matrix() const { return entries_; }
    Eigen::Index dim() const { return entries_.rows(); }

  private:
    MatrixXc entries_;
};

// Affine Stokes map v -> R v + t. Rows and columns of R are in (z, x, y) order.
struct QubitChannel {
    Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
    Eigen::Vector3d t = Eigen::Vector3d::Zero();

    static QubitChannel identity() { return {}; }
    // Decay |1> -> |0> with probability p. Throws DomainError outside [0, 1].
    static QubitChannel amplitude_damping(double p);
};

// (I (x) E)(|Phi><Phi|) with |Phi> = (|00> + |11>)/sqrt(2). The reference
// (channel input) factor comes first: row index = 2 * ref + out.
struct ChoiState {
    Matrix4c entries = Matrix4c::Zero();
};

struct KrausSet {
    std::vector<Matrix2c> operators;

    // max |sum K^dagger K - I|
    double completeness_defect() const;
};

struct TpcpDiagnostics {
    bool valid = false;
    double min_eigenvalue = 0.0;
    // max |tr_out(Choi) - I/2|
    double trace_defect = 0.0;
};

BlochVector apply_channel(const QubitChannel &ch, const BlochVector &v);

// Linear extension of the channel to arbitrary 2x2 operators.
Matrix2c apply_channel(const QubitChannel &ch, const Matrix2c &op);

DensityMatrix bloch_to_density(const BlochVector &v);
BlochVector density_to_bloch(const DensityMatrix &rho);

ChoiState channel_to_choi(const QubitChannel &ch);
TpcpDiagnostics is_tpcp(const QubitChannel &ch);

// Eigendecomposition of the Choi state; eigenvalues below kPsdTolerance are
// dropped. Throws InvalidChoi when the minimum eigenvalue is below -kPsdTolerance.
KrausSet choi_to_kraus(const ChoiState &choi);

// Reads the affine form back off a Kraus set.
QubitChannel kraus_to_channel(const KrausSet &kraus);

Matrix2c apply_kraus(const KrausSet &kraus, const Matrix2c &rho);

// Environment dimension of complementary_channel outputs.
inline constexpr int kEnvironmentDim = 4;

// [E_E(rho)]_ij = tr(K_i rho K_j^dagger), zero-padded to kEnvironmentDim.
DensityMatrix complementary_channel(const KrausSet &kraus, const DensityMatrix &rho);

// Same as above without the output validation; used in inner loops.
Matrix4c complementary_output(const KrausSet &kraus, const Matrix2c &rho);

}  // namespace bb84

#endif  // BB84_CHANNEL_H_
