#ifndef BB84_ENTROPY_H_
#define BB84_ENTROPY_H_

#include <array>
#include <span>

#include "bb84/channel.h"

namespace bb84 {

// All entropies are in bits.

// Probability that Alice's raw bit is 0. Endpoints are rejected.
class SourceDistribution {
  public:
    explicit SourceDistribution(double q);
    double q() const { return q_; }
    double prob(int bit) const { return bit == 0 ? q_ : 1.0 - q_; }

  private:
    double q_;
};

// P_XY(x, y) for z-basis preparation and z-basis measurement; p[x][y].
class JointDistribution {
  public:
    explicit JointDistribution(std::array<std::array<double, 2>, 2> p);
    double operator()(int x, int y) const { return p_[x][y]; }

  private:
    std::array<std::array<double, 2>, 2> p_;
};

enum class Conditioning { kXGivenY, kYGivenX };

double binary_entropy(double x);

// Shannon entropy of a (not necessarily normalized) list of weights, 0 log 0 = 0.
double shannon_entropy(std::span<const double> probs);

double von_neumann_entropy(const DensityMatrix &rho);

// Entropy of a Hermitian matrix without the density-matrix checks.
// Eigenvalues below 1e-12 count as zero; below -kPsdTolerance is an error.
double hermitian_entropy(const MatrixXc &m);

JointDistribution joint_distribution(const QubitChannel &ch, SourceDistribution source);

double conditional_shannon(const JointDistribution &joint, Conditioning which);

// H(X|E) for rho_XE = sum_x P(x) |x><x| (x) E_E(|x><x|).
double h_x_given_e(const QubitChannel &ch, SourceDistribution source);
double h_x_given_e(const KrausSet &kraus, SourceDistribution source);

// (I (x) E_B)(|psi><psi|), |psi> = sqrt(q)|00> + sqrt(1-q)|11>; A is the first factor.
Matrix4c bipartite_state(const QubitChannel &ch, SourceDistribution source);

// Purification of rho into system (x) environment, environment index fastest.
Eigen::VectorXcd purify(const MatrixXc &rho, int env_dim);

// H(Y|E) where Y is Bob's z-basis outcome and E purifies rho_AB.
double h_y_given_e(const QubitChannel &ch, SourceDistribution source);

}  // namespace bb84

#endif  // BB84_ENTROPY_H_
