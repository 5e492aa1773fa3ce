#ifndef BB84_KEYRATE_H_
#define BB84_KEYRATE_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bb84/channel.h"
#include "bb84/entropy.h"

namespace bb84 {

enum class Reconciliation { kDirect, kReverse };

std::string to_string(Reconciliation r);
// Accepts "direct" or "reverse"; throws InvalidInput otherwise.
Reconciliation parse_reconciliation(const std::string &name);

// The six channel parameters observable from z/x preparations and
// measurements. The remaining six are unobservable.
struct OmegaParams {
    double r_zz = 0.0;
    double r_zx = 0.0;
    double r_xz = 0.0;
    double r_xx = 0.0;
    double t_z = 0.0;
    double t_x = 0.0;

    static OmegaParams from_channel(const QubitChannel &ch);
    static OmegaParams from_vector(const Eigen::Matrix<double, 6, 1> &v);
    Eigen::Matrix<double, 6, 1> as_vector() const;
    // Channel with the observed parameters, the given R_yy, and every other
    // parameter set to zero.
    QubitChannel complete(double r_yy) const;
};

// Values of R_yy for which complete(R_yy) is a valid channel.
struct FeasibleInterval {
    double lo = 0.0;
    double hi = 0.0;
    // Maximum over R_yy of the Choi minimum eigenvalue, attained at `center`.
    double peak_min_eigenvalue = 0.0;
    double center = 0.0;

    bool degenerate() const { return hi == lo; }
};

// Throws Infeasible when no R_yy gives a valid channel.
FeasibleInterval feasible_r_yy(const OmegaParams &omega);

// Eve's ambiguity for the selected reconciliation: H(X|E) or H(Y|E).
double eve_ambiguity(const QubitChannel &ch, SourceDistribution source, Reconciliation direction);

struct Ambiguity {
    double value = 0.0;
    double argmin_r_yy = 0.0;
};

// Minimum of Eve's ambiguity over the feasible R_yy with the remaining
// unobservable parameters at zero.
Ambiguity worst_case_ambiguity(const OmegaParams &omega, SourceDistribution source, Reconciliation direction);

// Amplitude damping rates in closed form.
double closed_form_rate(double p, double q, Reconciliation direction);

struct KeyRateReport {
    double q = 0.5;
    Reconciliation direction = Reconciliation::kDirect;
    double rate = 0.0;
    double worst_case_r_yy = 0.0;
    double eve_ambiguity = 0.0;
    double classical_leak = 0.0;

    double clamped_rate() const { return rate > 0.0 ? rate : 0.0; }
};

double classical_leak(const JointDistribution &joint, Reconciliation direction);

KeyRateReport key_rate(const OmegaParams &omega, SourceDistribution source, Reconciliation direction,
                       const JointDistribution &joint);

// Convenience: omega and joint distribution both taken from a known channel.
KeyRateReport key_rate(const QubitChannel &ch, SourceDistribution source, Reconciliation direction);

struct BiasSearchOptions {
    double q_min = 1e-6;
    double q_max = 1.0 - 1e-6;
    double tol = 1e-9;
    // Samples used to test unimodality before trusting a plain golden-section search.
    int scan_points = 1001;
};

struct BiasOptimum {
    double q_hat = 0.5;
    double rate = 0.0;
    // Whether the scan found at most one rise-to-fall turn. When false the
    // search was restricted to the neighbourhood of the best scan sample.
    bool unimodal = true;
};

BiasOptimum maximize_over_bias(const std::function<double(double)> &rate, const BiasSearchOptions &options = {});

// Amplitude damping with damping probability p, closed-form rates.
BiasOptimum optimize_bias(double p, Reconciliation direction, const BiasSearchOptions &options = {});

// General channel estimate, entropic rates with worst-case completion and
// the joint distribution implied by omega.
BiasOptimum optimize_bias(const OmegaParams &omega, Reconciliation direction,
                          const BiasSearchOptions &options = {.scan_points = 101});

// The two printed transcendental optimality conditions for amplitude damping.
//   kInputOdds: (1-q)/q = (u / (1-u))^p,                     u = p(1-q)
//   kDecayOdds: (1-u)/u = ((q+u) / ((1-p)(1-q)))^((1-p)/p)
// kInputOdds is the stationarity condition of the reverse rate and
// kDecayOdds that of the direct rate.
enum class StationarityCondition { kInputOdds, kDecayOdds };

// LHS - RHS, both sides evaluated through logarithms. Throws DomainError
// outside 0 <= p < 1 (kInputOdds) or 0 < p < 1/2 (kDecayOdds), and for q
// outside (0, 1).
double stationarity_residual(double p, double q, StationarityCondition condition);

struct SweepRow {
    double p = 0.0;
    double q_conventional = 0.5;
    double rate_direct_conv = 0.0;
    double rate_reverse_conv = 0.0;
    double q_hat_direct = 0.5;
    double rate_direct_opt = 0.0;
    double q_hat_reverse = 0.5;
    double rate_reverse_opt = 0.0;
};

// Conventional (fixed q) and optimized-bias rates for amplitude damping at
// each p. Values are raw; clamp for display. Throws DomainError for p
// outside [0, 1).
std::vector<SweepRow> sweep(std::span<const double> p_grid, double q_conventional = 0.5);

using ParamMetric = Eigen::Matrix<double, 6, 6>;

// Closest completable parameters to omega under the distance
// sqrt((x - omega)^T metric (x - omega)), parameters ordered r_zz, r_zx,
// r_xz, r_xx, t_z, t_x. Returns omega unchanged when it is already
// completable. The metric must be symmetric positive definite; an inverse
// covariance makes this a Mahalanobis projection. Writes the distance to
// *distance when non-null.
OmegaParams nearest_physical(const OmegaParams &omega, const ParamMetric &metric, double *distance = nullptr);

}  // namespace bb84

#endif  // BB84_KEYRATE_H_
