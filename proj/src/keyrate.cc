#include "bb84/keyrate.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "bb84/error.h"
#include "bb84/scalar_search.h"

namespace bb84 {

namespace {

// Every valid channel maps the y axis into the Bloch ball, so |R_yy| <= 1.
constexpr double kRyyBound = 1.0;
constexpr int kBisectionSteps = 60;
constexpr int kAmbiguityScanPoints = 200;
constexpr double kAmbiguityTol = 1e-9;

struct ChoiPencil {
    Matrix4c base;   // Choi state at R_yy = 0
    Matrix4c slope;  // d Choi / d R_yy

    explicit ChoiPencil(const OmegaParams &omega)
        : base(channel_to_choi(omega.complete(0.0)).entries),
          slope(channel_to_choi(omega.complete(1.0)).entries - base) {}

    double min_eigenvalue(double r_yy) const {
        Eigen::SelfAdjointEigenSolver<Matrix4c> es(base + r_yy * slope, Eigen::EigenvaluesOnly);
        return es.eigenvalues()[0];
    }

    // Derivative of the smallest eigenvalue along R_yy (a supergradient at
    // crossings, which is enough for the concave search below).
    double min_eigenvalue_slope(double r_yy) const {
        Eigen::SelfAdjointEigenSolver<Matrix4c> es(base + r_yy * slope);
        const Eigen::Vector4cd v = es.eigenvectors().col(0);
        return (v.adjoint() * slope * v)(0, 0).real();
    }
};

struct Peak {
    double center = 0.0;
    double value = 0.0;
};

// The smallest Choi eigenvalue is concave in R_yy. Its maximizer is found by
// bisection on the sign of the derivative, which is linear near a tangency
// where the eigenvalue itself is only quadratic.
Peak min_eigenvalue_peak(const ChoiPencil &pencil) {
    double lo = -kRyyBound;
    double hi = kRyyBound;
    for (int i = 0; i < kBisectionSteps; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (pencil.min_eigenvalue_slope(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Peak peak{0.5 * (lo + hi), 0.0};
    peak.value = pencil.min_eigenvalue(peak.center);
    for (double edge : {-kRyyBound, kRyyBound}) {
        const double v = pencil.min_eigenvalue(edge);
        if (v > peak.value) peak = {edge, v};
    }
    return peak;
}

// Boundary of {r : min eigenvalue >= 0} between a feasible and an
// infeasible point; returns the feasible side of the final bracket.
double bisect_boundary(const ChoiPencil &pencil, double feasible, double infeasible) {
    for (int i = 0; i < kBisectionSteps && std::abs(feasible - infeasible) > 1e-15; ++i) {
        const double mid = 0.5 * (feasible + infeasible);
        if (pencil.min_eigenvalue(mid) >= 0.0) {
            feasible = mid;
        } else {
            infeasible = mid;
        }
    }
    return feasible;
}

FeasibleInterval feasible_interval(const ChoiPencil &pencil) {
    const Peak peak = min_eigenvalue_peak(pencil);
    if (peak.value < -kPsdTolerance) {
        std::ostringstream os;
        os << "no R_yy completes the estimate to a valid channel (best Choi eigenvalue " << peak.value << ")";
        throw Infeasible(os.str());
    }
    FeasibleInterval interval;
    interval.peak_min_eigenvalue = peak.value;
    interval.center = peak.center;
    interval.lo = interval.hi = peak.center;
    // Within tolerance of zero the set is a single tangent point.
    if (peak.value <= kPsdTolerance) return interval;

    interval.lo = pencil.min_eigenvalue(-kRyyBound) >= 0.0 ? -kRyyBound
                                                           : bisect_boundary(pencil, peak.center, -kRyyBound);
    interval.hi = pencil.min_eigenvalue(kRyyBound) >= 0.0 ? kRyyBound
                                                          : bisect_boundary(pencil, peak.center, kRyyBound);
    return interval;
}

Ambiguity minimize_ambiguity(const OmegaParams &omega, const FeasibleInterval &interval, SourceDistribution source,
                             Reconciliation direction) {
    auto f = [&](double r_yy) { return eve_ambiguity(omega.complete(r_yy), source, direction); };
    if (interval.degenerate()) return {f(interval.center), interval.center};
    const ScalarPoint best = scan_and_refine_minimize(f, interval.lo, interval.hi, kAmbiguityScanPoints, kAmbiguityTol);
    return {best.value, best.x};
}

void check_probability(double v, const char *name, bool open) {
    const bool ok = open ? (v > 0.0 && v < 1.0) : (v >= 0.0 && v <= 1.0);
    if (!ok) {
        std::ostringstream os;
        os << name << " = " << v << " outside " << (open ? "(0, 1)" : "[0, 1]");
        throw DomainError(os.str());
    }
}

}  // namespace

std::string to_string(Reconciliation r) { return r == Reconciliation::kDirect ? "direct" : "reverse"; }

Reconciliation parse_reconciliation(const std::string &name) {
    if (name == "direct") return Reconciliation::kDirect;
    if (name == "reverse") return Reconciliation::kReverse;
    throw InvalidInput("direction must be 'direct' or 'reverse', got '" + name + "'");
}

OmegaParams OmegaParams::from_channel(const QubitChannel &ch) {
    return {ch.R(kZ, kZ), ch.R(kZ, kX), ch.R(kX, kZ), ch.R(kX, kX), ch.t[kZ], ch.t[kX]};
}

OmegaParams OmegaParams::from_vector(const Eigen::Matrix<double, 6, 1> &v) {
    return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

Eigen::Matrix<double, 6, 1> OmegaParams::as_vector() const {
    Eigen::Matrix<double, 6, 1> v;
    v << r_zz, r_zx, r_xz, r_xx, t_z, t_x;
    return v;
}

QubitChannel OmegaParams::complete(double r_yy) const {
    QubitChannel ch;
    ch.R.setZero();
    ch.R(kZ, kZ) = r_zz;
    ch.R(kZ, kX) = r_zx;
    ch.R(kX, kZ) = r_xz;
    ch.R(kX, kX) = r_xx;
    ch.R(kY, kY) = r_yy;
    ch.t = Eigen::Vector3d(t_z, t_x, 0.0);
    return ch;
}

FeasibleInterval feasible_r_yy(const OmegaParams &omega) { return feasible_interval(ChoiPencil(omega)); }

double eve_ambiguity(const QubitChannel &ch, SourceDistribution source, Reconciliation direction) {
    return direction == Reconciliation::kDirect ? h_x_given_e(ch, source) : h_y_given_e(ch, source);
}

Ambiguity worst_case_ambiguity(const OmegaParams &omega, SourceDistribution source, Reconciliation direction) {
    return minimize_ambiguity(omega, feasible_r_yy(omega), source, direction);
}

double closed_form_rate(double p, double q, Reconciliation direction) {
    check_probability(p, "p", false);
    check_probability(q, "q", true);
    const double decayed = p * (1.0 - q);
    if (direction == Reconciliation::kDirect) return binary_entropy(q + decayed) - binary_entropy(decayed);
    return binary_entropy(q) - binary_entropy(decayed);
}

double classical_leak(const JointDistribution &joint, Reconciliation direction) {
    return conditional_shannon(joint,
                               direction == Reconciliation::kDirect ? Conditioning::kXGivenY : Conditioning::kYGivenX);
}

KeyRateReport key_rate(const OmegaParams &omega, SourceDistribution source, Reconciliation direction,
                       const JointDistribution &joint) {
    const Ambiguity amb = worst_case_ambiguity(omega, source, direction);
    KeyRateReport report;
    report.q = source.q();
    report.direction = direction;
    report.worst_case_r_yy = amb.argmin_r_yy;
    report.eve_ambiguity = amb.value;
    report.classical_leak = classical_leak(joint, direction);
    report.rate = report.eve_ambiguity - report.classical_leak;
    return report;
}

KeyRateReport key_rate(const QubitChannel &ch, SourceDistribution source, Reconciliation direction) {
    return key_rate(OmegaParams::from_channel(ch), source, direction, joint_distribution(ch, source));
}

BiasOptimum maximize_over_bias(const std::function<double(double)> &rate, const BiasSearchOptions &options) {
    auto loss = [&](double q) { return -rate(q); };
    const std::vector<double> qs = linspace(options.q_min, options.q_max, std::max(options.scan_points, 3));
    std::vector<double> values(qs.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        values[i] = rate(qs[i]);
        if (values[i] > values[best]) best = i;
    }

    // Count turns of the discrete forward difference, ignoring flat steps.
    int turns = 0;
    int last_sign = 0;
    int first_sign = 0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const double diff = values[i + 1] - values[i];
        const int sign = diff > 1e-13 ? 1 : (diff < -1e-13 ? -1 : 0);
        if (sign == 0) continue;
        if (first_sign == 0) first_sign = sign;
        if (last_sign != 0 && sign != last_sign) ++turns;
        last_sign = sign;
    }

    BiasOptimum result;
    result.unimodal = turns == 0 || (turns == 1 && first_sign > 0);
    ScalarPoint refined;
    if (result.unimodal) {
        refined = golden_section_minimize(loss, options.q_min, options.q_max, options.tol);
    } else {
        const double a = qs[best == 0 ? 0 : best - 1];
        const double b = qs[best + 1 == qs.size() ? best : best + 1];
        refined = golden_section_minimize(loss, a, b, options.tol);
    }
    if (-refined.value >= values[best]) {
        result.q_hat = refined.x;
        result.rate = -refined.value;
    } else {
        result.q_hat = qs[best];
        result.rate = values[best];
    }
    return result;
}

namespace {

// log2((1 - x) / x), the derivative of the binary entropy.
double binary_entropy_slope(double x) { return (std::log1p(-x) - std::log(x)) / std::log(2.0); }

// d/dq of the closed-form rates.
double closed_form_slope(double p, double q, Reconciliation direction) {
    const double u = p * (1.0 - q);
    const double leak_term = p == 0.0 ? 0.0 : p * binary_entropy_slope(u);
    if (direction == Reconciliation::kDirect) return (1.0 - p) * binary_entropy_slope(q + u) + leak_term;
    return binary_entropy_slope(q) + leak_term;
}

}  // namespace

BiasOptimum optimize_bias(double p, Reconciliation direction, const BiasSearchOptions &options) {
    check_probability(p, "p", false);
    auto rate = [&](double q) { return closed_form_rate(p, q, direction); };
    BiasOptimum best = maximize_over_bias(rate, options);

    // Golden section stalls near sqrt(machine epsilon) on a flat maximum.
    // Finish with bisection on the sign of the analytic slope.
    const double width = std::max(1e3 * options.tol, 1e-6);
    double lo = std::max(best.q_hat - width, options.q_min);
    double hi = std::min(best.q_hat + width, options.q_max);
    if (closed_form_slope(p, lo, direction) > 0.0 && closed_form_slope(p, hi, direction) < 0.0) {
        for (int i = 0; i < 100 && hi - lo > 0.0; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            (closed_form_slope(p, mid, direction) > 0.0 ? lo : hi) = mid;
        }
        const double q = 0.5 * (lo + hi);
        const double value = rate(q);
        if (value >= best.rate - 1e-15) {
            best.q_hat = q;
            best.rate = value;
        }
    }
    return best;
}

BiasOptimum optimize_bias(const OmegaParams &omega, Reconciliation direction, const BiasSearchOptions &options) {
    // The feasible set does not depend on q.
    const FeasibleInterval interval = feasible_r_yy(omega);
    const QubitChannel z_action = omega.complete(interval.center);
    auto rate = [&](double q) {
        const SourceDistribution source(q);
        const Ambiguity amb = minimize_ambiguity(omega, interval, source, direction);
        return amb.value - classical_leak(joint_distribution(z_action, source), direction);
    };
    return maximize_over_bias(rate, options);
}

double stationarity_residual(double p, double q, StationarityCondition condition) {
    check_probability(q, "q", true);
    const double u = p * (1.0 - q);
    double log_lhs = 0.0;
    double log_rhs = 0.0;
    if (condition == StationarityCondition::kInputOdds) {
        if (!(p >= 0.0 && p < 1.0)) throw DomainError("input-odds condition needs 0 <= p < 1");
        log_lhs = std::log1p(-q) - std::log(q);
        log_rhs = p == 0.0 ? 0.0 : p * (std::log(u) - std::log1p(-u));
    } else {
        if (!(p > 0.0 && p < 0.5)) throw DomainError("decay-odds condition needs 0 < p < 1/2");
        log_lhs = std::log1p(-u) - std::log(u);
        log_rhs = (1.0 - p) / p * (std::log(q + u) - std::log1p(-p) - std::log1p(-q));
    }
    return std::exp(log_lhs) - std::exp(log_rhs);
}

std::vector<SweepRow> sweep(std::span<const double> p_grid, double q_conventional) {
    check_probability(q_conventional, "q_conventional", true);
    std::vector<SweepRow> rows;
    rows.reserve(p_grid.size());
    for (double p : p_grid) {
        if (!(p >= 0.0 && p < 1.0)) {
            std::ostringstream os;
            os << "sweep value p = " << p << " outside [0, 1)";
            throw DomainError(os.str());
        }
        SweepRow row;
        row.p = p;
        row.q_conventional = q_conventional;
        row.rate_direct_conv = closed_form_rate(p, q_conventional, Reconciliation::kDirect);
        row.rate_reverse_conv = closed_form_rate(p, q_conventional, Reconciliation::kReverse);
        const BiasOptimum direct = optimize_bias(p, Reconciliation::kDirect);
        const BiasOptimum reverse = optimize_bias(p, Reconciliation::kReverse);
        row.q_hat_direct = direct.q_hat;
        row.rate_direct_opt = direct.rate;
        row.q_hat_reverse = reverse.q_hat;
        row.rate_reverse_opt = reverse.rate;
        rows.push_back(row);
    }
    return rows;
}

namespace {

using Vector7 = Eigen::Matrix<double, 7, 1>;
using Matrix7 = Eigen::Matrix<double, 7, 7>;

// Choi state as an affine function of z = (omega parameters, R_yy).
struct ChoiAffine {
    Matrix4c offset;
    std::array<Matrix4c, 7> basis;

    ChoiAffine() {
        auto choi_at = [](const Vector7 &z) {
            return channel_to_choi(OmegaParams::from_vector(z.head<6>()).complete(z[6])).entries;
        };
        offset = choi_at(Vector7::Zero());
        for (int k = 0; k < 7; ++k) basis[k] = choi_at(Vector7::Unit(k)) - offset;
    }

    Matrix4c at(const Vector7 &z) const {
        Matrix4c c = offset;
        for (int k = 0; k < 7; ++k) c += z[k] * basis[k];
        return c;
    }
};

// Barrier objective f(x) - mu * log det C(z); infinite outside the PD cone.
struct BarrierProblem {
    const ChoiAffine &choi;
    const Eigen::Matrix<double, 6, 1> &target;
    const ParamMetric &metric;

    double distance2(const Vector7 &z) const {
        const Eigen::Matrix<double, 6, 1> d = z.head<6>() - target;
        return d.dot(metric * d);
    }

    double value(const Vector7 &z, double mu) const {
        Eigen::LLT<Matrix4c> llt(choi.at(z));
        if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
        const Eigen::Vector4d diag = llt.matrixL().toDenseMatrix().diagonal().real();
        if ((diag.array() <= 0.0).any()) return std::numeric_limits<double>::infinity();
        return distance2(z) - mu * 2.0 * diag.array().log().sum();
    }
};

}  // namespace

OmegaParams nearest_physical(const OmegaParams &omega, const ParamMetric &metric, double *distance) {
    if (distance != nullptr) *distance = 0.0;
    if (min_eigenvalue_peak(ChoiPencil(omega)).value >= -kPsdTolerance) return omega;

    const ChoiAffine choi;
    const Eigen::Matrix<double, 6, 1> target = omega.as_vector();
    const BarrierProblem problem{choi, target, metric};

    // Standard log-barrier path from the completely depolarizing channel
    // (Choi = I/4), which is strictly feasible.
    Vector7 z = Vector7::Zero();
    const int dim = 4;
    double mu = std::max(problem.distance2(z), 1e-300) / dim;
    const double mu_final = 1e-14 * mu;
    while (mu > mu_final) {
        for (int iter = 0; iter < 100; ++iter) {
            const Matrix4c c_inv = choi.at(z).inverse();
            std::array<Matrix4c, 7> b;
            for (int k = 0; k < 7; ++k) b[k] = c_inv * choi.basis[k];
            Vector7 grad = Vector7::Zero();
            Matrix7 hess = Matrix7::Zero();
            grad.head<6>() = 2.0 * metric * (z.head<6>() - target);
            hess.topLeftCorner<6, 6>() = 2.0 * metric;
            for (int k = 0; k < 7; ++k) {
                grad[k] -= mu * b[k].trace().real();
                for (int l = 0; l <= k; ++l) {
                    const double h = mu * (b[k] * b[l]).trace().real();
                    hess(k, l) += h;
                    if (l != k) hess(l, k) += h;
                }
            }
            const Vector7 step = -hess.ldlt().solve(grad);
            const double decrement2 = -grad.dot(step);
            if (!(decrement2 > 1e-20)) break;
            const double f0 = problem.value(z, mu);
            double t = 1.0;
            while (t > 1e-20 && !(problem.value(z + t * step, mu) <= f0 - 0.25 * t * decrement2)) t *= 0.5;
            if (t <= 1e-20) break;
            z += t * step;
            if (decrement2 < 1e-18) break;
        }
        mu *= 0.1;
    }
    if (distance != nullptr) *distance = std::sqrt(problem.distance2(z));
    return OmegaParams::from_vector(z.head<6>());
}

}  // namespace bb84
