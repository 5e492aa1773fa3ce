#ifndef BB84_SCALAR_SEARCH_H_
#define BB84_SCALAR_SEARCH_H_

#include <cmath>
#include <utility>
#include <vector>

namespace bb84 {

struct ScalarPoint {
    double x = 0.0;
    double value = 0.0;
};

// Golden-section minimization of a unimodal function on [lo, hi]. Stops once
// the bracket is narrower than tol or after max_iter shrinks.
template <typename F>
ScalarPoint golden_section_minimize(F &&f, double lo, double hi, double tol, int max_iter = 200) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int i = 0; i < max_iter && (b - a) > tol; ++i) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc <= fd ? ScalarPoint{c, fc} : ScalarPoint{d, fd};
}

// Evenly spaced points on [lo, hi], endpoints included.
inline std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> xs;
    if (count <= 0) return xs;
    if (count == 1) return {lo};
    xs.reserve(count);
    for (int i = 0; i < count; ++i) xs.push_back(lo + (hi - lo) * i / (count - 1));
    xs.back() = hi;
    return xs;
}

// Scan on `points` samples, then golden-section refinement inside the
// bracket formed by the neighbours of the best sample. The endpoints are
// always evaluated, so boundary minima are found exactly.
template <typename F>
ScalarPoint scan_and_refine_minimize(F &&f, double lo, double hi, int points, double tol) {
    if (hi - lo <= tol) {
        const double mid = 0.5 * (lo + hi);
        return {mid, f(mid)};
    }
    const std::vector<double> xs = linspace(lo, hi, points);
    std::size_t best = 0;
    double best_value = f(xs[0]);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double v = f(xs[i]);
        if (v < best_value) {
            best = i;
            best_value = v;
        }
    }
    const double a = xs[best == 0 ? 0 : best - 1];
    const double b = xs[best + 1 == xs.size() ? best : best + 1];
    const ScalarPoint refined = golden_section_minimize(f, a, b, tol);
    if (refined.value < best_value) return refined;
    return {xs[best], best_value};
}

}  // namespace bb84

#endif  // BB84_SCALAR_SEARCH_H_
