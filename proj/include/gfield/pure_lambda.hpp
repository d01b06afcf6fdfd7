#pragma once

// Pure order-lambda field, Phi(x) = x^lambda, under matched inference: the
// one-dimensional landscape L(m), its fixed points, thresholds, and the plain
// (undamped) iteration used to probe algorithmic convergence.

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "gfield/errors.hpp"
#include "gfield/gauss_expect.hpp"
#include "gfield/numeric.hpp"

namespace gfield {

struct PureModel {
    int lambda = 2;
    double sigma2 = 0.1;  // noise variance
    double R = 1.0;

    PureModel(int lam, double s2, double r) : lambda(lam), sigma2(s2), R(r) {
        detail::require(lambda >= 1, "lambda must be >= 1");
        detail::require(std::isfinite(sigma2) && sigma2 > 0.0, "sigma^2 must be > 0");
        detail::require(std::isfinite(R) && R > 0.0, "R must be > 0");
    }
};

namespace detail {
inline void check_m(double m) { require(m >= 0.0 && m <= 1.0, "m must lie in [0,1]"); }
}  // namespace detail

inline double xi(const PureModel& p, double m) {
    detail::check_m(m);
    return (1.0 - std::pow(m, p.lambda)) / p.sigma2;
}

// Effective noise std of the decoupled channel; +inf at m = 0 for lambda >= 2.
inline double rho(const PureModel& p, double m) {
    detail::check_m(m);
    const double slope = p.lambda * std::pow(m, p.lambda - 1);
    if (slope == 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(p.R * p.sigma2 * (1.0 + xi(p, m)) / slope);
}

// 1/rho^2, finite everywhere.
inline double snr(const PureModel& p, double m) {
    detail::check_m(m);
    return p.lambda * std::pow(m, p.lambda - 1) / (p.R * p.sigma2 * (1.0 + xi(p, m)));
}

inline double Lmod(const PureModel& p, double m, const QuadratureRule& rule = default_rule()) {
    const double e = snr(p, m);
    const double base = 0.5 * std::log1p(xi(p, m));
    if (e == 0.0) return base;
    return base + 0.5 * (1.0 + m) * p.R * e - p.R * expect_log_cosh(e, e, rule);
}

inline double fixed_point_map(const PureModel& p, double m, const QuadratureRule& rule = default_rule()) {
    const double e = snr(p, m);
    if (e == 0.0) return 0.0;
    return expect_tanh(e, e, rule);
}

struct ConvergeResult {
    double m = 0.0;
    int iterations = 0;
    bool converged = false;
};

inline ConvergeResult converge(const PureModel& p, double m0, double tol = 1e-10, int cap = 10000,
                               const QuadratureRule& rule = default_rule()) {
    detail::check_m(m0);
    ConvergeResult r{m0, 0, false};
    for (int t = 1; t <= cap; ++t) {
        const double next = fixed_point_map(p, r.m, rule);
        const double step = std::fabs(next - r.m);
        r.m = next;
        r.iterations = t;
        if (step < tol) {
            r.converged = true;
            break;
        }
    }
    return r;
}

struct PureFixedPoint {
    double m = 0.0;
    bool minimum = false;  // attracting for the iteration, a local minimum of L
};

inline std::vector<PureFixedPoint> fixed_points(const PureModel& p, int scan = 1000,
                                                const QuadratureRule& rule = default_rule()) {
    std::vector<PureFixedPoint> out;
    for (const auto& c : scan_roots([&](double m) { return fixed_point_map(p, m, rule) - m; }, 0.0, 1.0, scan))
        out.push_back({c.x, c.direction < 0});
    return out;
}

// Global minimizer of L over the fixed points and {0, 1}; ties go to the larger m.
inline double overlap(const PureModel& p, const QuadratureRule& rule = default_rule()) {
    std::vector<double> cands{0.0, 1.0};
    for (const auto& f : fixed_points(p, 1000, rule)) cands.push_back(f.m);
    double best = 0.0, lbest = std::numeric_limits<double>::infinity();
    for (double m : cands) {
        const double l = Lmod(p, m, rule);
        if (l < lbest - 1e-12 || (std::fabs(l - lbest) <= 1e-12 && m > best)) best = m, lbest = l;
    }
    return best;
}

// Overlap reached by the iteration from an uninformative start.
inline double amp_overlap(const PureModel& p, const QuadratureRule& rule = default_rule()) {
    return converge(p, p.lambda == 1 ? 0.0 : 1e-6, 1e-10, 10000, rule).m;
}

inline double info_rate(const PureModel& p, const QuadratureRule& rule = default_rule()) {
    return Lmod(p, overlap(p, rule), rule);
}

struct LandscapePoint {
    double m;
    double L;
};

inline std::vector<LandscapePoint> landscape(const PureModel& p, double step = 0.001,
                                             const QuadratureRule& rule = default_rule()) {
    detail::require(step > 0.0 && step <= 1.0, "landscape step must be in (0,1]");
    const int n = static_cast<int>(std::floor(1.0 / step + 1e-9));
    std::vector<LandscapePoint> out;
    for (int i = 0; i <= n; ++i) {
        const double m = std::min(1.0, i * step);
        out.push_back({m, Lmod(p, m, rule)});
    }
    if (out.back().m < 1.0) out.push_back({1.0, Lmod(p, 1.0, rule)});
    return out;
}

// ---- thresholds ----

inline double shannon_capacity(double sigma2) {
    detail::require(std::isfinite(sigma2) && sigma2 > 0.0, "sigma^2 must be > 0");
    return 0.5 * std::log1p(1.0 / sigma2);
}

inline double r_star(double sigma2) { return shannon_capacity(sigma2) / std::numbers::ln2; }

// Load where m = 0 turns from a maximum into a minimum of L for lambda = 2.
inline double r_th_quadratic(double sigma2) {
    detail::require(std::isfinite(sigma2) && sigma2 > 0.0, "sigma^2 must be > 0");
    return 2.0 / (sigma2 + 1.0);
}

// Noise variance at which r_th_quadratic meets r_star.
inline double critical_sigma2_quadratic() {
    auto h = [](double s2) { return r_th_quadratic(s2) - r_star(s2); };
    std::uintmax_t iters = 200;
    const auto br = boost::math::tools::toms748_solve(
        h, 1e-3, 1.0, [](double l, double r) { return r - l < 1e-15; }, iters);
    return 0.5 * (br.first + br.second);
}

// Closed-form bracket on L(m) from bounding E log cosh.
struct Bounds {
    double lower;
    double upper;
};

inline Bounds bounds_cor2(const PureModel& p, double m) {
    const double e = snr(p, m);
    const double base = std::log1p(xi(p, m));
    const double lc = log_cosh(e);
    return {0.5 * (base + m * p.R * e) - p.R * lc, 0.5 * (base + (1.0 + m) * p.R * e) - p.R * lc};
}

// ---- convergence probe ----

struct ProbeResult {
    double R = 0.0;
    int max_iterations = 0;
    double worst_m0 = 0.0;
    bool capped = false;
};

inline std::vector<double> default_probe_starts(int count = 100) {
    std::vector<double> m0(count);
    for (int i = 0; i < count; ++i) m0[i] = (i + 1.0) / (count + 1.0);
    return m0;
}

inline ProbeResult convergence_probe(const PureModel& p, const std::vector<double>& starts, double tol = 1e-10,
                                     int cap = 10000, const QuadratureRule& rule = default_rule()) {
    ProbeResult out;
    out.R = p.R;
    for (double m0 : starts) {
        const auto r = converge(p, m0, tol, cap, rule);
        if (r.iterations > out.max_iterations) out.max_iterations = r.iterations, out.worst_m0 = m0;
        out.capped = out.capped || !r.converged;
    }
    return out;
}

}  // namespace gfield
