#pragma once

// Replica-symmetric free energy surface F(Q, m) for the general covariance
// Phi, its fixed-point equations, and the argmin over fixed points plus the
// corners (0,0) and (1,1).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "gfield/errors.hpp"
#include "gfield/field_model.hpp"
#include "gfield/gauss_expect.hpp"
#include "gfield/numeric.hpp"

namespace gfield {

struct RsParams {
    double beta = 10.0;       // 1 / sigma_hat^2
    double R = 1.0;           // K / N
    double sigma = 0.1;       // channel noise std
    double sigma_hat = 0.1;   // inference noise std
    CovarianceFn cov;

    static RsParams make(double sigma, double sigma_hat, double R, CovarianceFn cov) {
        detail::require(std::isfinite(sigma) && sigma > 0.0, "sigma must be > 0");
        detail::require(std::isfinite(sigma_hat) && sigma_hat > 0.0, "sigma_hat must be > 0");
        detail::require(std::isfinite(R) && R > 0.0, "R must be > 0");
        return {1.0 / (sigma_hat * sigma_hat), R, sigma, sigma_hat, std::move(cov)};
    }
    static RsParams matched(double sigma, double R, CovarianceFn cov) { return make(sigma, sigma, R, std::move(cov)); }
};

struct RsPoint {
    double Q = 0.0;
    double m = 0.0;
};

namespace detail {
inline void check_point(double Q, double m) {
    require(Q >= 0.0 && Q <= 1.0 && m >= 0.0 && m <= 1.0, "order parameters must lie in [0,1]^2");
}
}  // namespace detail

inline double g_beta(const RsParams& p, double Q) { return 1.0 + p.beta * (p.cov(1.0) - p.cov(Q)); }

inline double f_beta(const RsParams& p, double Q, double m) {
    return p.beta * (p.sigma * p.sigma + p.cov(1.0) + p.cov(Q) - 2.0 * p.cov(m));
}

inline double L_beta(const RsParams& p, double Q, double m) {
    const double g = g_beta(p, Q);
    return p.beta / p.R * p.cov.derivative(Q) * f_beta(p, Q, m) / (g * g);
}

inline double E_beta(const RsParams& p, double Q, double m) {
    return p.beta / p.R * p.cov.derivative(m) / g_beta(p, Q);
}

inline double Pi_beta(const RsParams& p, double Q, double m) {
    const double g = g_beta(p, Q);
    const double L = L_beta(p, Q, m), E = E_beta(p, Q, m);
    return p.R * (m * E + 0.5 * (1.0 - Q) * L) + 0.5 * (f_beta(p, Q, m) / g + std::log(g));
}

inline double F_surface(const RsParams& p, double Q, double m, const QuadratureRule& rule = default_rule()) {
    detail::check_point(Q, m);
    const double L = L_beta(p, Q, m), E = E_beta(p, Q, m);
    // f < 0 (m too large for Q) has no real Gaussian channel behind it
    detail::require(L >= 0.0, "RS surface undefined where f_beta < 0");
    return -p.R * expect_log_cosh(L, E, rule) + Pi_beta(p, Q, m) - p.R * std::numbers::ln2;
}

// One application of (Q, m) -> (E tanh^2, E tanh).
inline RsPoint rs_map(const RsParams& p, RsPoint x, const QuadratureRule& rule = default_rule()) {
    const auto t = tanh_moments(std::max(0.0, L_beta(p, x.Q, x.m)), E_beta(p, x.Q, x.m), rule);
    return {t.tanh2, t.tanh1};
}

struct FixedPointOptions {
    double damping = 0.5;  // x <- x + damping * (T(x) - x); 1 is the plain map
    double tol = 1e-10;
    int max_iter = 10000;
};

struct FixedPointResult {
    RsPoint point;
    int iterations = 0;
    bool converged = false;
};

inline FixedPointResult fixed_point_iterate(const RsParams& p, RsPoint init, const FixedPointOptions& opt = {},
                                            const QuadratureRule& rule = default_rule()) {
    detail::check_point(init.Q, init.m);
    detail::require(opt.damping > 0.0 && opt.damping <= 1.0, "damping must be in (0,1]");
    RsPoint x = init;
    FixedPointResult res;
    for (int it = 1; it <= opt.max_iter; ++it) {
        const RsPoint t = rs_map(p, x, rule);
        RsPoint nx{x.Q + opt.damping * (t.Q - x.Q), x.m + opt.damping * (t.m - x.m)};
        nx.Q = std::clamp(nx.Q, 0.0, 1.0);
        nx.m = std::clamp(nx.m, 0.0, 1.0);
        const double step = std::max(std::fabs(nx.Q - x.Q), std::fabs(nx.m - x.m));
        x = nx;
        res.iterations = it;
        if (step < opt.tol) {
            res.converged = true;
            break;
        }
    }
    res.point = x;
    return res;
}

struct SolveOptions {
    int grid = 11;          // init grid per axis on [0,1]
    double eps = 1e-6;      // extra inits at (eps,eps) and (1-eps,1-eps)
    FixedPointOptions fp{};
};

struct RsSolution {
    RsPoint point;
    double F = 0.0;
    bool interior = false;            // a converged fixed point, not a boundary candidate
    std::vector<RsPoint> fixed_points;  // converged fixed points, deduplicated
};

inline bool rs_feasible(const RsParams& p, double Q, double m) { return f_beta(p, Q, m) >= 0.0; }

inline RsSolution solve_rs(const RsParams& p, const SolveOptions& opt = {}, const QuadratureRule& rule = default_rule()) {
    struct Cand {
        RsPoint x;
        double F;
        bool fixed;
    };
    std::vector<Cand> cands;
    RsSolution sol;

    std::vector<RsPoint> inits;
    for (int i = 0; i < opt.grid; ++i)
        for (int j = 0; j < opt.grid; ++j)
            inits.push_back({static_cast<double>(i) / (opt.grid - 1), static_cast<double>(j) / (opt.grid - 1)});
    inits.push_back({opt.eps, opt.eps});
    inits.push_back({1.0 - opt.eps, 1.0 - opt.eps});

    for (const auto& x0 : inits) {
        const auto r = fixed_point_iterate(p, x0, opt.fp, rule);
        if (!r.converged) continue;
        bool dup = false;
        for (const auto& y : sol.fixed_points)
            dup = dup || (std::fabs(y.Q - r.point.Q) < 1e-7 && std::fabs(y.m - r.point.m) < 1e-7);
        if (dup) continue;
        if (!rs_feasible(p, r.point.Q, r.point.m)) continue;
        sol.fixed_points.push_back(r.point);
        cands.push_back({r.point, F_surface(p, r.point.Q, r.point.m, rule), true});
    }

    // Boundary candidates are the diagonal corners; fixed points that the
    // clamped iteration pushes onto an edge arrive through the loop above.
    for (double x : {0.0, 1.0})
        if (rs_feasible(p, x, x)) cands.push_back({{x, x}, F_surface(p, x, x, rule), false});

    const Cand* best = nullptr;
    for (const auto& c : cands) {
        if (!std::isfinite(c.F)) continue;
        if (!best || c.F < best->F - 1e-10 || (std::fabs(c.F - best->F) <= 1e-10 && c.x.m > best->x.m)) best = &c;
    }
    if (!best) throw NumericError("no finite candidate in solve_rs");
    sol.point = best->x;
    sol.F = best->F;
    sol.interior = best->fixed;
    return sol;
}

// Asymptotic cross entropy per output symbol at the RS solution.
inline double cross_entropy(const RsParams& p, const RsSolution& s) {
    return 0.5 * std::log(2.0 * std::numbers::pi * p.sigma_hat * p.sigma_hat) + p.R * std::numbers::ln2 + s.F;
}

inline double cross_entropy(const RsParams& p, const QuadratureRule& rule = default_rule()) {
    return cross_entropy(p, solve_rs(p, {}, rule));
}

// --- matched inference (sigma_hat = sigma), where Q = m and L = E ---

struct MatchedCurve {
    double sigma;
    double R;
    CovarianceFn cov;

    double g(double m) const { return 1.0 + (cov(1.0) - cov(m)) / (sigma * sigma); }
    double E(double m) const { return cov.derivative(m) / (R * sigma * sigma * g(m)); }
    double map(double m, const QuadratureRule& rule = default_rule()) const {
        const double e = E(m);
        return expect_tanh(e, e, rule);
    }
    // H_sigma(m), the matched cross entropy along the diagonal.
    double H(double m, const QuadratureRule& rule = default_rule()) const {
        const double e = E(m);
        return -R * expect_log_cosh(e, e, rule) +
               0.5 * (R * (1.0 + m) * e + std::log(2.0 * std::numbers::pi * std::numbers::e * sigma * sigma) +
                      std::log(g(m)));
    }
};

struct MatchedSolution {
    double m_star = 0.0;
    double H = 0.0;
    std::vector<double> fixed_points;
};

inline MatchedSolution matched_solve(double sigma, double R, const CovarianceFn& cov, int scan = 1000,
                                     const QuadratureRule& rule = default_rule()) {
    detail::require(std::isfinite(sigma) && sigma > 0.0, "sigma must be > 0");
    detail::require(std::isfinite(R) && R > 0.0, "R must be > 0");
    const MatchedCurve c{sigma, R, cov};
    MatchedSolution out;
    for (const auto& r : scan_roots([&](double m) { return c.map(m, rule) - m; }, 0.0, 1.0, scan))
        out.fixed_points.push_back(r.x);
    std::vector<double> cands = out.fixed_points;
    cands.push_back(0.0);
    cands.push_back(1.0);
    bool first = true;
    for (double m : cands) {
        const double h = c.H(m, rule);
        if (first || h < out.H - 1e-12 || (std::fabs(h - out.H) <= 1e-12 && m > out.m_star)) {
            out.m_star = m;
            out.H = h;
            first = false;
        }
    }
    return out;
}

inline double matched_entropy(double sigma, double R, const CovarianceFn& cov) {
    return matched_solve(sigma, R, cov).H;
}

// I = H - h(noise), in nats per output symbol.
inline double info_rate(double sigma, double R, const CovarianceFn& cov) {
    return matched_entropy(sigma, R, cov) - 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * sigma * sigma);
}

}  // namespace gfield
