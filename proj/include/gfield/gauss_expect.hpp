#pragma once

// Expectations over a standard normal variable by Gauss-Hermite quadrature.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gfield/errors.hpp"

namespace gfield {

inline constexpr int kDefaultQuadOrder = 199;

// log cosh without overflow for large |x|.
inline double log_cosh(double x) {
    const double a = std::fabs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

// Nodes and weights for E[f(Z)], Z ~ N(0,1). Weights sum to one.
class QuadratureRule {
public:
    explicit QuadratureRule(int order = kDefaultQuadOrder) {
        detail::require(order >= 1, "quadrature order must be >= 1");
        build(order);
    }

    int order() const { return static_cast<int>(nodes_.size()); }
    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> weights() const { return weights_; }

    template <class F>
    double expect(F&& f) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) acc += weights_[i] * f(nodes_[i]);
        if (!std::isfinite(acc)) throw NumericError("non-finite quadrature value");
        return acc;
    }

private:
    // Golub-Welsch on the probabilists' Jacobi matrix, then one Newton polish
    // per node with weights from the orthonormal recurrence.
    void build(int n) {
        Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd sub(std::max(n - 1, 0));
        for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(static_cast<double>(k));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw NumericError("Jacobi eigen-solve failed");

        nodes_.resize(n);
        weights_.resize(n);
        for (int i = 0; i < n; ++i) {
            double z = es.eigenvalues()[i];
            for (int it = 0; it < 3; ++it) {
                const auto [hn, hn1, ss] = recurrence(n, z);
                (void)ss;
                z -= hn / (std::sqrt(static_cast<double>(n)) * hn1);
            }
            nodes_[i] = z;
            const auto [hn, hn1, ss] = recurrence(n, z);
            (void)hn, (void)hn1;
            weights_[i] = 1.0 / ss;
        }
        // exact symmetry
        for (int i = 0; i < n / 2; ++i) {
            const double a = 0.5 * (nodes_[n - 1 - i] - nodes_[i]);
            const double w = 0.5 * (weights_[i] + weights_[n - 1 - i]);
            nodes_[i] = -a;
            nodes_[n - 1 - i] = a;
            weights_[i] = weights_[n - 1 - i] = w;
        }
        if (n % 2 == 1) nodes_[n / 2] = 0.0;
        double total = 0.0;
        for (double w : weights_) total += w;
        for (auto& w : weights_) w /= total;
    }

    // (h_n(z), h_{n-1}(z), sum_{j<n} h_j(z)^2) for orthonormal He polynomials.
    // Far nodes are rescaled on the fly; their sum then saturates to +inf and
    // the weight underflows to zero, which is what it is anyway.
    static std::tuple<double, double, double> recurrence(int n, double z) {
        double prev = 0.0, cur = 1.0, ss = 1.0;
        bool scaled = false;
        for (int j = 1; j <= n; ++j) {
            const double next = (z * cur - std::sqrt(j - 1.0) * prev) / std::sqrt(static_cast<double>(j));
            prev = cur;
            cur = next;
            if (j < n) ss += cur * cur;
            if (std::fabs(cur) > 1e100) {
                cur *= 1e-100, prev *= 1e-100, ss *= 1e-200;
                scaled = true;
            }
        }
        if (scaled) ss = std::numeric_limits<double>::infinity();
        return {cur, prev, ss};
    }

    std::vector<double> nodes_;
    std::vector<double> weights_;
};

inline const QuadratureRule& default_rule() {
    static const QuadratureRule rule(kDefaultQuadOrder);
    return rule;
}

template <class F>
double expect(F&& f, const QuadratureRule& rule = default_rule()) {
    return rule.expect(std::forward<F>(f));
}

// Moments of tanh(sqrt(L) Z + E) needed by the fixed-point equations.
struct TanhMoments {
    double tanh1 = 0.0;    // E tanh
    double tanh2 = 0.0;    // E tanh^2
    double logcosh = 0.0;  // E log cosh
};

inline TanhMoments tanh_moments(double L, double E, const QuadratureRule& rule = default_rule()) {
    detail::require(L >= 0.0, "tanh moments need L >= 0");
    const double s = std::sqrt(L);
    TanhMoments out;
    const auto z = rule.nodes();
    const auto w = rule.weights();
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double a = s * z[i] + E;
        const double t = std::tanh(a);
        out.tanh1 += w[i] * t;
        out.tanh2 += w[i] * t * t;
        out.logcosh += w[i] * log_cosh(a);
    }
    if (!std::isfinite(out.tanh1) || !std::isfinite(out.logcosh)) throw NumericError("non-finite tanh moment");
    return out;
}

inline double expect_tanh(double L, double E, const QuadratureRule& rule = default_rule()) {
    detail::require(L >= 0.0, "expect_tanh needs L >= 0");
    const double s = std::sqrt(L);
    return rule.expect([&](double z) { return std::tanh(s * z + E); });
}

inline double expect_tanh2(double L, double E, const QuadratureRule& rule = default_rule()) {
    detail::require(L >= 0.0, "expect_tanh2 needs L >= 0");
    const double s = std::sqrt(L);
    return rule.expect([&](double z) {
        const double t = std::tanh(s * z + E);
        return t * t;
    });
}

inline double expect_log_cosh(double L, double E, const QuadratureRule& rule = default_rule()) {
    detail::require(L >= 0.0, "expect_log_cosh needs L >= 0");
    const double s = std::sqrt(L);
    return rule.expect([&](double z) { return log_cosh(s * z + E); });
}

}  // namespace gfield
