#pragma once

// Scalar channel Y = S + rho Z with estimator tanh(Y / rho_hat^2). Internally
// parametrized by E = 1/rho_hat^2 and sqrt(L) = rho/rho_hat^2 so that E -> 0
// (no information) stays finite.

#include <cmath>
#include <limits>

#include "gfield/errors.hpp"
#include "gfield/gauss_expect.hpp"
#include "gfield/rs_core.hpp"

namespace gfield {

class DecoupledChannel {
public:
    static DecoupledChannel from_noise(double rho, double rho_hat) {
        detail::require(rho >= 0.0 && rho_hat > 0.0, "need rho >= 0 and rho_hat > 0");
        DecoupledChannel c;
        if (std::isinf(rho_hat)) return c;
        c.E_ = 1.0 / (rho_hat * rho_hat);
        c.sqrtL_ = rho * c.E_;
        return c;
    }

    static DecoupledChannel from_conjugates(double L, double E) {
        detail::require(L >= 0.0, "conjugate L must be >= 0");
        detail::require(E > 0.0, "degenerate decoupling: E must be > 0");
        DecoupledChannel c;
        c.E_ = E;
        c.sqrtL_ = std::sqrt(L);
        return c;
    }

    static DecoupledChannel from_rs(const RsParams& p, RsPoint x) {
        return from_conjugates(std::max(0.0, L_beta(p, x.Q, x.m)), E_beta(p, x.Q, x.m));
    }

    double rho() const { return E_ > 0.0 ? sqrtL_ / E_ : std::numeric_limits<double>::infinity(); }
    double rho_hat() const { return E_ > 0.0 ? 1.0 / std::sqrt(E_) : std::numeric_limits<double>::infinity(); }

    double estimate(double y) const { return std::tanh(y * E_); }

    // E[S^kappa Shat^tau] with S uniform on {-1,+1}. The S = -1 branch is the
    // mirror image of S = +1 under Z -> -Z, so the average is folded exactly.
    double moment(int kappa, int tau, const QuadratureRule& rule = default_rule()) const {
        detail::require(kappa >= 0 && tau >= 0, "moment orders must be >= 0");
        if ((kappa + tau) % 2) return 0.0;
        return rule.expect([&](double z) { return std::pow(std::tanh(E_ + sqrtL_ * z), tau); });
    }

    // (m, Q) = (E[S Shat], E[Shat^2]).
    std::pair<double, double> overlap_and_power(const QuadratureRule& rule = default_rule()) const {
        return {moment(1, 1, rule), moment(0, 2, rule)};
    }

    template <class D>
    double distortion(D&& d, const QuadratureRule& rule = default_rule()) const {
        double acc = 0.0;
        for (double s : {-1.0, 1.0})
            acc += 0.5 * rule.expect([&](double z) { return d(s, std::tanh(E_ * s + sqrtL_ * z)); });
        return acc;
    }

    double E() const { return E_; }
    double sqrtL() const { return sqrtL_; }

private:
    double E_ = 0.0;
    double sqrtL_ = 0.0;
};

}  // namespace gfield
