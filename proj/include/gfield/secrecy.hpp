#pragma once

// Secure learning over a Gaussian wiretap channel: Wyner capacity, the binning
// construction that hides labels behind a random prefix, and the secure rate
// obtained from the full-RSB overlap of quadratic fields.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "gfield/errors.hpp"
#include "gfield/numeric.hpp"
#include "gfield/rng.hpp"

namespace gfield {

// Nats. [.]^+ clamped.
inline double wyner_secrecy_capacity(double P, double sigma2_legit, double sigma2_eaves) {
    detail::require(P > 0.0 && sigma2_legit > 0.0 && sigma2_eaves > 0.0, "wiretap parameters must be > 0");
    return std::max(0.0, 0.5 * (std::log1p(P / sigma2_legit) - std::log1p(P / sigma2_eaves)));
}

// Capacity of the unit-power binary-label channel in bits, C(sigma)/log 2.
inline double capacity_bits(double sigma2) {
    detail::require(sigma2 > 0.0, "sigma^2 must be > 0");
    return 0.5 * std::log2(1.0 + 1.0 / sigma2);
}

// Largest effective load that stays secret, in bits per dimension.
inline double secure_load_bound(double sigma1_sq, double sigma2_sq) {
    return std::max(0.0, capacity_bits(sigma1_sq) - capacity_bits(sigma2_sq));
}

struct SecureCodeConfig {
    int N = 0;
    int K = 0;
    int K2 = 0;
    int B = 0;
    std::vector<int> bin_start;  // K2 + 1 boundaries into [0, K + K2)
    std::vector<int> perm;       // output position i takes source index perm[i] of [r; s]
    std::uint64_t seed = 0;

    double system_load() const { return static_cast<double>(K + K2) / N; }
    double effective_load() const { return static_cast<double>(K) / N; }
};

// The prefix r (K2 symbols) is spread so each bin holds exactly one r symbol.
// Bins have width B or B - 1 so that they tile [0, K + K2).
inline SecureCodeConfig build_secure_config(int N, int K, double sigma2_eaves, std::uint64_t seed) {
    detail::require(N >= 1 && K >= 1, "need N >= 1 and K >= 1");
    SecureCodeConfig c;
    c.N = N;
    c.K = K;
    c.seed = seed;
    // tiny slack keeps exact products such as 1000 * 0.5 from rounding up
    c.K2 = static_cast<int>(std::ceil(N * capacity_bits(sigma2_eaves) - 1e-9));
    if (c.K2 < 1) throw InfeasibleError("eavesdropper capacity too small for a nonempty prefix");
    c.B = static_cast<int>(std::ceil(1.0 + static_cast<double>(K) / c.K2 - 1e-12));
    const int total = K + c.K2;

    c.bin_start.resize(c.K2 + 1);
    for (int l = 0; l <= c.K2; ++l) c.bin_start[l] = static_cast<int>(static_cast<long long>(l) * total / c.K2);

    auto eng = make_stream(seed, {0x5ec0de});
    std::vector<int> data(K);
    std::iota(data.begin(), data.end(), c.K2);
    std::shuffle(data.begin(), data.end(), eng);
    std::vector<int> prefix(c.K2);
    std::iota(prefix.begin(), prefix.end(), 0);
    std::shuffle(prefix.begin(), prefix.end(), eng);

    c.perm.assign(total, -1);
    std::size_t next_data = 0;
    for (int l = 0; l < c.K2; ++l) {
        const int lo = c.bin_start[l], hi = c.bin_start[l + 1];
        std::uniform_int_distribution<int> pick(lo, hi - 1);
        const int at = pick(eng);
        for (int i = lo; i < hi; ++i) c.perm[i] = i == at ? prefix[l] : data[next_data++];
    }
    return c;
}

inline bool bin_property_holds(const SecureCodeConfig& c) {
    const int total = c.K + c.K2;
    if (static_cast<int>(c.perm.size()) != total) return false;
    std::vector<char> seen(total, 0);
    for (int v : c.perm) {
        if (v < 0 || v >= total || seen[v]) return false;
        seen[v] = 1;
    }
    for (int l = 0; l < c.K2; ++l) {
        int count = 0;
        if (c.bin_start[l + 1] - c.bin_start[l] > c.B) return false;
        for (int i = c.bin_start[l]; i < c.bin_start[l + 1]; ++i) count += c.perm[i] < c.K2;
        if (count != 1) return false;
    }
    return true;
}

template <class T>
std::vector<T> encode_labels(const SecureCodeConfig& c, const std::vector<T>& r, const std::vector<T>& s) {
    detail::require(static_cast<int>(r.size()) == c.K2 && static_cast<int>(s.size()) == c.K,
                    "prefix/labels length mismatch");
    std::vector<T> out(c.perm.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int src = c.perm[i];
        out[i] = src < c.K2 ? r[src] : s[src - c.K2];
    }
    return out;
}

// System load minus effective load minus the prefix rate.
inline double epsilon_N(const SecureCodeConfig& c, double sigma2_eaves) {
    return c.system_load() - c.effective_load() - capacity_bits(sigma2_eaves);
}

// ---- full-RSB overlap for Phi(x) = x^2 / 2 ----

struct FyodorovThresholds {
    double gamma_star;  // +inf at mu = 1
    double gamma_th;
};

inline FyodorovThresholds fyodorov_thresholds(double mu) {
    detail::require(mu > 0.0 && mu <= 1.0, "mu must lie in (0,1]");
    const double gs = mu == 1.0 ? std::numeric_limits<double>::infinity() : mu / ((mu - 1.0) * (mu - 1.0));
    return {gs, 2.0 * mu / (2.0 - mu)};
}

inline double fyodorov_cubic(double x, double gamma, double mu) {
    const auto th = fyodorov_thresholds(mu);
    return ((mu * x + 3.0 * (0.5 - mu)) * x + 3.0 * (mu - 1.0)) * x + 1.0 / gamma - 1.0 / th.gamma_star;
}

// Root of the cubic in [0,1]; the cubic is strictly decreasing there.
inline double fyodorov_root(double gamma, double mu) {
    auto c = [&](double x) { return fyodorov_cubic(x, gamma, mu); };
    const double c0 = c(0.0), c1 = c(1.0);
    // endpoints within rounding of a threshold
    if (c0 <= 0.0 && c0 > -1e-12) return 0.0;
    if (c1 >= 0.0 && c1 < 1e-12) return 1.0;
    if ((c0 > 0.0) == (c1 > 0.0)) throw DomainError("no admissible cubic root in [0,1]");
    std::uintmax_t iters = 200;
    const auto br = boost::math::tools::toms748_solve(
        c, 0.0, 1.0, c0, c1, [](double l, double r) { return r - l < 1e-16; }, iters);
    return 0.5 * (br.first + br.second);
}

inline double fyodorov_overlap(double gamma, double mu) {
    detail::require(gamma > 0.0, "SNR must be > 0");
    const auto th = fyodorov_thresholds(mu);
    if (gamma <= th.gamma_th) return 0.0;
    if (gamma > th.gamma_star) return std::sqrt(1.0 - mu / ((1.0 - mu) * gamma));
    const double x = fyodorov_root(gamma, mu);
    return std::sqrt(mu * std::pow(1.0 - x, 3));
}

// Bits per label dimension achievable with overlap m1 on the sphere.
inline double kl_rate_bound(double m1, double mu) {
    const double p = 2.0 * m1 - 1.0;
    detail::require(p > 0.0 && p < 1.0, "kl_rate_bound needs m1 in (0.5, 1)");
    detail::require(mu > 0.0 && mu <= 1.0, "mu must lie in (0,1]");
    const double q = std::sqrt(1.0 - p * p);
    const double a = (1.0 + q) / (2.0 * q), b = (1.0 - q) / (2.0 * q);
    return mu * (a * std::log2(a) - (b > 0.0 ? b * std::log2(b) : 0.0));
}

// Wyner's limit for the transformed symbol with artificial noise, in bits.
inline double wyner_limit_fig10(double sigma1_sq, double sigma2_sq, double P_S, double theta2) {
    detail::require(sigma1_sq > 0.0 && sigma2_sq > 0.0 && P_S > 0.0 && theta2 >= 0.0, "invalid wiretap parameters");
    const double s = P_S * P_S / 2.0;
    return 0.5 * (std::log2(1.0 + s / sigma1_sq + theta2 / sigma1_sq) -
                  std::log2(1.0 + s / sigma2_sq + theta2 / sigma2_sq));
}

// Smallest artificial noise that keeps the eavesdropper at or below its
// threshold; zero when it is already blind.
inline double blinding_noise(double sigma2_sq, double P_S, double mu) {
    return std::max(0.0, P_S / fyodorov_thresholds(mu).gamma_th - sigma2_sq);
}

inline double rate_from_overlap(double m1, double mu) { return m1 > 0.5 ? kl_rate_bound(m1, mu) : 0.0; }

// Rate at a caller-chosen theta2; refuses settings that leave the eavesdropper
// with a nonzero overlap.
inline double fyodorov_rate_at(double sigma1_sq, double sigma2_sq, double P_S, double mu, double theta2) {
    detail::require(theta2 >= 0.0, "artificial noise variance must be >= 0");
    if (fyodorov_overlap(P_S / (sigma2_sq + theta2), mu) > 0.0)
        throw InfeasibleError("eavesdropper is not blinded at this theta2");
    return rate_from_overlap(fyodorov_overlap(P_S / (sigma1_sq + theta2), mu), mu);
}

inline double fyodorov_rate_at(double sigma1_sq, double sigma2_sq, double P_S, double mu) {
    const double theta2 = blinding_noise(sigma2_sq, P_S, mu);
    return rate_from_overlap(fyodorov_overlap(P_S / (sigma1_sq + theta2), mu), mu);
}

struct SecureRate {
    double R_max = 0.0;
    double mu_opt = 0.0;
    double theta2 = 0.0;
    double C_W = 0.0;
};

inline SecureRate fyodorov_secure_rate(double sigma1_sq, double sigma2_sq, double P_S, int grid = 200) {
    detail::require(sigma1_sq > 0.0 && sigma2_sq > 0.0 && P_S > 0.0, "secure rate parameters must be > 0");
    const double mu_max = 1.0;
    auto rate = [&](double mu) { return fyodorov_rate_at(sigma1_sq, sigma2_sq, P_S, mu); };
    int best = grid;
    double rbest = -1.0;
    for (int i = 1; i <= grid; ++i) {
        const double r = rate(mu_max * i / grid);
        if (r > rbest) best = i, rbest = r;
    }
    double mu = mu_max * best / grid;
    if (rbest > 0.0) {
        const double lo = mu_max * (best - 1) / grid, hi = std::min(mu_max, mu_max * (best + 1) / grid);
        const auto [x, negr] = minimize_1d([&](double t) { return -rate(t); }, std::max(lo, 1e-12), hi);
        if (-negr > rbest) mu = x, rbest = -negr;
    }
    SecureRate out;
    out.R_max = std::max(0.0, rbest);
    out.mu_opt = mu;
    out.theta2 = blinding_noise(sigma2_sq, P_S, mu);
    out.C_W = std::max(0.0, wyner_limit_fig10(sigma1_sq, sigma2_sq, P_S, out.theta2));
    return out;
}

}  // namespace gfield
