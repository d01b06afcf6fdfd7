#pragma once

// Exact Bayesian inference for small K by enumerating all 2^K label vectors in
// Gray-code order. The field is first reduced to its multilinear form on the
// hypercube (u_i^2 = 1), so one flip touches only terms containing that bit.

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "gfield/errors.hpp"
#include "gfield/field_model.hpp"
#include "gfield/parallel.hpp"
#include "gfield/rng.hpp"

namespace gfield {

inline constexpr int kMaxExactK = 24;

struct MultilinearForm {
    struct Term {
        int n;
        std::uint32_t mask;
        double coef;
    };
    int K = 0;
    int N = 0;
    std::vector<std::vector<Term>> all;      // per output n
    std::vector<std::vector<Term>> by_bit;   // terms whose mask contains bit k

    // V_n at the label vector whose -1 entries are the set bits of neg.
    std::vector<double> eval(std::uint32_t neg) const {
        std::vector<double> v(N, 0.0);
        for (int n = 0; n < N; ++n)
            for (const auto& t : all[n]) v[n] += (std::popcount(t.mask & neg) & 1) ? -t.coef : t.coef;
        return v;
    }
};

inline MultilinearForm reduce(const Field& field) {
    detail::require(!field.empty(), "empty field");
    MultilinearForm f;
    f.K = field.front().K;
    f.N = field.front().N;
    detail::require(f.K >= 1 && f.K <= kMaxExactK, "exact enumeration needs 1 <= K <= 24");
    std::vector<std::unordered_map<std::uint32_t, double>> acc(f.N);
    for (const auto& t : field) {
        const std::size_t b = t.block();
        std::vector<int> idx(t.order, 0);
        for (std::size_t flat = 0; flat < b; ++flat) {
            // repeated indices cancel in pairs, so the monomial is the XOR of bits
            std::uint32_t mask = 0;
            for (int a = 0; a < t.order; ++a) mask ^= 1u << idx[a];
            for (int n = 0; n < f.N; ++n) acc[n][mask] += t.scale * t.row(n)[flat];
            for (int a = t.order - 1; a >= 0; --a) {
                if (++idx[a] < t.K) break;
                idx[a] = 0;
            }
        }
    }
    f.all.resize(f.N);
    f.by_bit.resize(f.K);
    for (int n = 0; n < f.N; ++n)
        for (const auto& [mask, c] : acc[n]) {
            if (c == 0.0) continue;
            f.all[n].push_back({n, mask, c});
            for (int k = 0; k < f.K; ++k)
                if (mask >> k & 1u) f.by_bit[k].push_back({n, mask, c});
        }
    return f;
}

// True when every nonzero order is even, so V(u) = V(-u).
inline bool sign_symmetric(const Field& field) {
    for (const auto& t : field)
        if (t.order % 2 == 1) return false;
    return true;
}

struct Instance {
    Field field;
    Labels s;
    std::vector<double> y;
    double sigma = 0.0;
    double sigma_hat = 0.0;
    std::uint64_t seed = 0;
};

inline std::vector<double> add_noise(const std::vector<double>& x, double sigma, Engine& eng) {
    if (sigma == 0.0) return x;
    std::normal_distribution<double> g(0.0, sigma);
    std::vector<double> y(x);
    for (auto& v : y) v += g(eng);
    return y;
}

inline Instance generate_instance(int K, int N, const CovarianceFn& cov, double sigma, double sigma_hat,
                                  std::uint64_t seed) {
    detail::require(K >= 1 && K <= kMaxExactK, "exact simulation needs 1 <= K <= 24");
    detail::require(sigma >= 0.0 && sigma_hat > 0.0, "need sigma >= 0 and sigma_hat > 0");
    detail::require(N >= 1, "N must be >= 1");
    Instance in;
    in.field = sample_field(K, N, cov, seed);
    auto lab = make_stream(seed, {kTagLabels});
    in.s = random_labels(K, lab);
    auto noise = make_stream(seed, {kTagNoise});
    in.y = add_noise(evaluate(in.field, in.s), sigma, noise);
    in.sigma = sigma;
    in.sigma_hat = sigma_hat;
    in.seed = seed;
    return in;
}

struct Posterior {
    std::vector<double> mean;     // E[u_k | y]
    std::vector<double> p_plus;   // P(u_k = +1 | y)
    std::vector<double> p_minus;
    double log_partition = 0.0;   // log sum_u exp(-|y - V(u)|^2 / (2 sigma_hat^2))
};

// If gauge_bit >= 0, bit gauge_bit is held at gauge_neg and the partition
// function is doubled (valid for sign-symmetric fields).
inline Posterior posterior(const MultilinearForm& f, const std::vector<double>& y, double sigma_hat,
                           int gauge_bit = -1, bool gauge_neg = false) {
    detail::require(static_cast<int>(y.size()) == f.N, "observation length does not match field N");
    detail::require(sigma_hat > 0.0, "sigma_hat must be > 0");
    const int K = f.K;
    const double inv2s2 = 1.0 / (2.0 * sigma_hat * sigma_hat);

    std::vector<int> free_bits;
    for (int k = 0; k < K; ++k)
        if (k != gauge_bit) free_bits.push_back(k);
    std::uint32_t neg = (gauge_bit >= 0 && gauge_neg) ? (1u << gauge_bit) : 0u;
    std::vector<double> v = f.eval(neg);

    double lmax = -std::numeric_limits<double>::infinity();
    double z = 0.0;
    std::vector<double> plus(K, 0.0), minus(K, 0.0);
    const std::uint64_t total = std::uint64_t{1} << free_bits.size();

    for (std::uint64_t i = 0; i < total; ++i) {
        if (i > 0) {
            const int k = free_bits[std::countr_zero(i)];
            for (const auto& t : f.by_bit[k])
                v[t.n] += (std::popcount(t.mask & neg) & 1) ? 2.0 * t.coef : -2.0 * t.coef;
            neg ^= 1u << k;
        }
        double e = 0.0;
        for (int n = 0; n < f.N; ++n) {
            const double d = y[n] - v[n];
            e += d * d;
        }
        const double lw = -e * inv2s2;
        if (lw > lmax) {
            const double r = std::exp(lmax - lw);
            z *= r;
            for (int k = 0; k < K; ++k) plus[k] *= r, minus[k] *= r;
            lmax = lw;
        }
        const double w = std::exp(lw - lmax);
        z += w;
        for (int k = 0; k < K; ++k) (neg >> k & 1u ? minus[k] : plus[k]) += w;
    }

    Posterior out;
    out.log_partition = lmax + std::log(z) + (gauge_bit >= 0 ? std::numbers::ln2 : 0.0);
    out.mean.resize(K);
    out.p_plus.resize(K);
    out.p_minus.resize(K);
    for (int k = 0; k < K; ++k) {
        out.p_plus[k] = plus[k] / z;
        out.p_minus[k] = minus[k] / z;
        out.mean[k] = out.p_plus[k] - out.p_minus[k];
    }
    return out;
}

inline Posterior posterior(const Instance& in) {
    const auto f = reduce(in.field);
    if (sign_symmetric(in.field)) return posterior(f, in.y, in.sigma_hat, 0, in.s[0] < 0.0);
    return posterior(f, in.y, in.sigma_hat);
}

inline std::vector<double> posterior_mean(const Instance& in) { return posterior(in).mean; }

inline double overlap(const Labels& s, const std::vector<double>& shat) {
    detail::require(s.size() == shat.size() && !s.empty(), "overlap needs equal nonempty vectors");
    double acc = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) acc += s[k] * shat[k];
    return acc / static_cast<double>(s.size());
}

// Per-instance cross entropy per output symbol, in nats.
inline double cross_entropy_term(double log_partition, int K, int N, double sigma_hat) {
    return 0.5 * std::log(2.0 * std::numbers::pi * sigma_hat * sigma_hat) +
           static_cast<double>(K) / N * std::numbers::ln2 - log_partition / N;
}

// ---- Monte Carlo over instances ----

struct SimConfig {
    int K = 12;
    int N = 20;
    CovarianceFn cov = CovarianceFn::pure(1);
    double sigma = std::sqrt(0.1);
    double sigma_hat = std::sqrt(0.1);
    int trials = 100;
    std::uint64_t seed = 1;
    int threads = default_threads();
    double sigma_eaves = 0.0;  // > 0 adds a second terminal observing the same x
};

struct TrialResult {
    int trial = 0;
    std::uint64_t seed = 0;
    double overlap = 0.0;
    double log_partition = 0.0;
    double cross_entropy = 0.0;
    std::vector<double> s;
    std::vector<double> shat;
    // second terminal, when requested
    double overlap_eaves = 0.0;
    double log_partition_eaves = 0.0;
};

inline std::uint64_t trial_seed(std::uint64_t seed, int trial) {
    return stream_key(seed, {kTagTrial, static_cast<std::uint64_t>(trial)});
}

inline TrialResult run_trial(const SimConfig& c, int trial) {
    const auto in = generate_instance(c.K, c.N, c.cov, c.sigma, c.sigma_hat, trial_seed(c.seed, trial));
    const auto f = reduce(in.field);
    const bool sym = sign_symmetric(in.field);
    auto post = [&](const std::vector<double>& y) {
        return sym ? posterior(f, y, c.sigma_hat, 0, in.s[0] < 0.0) : posterior(f, y, c.sigma_hat);
    };
    const auto p = post(in.y);
    TrialResult r;
    r.trial = trial;
    r.seed = in.seed;
    r.overlap = overlap(in.s, p.mean);
    r.log_partition = p.log_partition;
    r.cross_entropy = cross_entropy_term(p.log_partition, c.K, c.N, c.sigma_hat);
    r.s = in.s;
    r.shat = p.mean;
    if (c.sigma_eaves > 0.0) {
        auto noise = make_stream(in.seed, {kTagNoise, 1});
        const auto y2 = add_noise(evaluate(in.field, in.s), c.sigma_eaves, noise);
        const auto p2 = post(y2);
        r.overlap_eaves = overlap(in.s, p2.mean);
        r.log_partition_eaves = p2.log_partition;
    }
    return r;
}

inline std::vector<TrialResult> run_trials(const SimConfig& c) {
    detail::require(c.trials >= 1, "need at least one trial");
    return parallel_map<TrialResult>(
        static_cast<std::size_t>(c.trials), [&](std::size_t t) { return run_trial(c, static_cast<int>(t)); },
        c.threads);
}

struct Estimate {
    double mean = 0.0;
    double stderr_ = 0.0;
};

inline Estimate summarize(const std::vector<double>& xs) {
    Estimate e;
    const double n = static_cast<double>(xs.size());
    for (double x : xs) e.mean += x;
    e.mean /= n;
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - e.mean) * (x - e.mean);
        e.stderr_ = std::sqrt(ss / (n - 1.0) / n);
    }
    return e;
}

inline Estimate empirical_overlap(const std::vector<TrialResult>& rs) {
    std::vector<double> v;
    for (const auto& r : rs) v.push_back(r.overlap);
    return summarize(v);
}

inline Estimate empirical_cross_entropy(const std::vector<TrialResult>& rs) {
    std::vector<double> v;
    for (const auto& r : rs) v.push_back(r.cross_entropy);
    return summarize(v);
}

// E[s_k^kappa shat_k^tau], averaged over k within a trial, then across trials.
inline Estimate empirical_joint_moment(const std::vector<TrialResult>& rs, int kappa, int tau) {
    detail::require(kappa >= 0 && tau >= 0, "moment orders must be >= 0");
    std::vector<double> v;
    for (const auto& r : rs) {
        double acc = 0.0;
        for (std::size_t k = 0; k < r.s.size(); ++k) acc += std::pow(r.s[k], kappa) * std::pow(r.shat[k], tau);
        v.push_back(acc / static_cast<double>(r.s.size()));
    }
    return summarize(v);
}

}  // namespace gfield
