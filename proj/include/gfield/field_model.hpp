#pragma once

// Gaussian random field V: {-1,+1}^K -> R^N with covariance Phi(<x;y>), built as a
// sum over orders l of i.i.d. Gaussian tensors weighted by sqrt(c_l).

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gfield/errors.hpp"
#include "gfield/rng.hpp"

namespace gfield {

using Labels = std::vector<double>;  // entries +-1

// Phi(u) = sum_l c_l u^l with c_l >= 0.
class CovarianceFn {
public:
    CovarianceFn() = default;
    explicit CovarianceFn(std::vector<double> coeffs) : c_(std::move(coeffs)) {
        detail::require(!c_.empty(), "covariance needs at least one coefficient");
        bool any = false;
        for (double c : c_) {
            detail::require(std::isfinite(c) && c >= 0.0, "covariance coefficients must be finite and >= 0");
            any = any || c > 0.0;
        }
        detail::require(any, "covariance must have a nonzero coefficient");
        while (c_.back() == 0.0) c_.pop_back();
    }

    static CovarianceFn pure(int lambda) {
        detail::require(lambda >= 1, "pure order must be >= 1");
        std::vector<double> c(lambda + 1, 0.0);
        c[lambda] = 1.0;
        return CovarianceFn(std::move(c));
    }

    double operator()(double u) const {
        double acc = 0.0;
        for (std::size_t l = c_.size(); l-- > 0;) acc = acc * u + c_[l];
        return acc;
    }

    double derivative(double u) const {
        double acc = 0.0;
        for (std::size_t l = c_.size(); l-- > 1;) acc = acc * u + static_cast<double>(l) * c_[l];
        return acc;
    }

    int max_order() const { return static_cast<int>(c_.size()) - 1; }
    double coeff(int l) const { return l >= 0 && l <= max_order() ? c_[l] : 0.0; }
    const std::vector<double>& coeffs() const { return c_; }

    // Pure order lambda if exactly one coefficient is nonzero, else 0.
    int pure_order() const {
        int found = 0, count = 0;
        for (int l = 0; l <= max_order(); ++l)
            if (c_[l] > 0.0) found = l, ++count;
        return count == 1 ? found : 0;
    }

private:
    std::vector<double> c_{0.0, 1.0};
};

inline std::size_t ipow(std::size_t base, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

// Order-l block: N rows of K^l unit-variance/K^l entries, amplitude sqrt(c_l).
struct TensorField {
    int order = 1;
    int K = 0;
    int N = 0;
    double scale = 1.0;
    std::uint64_t seed = 0;
    std::vector<double> coef;  // row n starts at n * K^order; first index most significant

    std::size_t block() const { return ipow(static_cast<std::size_t>(K), order); }
    const double* row(int n) const { return coef.data() + static_cast<std::size_t>(n) * block(); }
};

using Field = std::vector<TensorField>;

inline constexpr std::size_t kDefaultCoefficientBudget = 50'000'000;

inline Field sample_field(int K, int N, const CovarianceFn& cov, std::uint64_t seed,
                          std::size_t budget = kDefaultCoefficientBudget) {
    detail::require(K >= 1 && N >= 1, "field needs K >= 1 and N >= 1");
    std::size_t total = 0;
    for (int l = 0; l <= cov.max_order(); ++l)
        if (cov.coeff(l) > 0.0) total += static_cast<std::size_t>(N) * ipow(static_cast<std::size_t>(K), l);
    if (total > budget)
        throw InfeasibleError("field needs " + std::to_string(total) + " coefficients, budget is " +
                              std::to_string(budget));

    Field out;
    for (int l = 0; l <= cov.max_order(); ++l) {
        if (cov.coeff(l) <= 0.0) continue;
        TensorField t;
        t.order = l;
        t.K = K;
        t.N = N;
        t.scale = std::sqrt(cov.coeff(l));
        t.seed = seed;
        const std::size_t b = t.block();
        const double sd = 1.0 / std::sqrt(static_cast<double>(b));
        t.coef.resize(b * N);
        for (int n = 0; n < N; ++n) {
            auto eng = make_stream(seed, {kTagField, static_cast<std::uint64_t>(l), static_cast<std::uint64_t>(n)});
            std::normal_distribution<double> g(0.0, sd);
            double* r = t.coef.data() + static_cast<std::size_t>(n) * b;
            for (std::size_t i = 0; i < b; ++i) r[i] = g(eng);
        }
        out.push_back(std::move(t));
    }
    return out;
}

// Full contraction of one row with s along every axis.
inline double contract(const double* row, int K, int order, const Labels& s) {
    if (order == 0) return row[0];
    std::vector<double> buf(row, row + ipow(static_cast<std::size_t>(K), order));
    std::size_t len = buf.size();
    for (int a = 0; a < order; ++a) {
        const std::size_t out = len / K;
        for (std::size_t i = 0; i < out; ++i) {
            double acc = 0.0;
            const double* p = buf.data() + i * K;
            for (int k = 0; k < K; ++k) acc += p[k] * s[k];
            buf[i] = acc;
        }
        len = out;
    }
    return buf[0];
}

inline std::vector<double> evaluate(const Field& field, const Labels& s) {
    detail::require(!field.empty(), "empty field");
    const int K = field.front().K, N = field.front().N;
    detail::require(static_cast<int>(s.size()) == K, "label length does not match field K");
    std::vector<double> v(N, 0.0);
    for (const auto& t : field) {
        detail::require(t.K == K && t.N == N, "inconsistent field blocks");
        for (int n = 0; n < N; ++n) v[n] += t.scale * contract(t.row(n), K, t.order, s);
    }
    return v;
}

inline Labels random_labels(int K, Engine& eng) {
    Labels s(K);
    std::bernoulli_distribution b(0.5);
    for (auto& x : s) x = b(eng) ? 1.0 : -1.0;
    return s;
}

// Text dump: per block one JSON header line, then N comma-separated rows.
inline void save_field(const std::string& path, const Field& field) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    char buf[32];
    for (const auto& t : field) {
        nlohmann::json h = {{"order", t.order}, {"K", t.K}, {"N", t.N}, {"seed", t.seed}, {"scale", t.scale}};
        os << h.dump() << '\n';
        const std::size_t b = t.block();
        for (int n = 0; n < t.N; ++n) {
            const double* r = t.row(n);
            for (std::size_t i = 0; i < b; ++i) {
                std::snprintf(buf, sizeof buf, "%.17g", r[i]);
                if (i) os << ',';
                os << buf;
            }
            os << '\n';
        }
    }
}

inline Field load_field(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    Field out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto h = nlohmann::json::parse(line);
        TensorField t;
        t.order = h.at("order").get<int>();
        t.K = h.at("K").get<int>();
        t.N = h.at("N").get<int>();
        t.seed = h.at("seed").get<std::uint64_t>();
        t.scale = h.at("scale").get<double>();
        const std::size_t b = t.block();
        t.coef.reserve(b * t.N);
        for (int n = 0; n < t.N; ++n) {
            if (!std::getline(is, line)) throw std::runtime_error("truncated field file " + path);
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) t.coef.push_back(std::stod(cell));
        }
        if (t.coef.size() != b * t.N) throw std::runtime_error("malformed field block in " + path);
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace gfield
