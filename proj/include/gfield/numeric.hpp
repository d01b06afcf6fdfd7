#pragma once

// Small 1-D helpers shared by the solvers: bracketed root refinement and
// local minimization, both delegated to Boost.Math.

#include <cstdint>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

namespace gfield {

struct Crossing {
    double x = 0.0;
    int direction = 0;  // -1: h goes from + to - (attracting for m -> m + h(m)), +1 otherwise
};

// All sign changes of h on an n-interval uniform grid over [a, b], each refined
// to full precision. Exact zeros on grid nodes are reported as they are.
template <class H>
std::vector<Crossing> scan_roots(H&& h, double a, double b, int n) {
    std::vector<Crossing> out;
    std::vector<double> xs(n + 1), hs(n + 1);
    for (int i = 0; i <= n; ++i) {
        xs[i] = a + (b - a) * i / n;
        hs[i] = h(xs[i]);
    }
    auto tol = [](double l, double r) { return r - l <= 1e-15 * (1.0 + std::abs(l)); };
    for (int i = 0; i <= n; ++i) {
        if (hs[i] == 0.0) {
            const double left = i > 0 ? hs[i - 1] : -hs[std::min(i + 1, n)];
            const double right = i < n ? hs[i + 1] : -hs[std::max(i - 1, 0)];
            out.push_back({xs[i], (left > 0.0 || right < 0.0) ? -1 : 1});
            continue;
        }
        if (i == n || hs[i + 1] == 0.0) continue;
        if ((hs[i] > 0.0) != (hs[i + 1] > 0.0)) {
            std::uintmax_t iters = 200;
            const auto br = boost::math::tools::toms748_solve(h, xs[i], xs[i + 1], hs[i], hs[i + 1], tol, iters);
            out.push_back({0.5 * (br.first + br.second), hs[i] > 0.0 ? -1 : 1});
        }
    }
    return out;
}

// Local minimum of f on [a, b]; returns (x, f(x)).
template <class F>
std::pair<double, double> minimize_1d(F&& f, double a, double b) {
    auto r = boost::math::tools::brent_find_minima(f, a, b, 52);
    return {r.first, r.second};
}

}  // namespace gfield
