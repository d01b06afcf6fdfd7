#pragma once

// Figure-data runners behind the command line tool. Each returns a Table whose
// column schema is fixed per subcommand; formatting is locale-independent.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gfield/decoupled_channel.hpp"
#include "gfield/exact_sim.hpp"
#include "gfield/parallel.hpp"
#include "gfield/pure_lambda.hpp"
#include "gfield/rs_core.hpp"
#include "gfield/secrecy.hpp"

namespace gfield {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 15);
    return std::string(buf, r.ptr);
}
inline std::string fmt(int x) { return std::to_string(x); }
inline std::string fmt(std::uint64_t x) { return std::to_string(x); }

inline void write_csv(std::ostream& os, const Table& t) {
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os << ',';
            const auto& c = cells[i];
            if (c.find_first_of(",\"\n") != std::string::npos) {
                os << '"';
                for (char ch : c) os << (ch == '"' ? "\"\"" : std::string(1, ch));
                os << '"';
            } else {
                os << c;
            }
        }
        os << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
}

inline void write_json(std::ostream& os, const Table& t) {
    auto arr = nlohmann::json::array();
    for (const auto& r : t.rows) {
        nlohmann::json o = nlohmann::json::object();
        for (std::size_t i = 0; i < t.header.size() && i < r.size(); ++i) {
            double v = 0.0;
            const auto res = std::from_chars(r[i].data(), r[i].data() + r[i].size(), v);
            if (res.ec == std::errc() && res.ptr == r[i].data() + r[i].size())
                o[t.header[i]] = v;
            else
                o[t.header[i]] = r[i];
        }
        arr.push_back(o);
    }
    os << arr.dump(2) << '\n';
}

// "x" or "p/q".
inline double parse_scalar(const std::string& s) {
    const auto slash = s.find('/');
    std::size_t used = 0;
    if (slash == std::string::npos) {
        const double v = std::stod(s, &used);
        if (used != s.size()) throw DomainError("bad number '" + s + "'");
        return v;
    }
    return parse_scalar(s.substr(0, slash)) / parse_scalar(s.substr(slash + 1));
}

// "a:b:step" (inclusive) or a single value.
inline std::vector<double> parse_range(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() == 1) return {parse_scalar(parts[0])};
    if (parts.size() != 3) throw DomainError("range must be a:b:step, got '" + spec + "'");
    const double a = parse_scalar(parts[0]), b = parse_scalar(parts[1]), h = parse_scalar(parts[2]);
    if (!(h > 0.0) || b < a) throw DomainError("range needs step > 0 and b >= a: '" + spec + "'");
    const long n = static_cast<long>(std::floor((b - a) / h + 1e-9));
    if (n > 10'000'000) throw DomainError("range too long: '" + spec + "'");
    std::vector<double> out;
    for (long i = 0; i <= n; ++i) {
        // snap to the step's decimal grid so 0.3 + 12*0.1 prints as 1.5
        const double x = a + i * h;
        out.push_back(std::round(x * 1e12) / 1e12);
    }
    return out;
}

struct ExperimentConfig {
    std::string command;
    int lambda = 2;
    std::vector<double> coeffs;  // overrides lambda when nonempty
    double sigma2 = 0.1;
    double sigma_hat2 = 0.0;     // 0: matched
    std::string r;               // empty: per-subcommand default
    double m_step = 0.001;
    int quad_order = kDefaultQuadOrder;
    double tol = 1e-10;
    int max_iter = 10000;
    double damping = 0.5;
    int grid = 11;
    int probe_starts = 100;
    std::uint64_t seed = 1;
    int trials = 100;
    int K = 12;
    int N = 20;
    double sigma2_eaves = 0.0;
    double ps = 1.0;
    std::string snr_db = "10:30:0.25";
    std::string mu = "2/3";
    std::string out;
    std::string format = "csv";
    int threads = default_threads();

    CovarianceFn cov() const { return coeffs.empty() ? CovarianceFn::pure(lambda) : CovarianceFn(coeffs); }
    bool pure() const { return coeffs.empty() || (cov().pure_order() > 0 && cov().coeff(cov().pure_order()) == 1.0); }
    int order() const { return coeffs.empty() ? lambda : cov().pure_order(); }
    bool matched() const { return sigma_hat2 <= 0.0 || sigma_hat2 == sigma2; }
    double sigma() const { return std::sqrt(sigma2); }
    double sigma_hat() const { return matched() ? sigma() : std::sqrt(sigma_hat2); }
    std::vector<double> loads(const char* fallback) const { return parse_range(r.empty() ? fallback : r); }
};

inline void apply_json(ExperimentConfig& c, const nlohmann::json& j) {
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("command", c.command);
    get("lambda", c.lambda);
    get("coeffs", c.coeffs);
    get("sigma2", c.sigma2);
    get("sigma-hat2", c.sigma_hat2);
    if (j.contains("r")) c.r = j.at("r").is_string() ? j.at("r").get<std::string>() : fmt(j.at("r").get<double>());
    get("m-step", c.m_step);
    get("quad-order", c.quad_order);
    get("tol", c.tol);
    get("max-iter", c.max_iter);
    get("damping", c.damping);
    get("grid", c.grid);
    get("probe-starts", c.probe_starts);
    get("seed", c.seed);
    get("trials", c.trials);
    get("K", c.K);
    get("N", c.N);
    get("sigma2-eaves", c.sigma2_eaves);
    get("ps", c.ps);
    get("snr-db", c.snr_db);
    if (j.contains("mu")) c.mu = j.at("mu").is_string() ? j.at("mu").get<std::string>() : fmt(j.at("mu").get<double>());
    get("out", c.out);
    get("format", c.format);
    get("threads", c.threads);
}

namespace detail {

inline std::string join(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ";" : "") + fmt(xs[i]);
    return s;
}

// 1-D matched landscape for any covariance; equals L_m for pure fields.
inline double landscape_value(const ExperimentConfig& c, double R, double m, const QuadratureRule& rule) {
    if (c.pure()) return Lmod(PureModel(c.order(), c.sigma2, R), m, rule);
    const MatchedCurve mc{c.sigma(), R, c.cov()};
    return mc.H(m, rule) - 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * c.sigma2);
}

}  // namespace detail

inline Table run_landscape(const ExperimentConfig& c) {
    const QuadratureRule rule(c.quad_order);
    detail::require(c.m_step > 0.0 && c.m_step <= 1.0, "--m-step must be in (0,1]");
    const int n = static_cast<int>(std::floor(1.0 / c.m_step + 1e-9));
    std::vector<double> ms;
    for (int i = 0; i <= n; ++i) ms.push_back(std::min(1.0, std::round(i * c.m_step * 1e12) / 1e12));
    if (ms.back() < 1.0) ms.push_back(1.0);
    const auto Rs = c.loads("1.76");
    const auto vals = parallel_map<double>(
        Rs.size() * ms.size(),
        [&](std::size_t i) { return detail::landscape_value(c, Rs[i / ms.size()], ms[i % ms.size()], rule); },
        c.threads);
    Table t{{"R", "m", "L"}, {}};
    for (std::size_t i = 0; i < vals.size(); ++i)
        t.rows.push_back({fmt(Rs[i / ms.size()]), fmt(ms[i % ms.size()]), fmt(vals[i])});
    return t;
}

inline Table run_overlap_sweep(const ExperimentConfig& c) {
    const QuadratureRule rule(c.quad_order);
    const auto Rs = c.loads("0.1:3:0.1");
    struct Row {
        double m_star, q_star, m_amp;
        std::vector<double> fps;
    };
    const auto rows = parallel_map<Row>(
        Rs.size(),
        [&](std::size_t i) {
            const double R = Rs[i];
            Row r{};
            if (!c.matched()) {
                const auto p = RsParams::make(c.sigma(), c.sigma_hat(), R, c.cov());
                SolveOptions so;
                so.grid = c.grid;
                so.fp = {c.damping, c.tol, c.max_iter};
                const auto sol = solve_rs(p, so, rule);
                r.m_star = sol.point.m;
                r.q_star = sol.point.Q;
                const bool lin = c.cov().coeff(1) > 0.0;
                r.m_amp = fixed_point_iterate(p, lin ? RsPoint{0, 0} : RsPoint{1e-6, 1e-6}, so.fp, rule).point.m;
                for (const auto& f : sol.fixed_points) r.fps.push_back(f.m);
                return r;
            }
            if (c.pure()) {
                const PureModel pm(c.order(), c.sigma2, R);
                r.m_star = r.q_star = overlap(pm, rule);
                r.m_amp = converge(pm, pm.lambda == 1 ? 0.0 : 1e-6, c.tol, c.max_iter, rule).m;
                for (const auto& f : fixed_points(pm, 1000, rule)) r.fps.push_back(f.m);
                return r;
            }
            const auto ms = matched_solve(c.sigma(), R, c.cov(), 1000, rule);
            r.m_star = r.q_star = ms.m_star;
            r.fps = ms.fixed_points;
            const MatchedCurve mc{c.sigma(), R, c.cov()};
            double m = c.cov().coeff(1) > 0.0 ? 0.0 : 1e-6;
            for (int it = 0; it < c.max_iter; ++it) {
                const double nm = mc.map(m, rule);
                const bool done = std::fabs(nm - m) < c.tol;
                m = nm;
                if (done) break;
            }
            r.m_amp = m;
            return r;
        },
        c.threads);
    Table t{{"R", "m_star", "q_star", "m_amp", "gap", "n_fixed_points", "fixed_points"}, {}};
    for (std::size_t i = 0; i < Rs.size(); ++i) {
        const auto& r = rows[i];
        t.rows.push_back({fmt(Rs[i]), fmt(r.m_star), fmt(r.q_star), fmt(r.m_amp), fmt(r.m_star - r.m_amp),
                          fmt(static_cast<int>(r.fps.size())), detail::join(r.fps)});
    }
    return t;
}

inline Table run_rate_sweep(const ExperimentConfig& c) {
    const QuadratureRule rule(c.quad_order);
    const auto Rs = c.loads("0.1:3:0.1");
    const auto vals = parallel_map<double>(
        Rs.size(),
        [&](std::size_t i) {
            if (c.pure()) return info_rate(PureModel(c.order(), c.sigma2, Rs[i]), rule);
            const auto ms = matched_solve(c.sigma(), Rs[i], c.cov(), 1000, rule);
            return ms.H - 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * c.sigma2);
        },
        c.threads);
    Table t{{"R", "info_rate", "r_log2", "capacity"}, {}};
    const double C = shannon_capacity(c.sigma2);
    for (std::size_t i = 0; i < Rs.size(); ++i)
        t.rows.push_back({fmt(Rs[i]), fmt(vals[i]), fmt(Rs[i] * std::numbers::ln2), fmt(C)});
    return t;
}

inline Table run_convergence_probe(const ExperimentConfig& c) {
    if (!c.pure()) throw DomainError("convergence-probe needs a pure order field (--lambda)");
    const QuadratureRule rule(c.quad_order);
    const auto Rs = c.loads("0.4:3:0.05");
    const auto starts = default_probe_starts(c.probe_starts);
    const auto res = parallel_map<ProbeResult>(
        Rs.size(),
        [&](std::size_t i) {
            return convergence_probe(PureModel(c.order(), c.sigma2, Rs[i]), starts, c.tol, c.max_iter, rule);
        },
        c.threads);
    Table t{{"R", "max_iterations", "worst_m0", "capped"}, {}};
    for (std::size_t i = 0; i < Rs.size(); ++i)
        t.rows.push_back({fmt(Rs[i]), fmt(res[i].max_iterations), fmt(res[i].worst_m0), res[i].capped ? "1" : "0"});
    return t;
}

inline SimConfig sim_config(const ExperimentConfig& c) {
    SimConfig s;
    s.K = c.K;
    s.N = c.N;
    s.cov = c.cov();
    s.sigma = c.sigma();
    s.sigma_hat = c.sigma_hat();
    s.trials = c.trials;
    s.seed = c.seed;
    s.threads = c.threads;
    s.sigma_eaves = c.sigma2_eaves > 0.0 ? std::sqrt(c.sigma2_eaves) : 0.0;
    return s;
}

inline Table run_simulate(const ExperimentConfig& c) {
    const auto s = sim_config(c);
    const auto rs = run_trials(s);
    Table t{{"trial", "K", "N", "lambda", "sigma", "sigma_hat", "overlap", "log_partition", "seed"}, {}};
    const bool wiretap = s.sigma_eaves > 0.0;
    if (wiretap) t.header.insert(t.header.end(), {"sigma_eaves", "overlap_eaves", "log_partition_eaves"});
    for (const auto& r : rs) {
        std::vector<std::string> row{fmt(r.trial),       fmt(c.K),          fmt(c.N),
                                     fmt(c.order()),     fmt(s.sigma),      fmt(s.sigma_hat),
                                     fmt(r.overlap),     fmt(r.log_partition), fmt(r.seed)};
        if (wiretap) row.insert(row.end(), {fmt(s.sigma_eaves), fmt(r.overlap_eaves), fmt(r.log_partition_eaves)});
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Table run_decoupling_check(const ExperimentConfig& c) {
    const QuadratureRule rule(c.quad_order);
    const auto s = sim_config(c);
    const double R = static_cast<double>(c.K) / c.N;
    const auto p = RsParams::make(s.sigma, s.sigma_hat, R, s.cov);
    SolveOptions so;
    so.grid = c.grid;
    so.fp = {c.damping, c.tol, c.max_iter};
    const auto sol = solve_rs(p, so, rule);
    // E = 0 (uninformative phase) is the rho_hat -> inf limit
    const auto ch = E_beta(p, sol.point.Q, sol.point.m) > 0.0
                        ? DecoupledChannel::from_rs(p, sol.point)
                        : DecoupledChannel::from_noise(0.0, std::numeric_limits<double>::infinity());
    const auto rs = run_trials(s);

    Table t{{"quantity", "kappa", "tau", "predicted", "empirical", "stderr"}, {}};
    auto add = [&](const std::string& q, int k, int ta, double pred, const Estimate& e) {
        t.rows.push_back({q, fmt(k), fmt(ta), fmt(pred), fmt(e.mean), fmt(e.stderr_)});
    };
    add("overlap", 1, 1, sol.point.m, empirical_overlap(rs));
    add("power", 0, 2, sol.point.Q, empirical_joint_moment(rs, 0, 2));
    for (auto [k, ta] : std::vector<std::pair<int, int>>{{1, 1}, {0, 2}, {1, 3}, {0, 4}, {1, 2}, {0, 1}})
        add("moment", k, ta, ch.moment(k, ta, rule), empirical_joint_moment(rs, k, ta));
    std::vector<double> orth;
    for (const auto& r : rs) {
        double acc = 0.0;
        for (std::size_t k = 0; k < r.s.size(); ++k) acc += (r.s[k] - r.shat[k]) * r.shat[k];
        orth.push_back(acc / static_cast<double>(r.s.size()));
    }
    add("orthogonality", 1, 1, 0.0, summarize(orth));
    add("cross_entropy", 0, 0, cross_entropy(p, sol), empirical_cross_entropy(rs));
    return t;
}

inline Table run_fyodorov_curve(const ExperimentConfig& c) {
    const double mu = parse_scalar(c.mu);
    Table t{{"snr_db", "gamma", "m_star"}, {}};
    for (double db : parse_range(c.snr_db)) {
        const double g = std::pow(10.0, db / 10.0);
        t.rows.push_back({fmt(db), fmt(g), fmt(fyodorov_overlap(g, mu))});
    }
    return t;
}

inline Table run_secrecy_curve(const ExperimentConfig& c) {
    const auto dbs = parse_range(c.snr_db);
    const double s2 = c.sigma2_eaves > 0.0 ? c.sigma2_eaves : 1.0;
    const auto res = parallel_map<SecureRate>(
        dbs.size(), [&](std::size_t i) { return fyodorov_secure_rate(c.ps * std::pow(10.0, -dbs[i] / 10.0), s2, c.ps); },
        c.threads);
    Table t{{"snr_db", "r_max", "c_w", "mu_opt", "theta2"}, {}};
    for (std::size_t i = 0; i < dbs.size(); ++i)
        t.rows.push_back({fmt(dbs[i]), fmt(res[i].R_max), fmt(res[i].C_W), fmt(res[i].mu_opt), fmt(res[i].theta2)});
    return t;
}

inline Table run_thresholds(const ExperimentConfig& c) {
    Table t{{"quantity", "value"}, {}};
    t.rows.push_back({"capacity", fmt(shannon_capacity(c.sigma2))});
    t.rows.push_back({"r_star", fmt(r_star(c.sigma2))});
    if (c.order() == 2) {
        t.rows.push_back({"r_th", fmt(r_th_quadratic(c.sigma2))});
        t.rows.push_back({"sigma_c2", fmt(critical_sigma2_quadratic())});
    }
    return t;
}

inline const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"landscape",       "overlap-sweep", "rate-sweep",
                                                "convergence-probe", "simulate",      "secrecy-curve",
                                                "fyodorov-curve",  "decoupling-check", "thresholds"};
    return names;
}

inline Table run(const ExperimentConfig& c) {
    detail::require(c.sigma2 > 0.0, "--sigma2 must be > 0");
    detail::require(c.quad_order >= 1, "--quad-order must be >= 1");
    if (c.command == "landscape") return run_landscape(c);
    if (c.command == "overlap-sweep") return run_overlap_sweep(c);
    if (c.command == "rate-sweep") return run_rate_sweep(c);
    if (c.command == "convergence-probe") return run_convergence_probe(c);
    if (c.command == "simulate") return run_simulate(c);
    if (c.command == "secrecy-curve") return run_secrecy_curve(c);
    if (c.command == "fyodorov-curve") return run_fyodorov_curve(c);
    if (c.command == "decoupling-check") return run_decoupling_check(c);
    if (c.command == "thresholds") return run_thresholds(c);
    throw DomainError("unknown subcommand '" + c.command + "'");
}

}  // namespace gfield
