// gfield: figure data and experiments for learning from Gaussian random fields.
//
//   gfield overlap-sweep --lambda 1 --sigma2 0.1 --r 0.3:6:0.1
//   gfield thresholds --lambda 2 --sigma2 0.1
//
// Exit codes: 0 ok, 1 usage, 2 runtime/model error. GFIELD_THREADS sets the
// worker count.

#include <cstring>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "gfield/experiments.hpp"

namespace {

using gfield::ExperimentConfig;

void model_opts(CLI::App* s, ExperimentConfig& c) {
    s->add_option("--lambda", c.lambda, "pure field order")->check(CLI::PositiveNumber);
    s->add_option("--coeffs", c.coeffs, "covariance coefficients c0 c1 ... (overrides --lambda)");
    s->add_option("--sigma2", c.sigma2, "channel noise variance")->check(CLI::PositiveNumber);
    s->add_option("--sigma-hat2", c.sigma_hat2, "inference noise variance (default: matched)");
    s->add_option("--quad-order", c.quad_order, "Gauss-Hermite order")->check(CLI::PositiveNumber);
}

void iter_opts(CLI::App* s, ExperimentConfig& c) {
    s->add_option("--tol", c.tol, "fixed-point tolerance");
    s->add_option("--max-iter", c.max_iter, "iteration cap");
    s->add_option("--damping", c.damping, "damping in (0,1] for the 2-D solver");
    s->add_option("--grid", c.grid, "init grid per axis for the 2-D solver");
}

void sim_opts(CLI::App* s, ExperimentConfig& c) {
    s->add_option("--K", c.K, "label length (<= 24)");
    s->add_option("--N", c.N, "observation length");
    s->add_option("--trials", c.trials, "number of instances");
    s->add_option("--seed", c.seed, "base seed");
}

// --config is applied before CLI parsing so flags override the file.
int preload_config(int argc, char** argv, ExperimentConfig& c) {
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::strcmp(argv[i], "--config") != 0) continue;
        std::ifstream is(argv[i + 1]);
        if (!is) {
            std::cerr << "error: cannot read config " << argv[i + 1] << "\n";
            return 1;
        }
        try {
            gfield::apply_json(c, nlohmann::json::parse(is));
        } catch (const std::exception& e) {
            std::cerr << "error: bad config " << argv[i + 1] << ": " << e.what() << "\n";
            return 1;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    ExperimentConfig cfg;
    if (int rc = preload_config(argc, argv, cfg)) return rc;

    CLI::App app{"Replica analysis, exact simulation and secrecy curves for Gaussian random fields"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON file with option values (keys = long flag names)");
    app.add_option("-o,--out", cfg.out, "output file (default stdout)");
    app.add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber);
    app.fallthrough();

    auto* land = app.add_subcommand("landscape", "L(m) on a grid of m for each load: columns R,m,L");
    model_opts(land, cfg);
    land->add_option("--r", cfg.r, "load or range a:b:step (default 1.76)");
    land->add_option("--m-step", cfg.m_step, "grid step in m");

    auto* ov = app.add_subcommand("overlap-sweep", "m*, AMP overlap and fixed points versus load");
    model_opts(ov, cfg);
    iter_opts(ov, cfg);
    ov->add_option("--r", cfg.r, "load range a:b:step (default 0.1:3:0.1)");

    auto* rate = app.add_subcommand("rate-sweep", "information rate versus load");
    model_opts(rate, cfg);
    rate->add_option("--r", cfg.r, "load range a:b:step (default 0.1:3:0.1)");

    auto* probe = app.add_subcommand("convergence-probe", "max iterations of the plain map over 100 starts");
    model_opts(probe, cfg);
    probe->add_option("--r", cfg.r, "load range a:b:step (default 0.4:3:0.05)");
    probe->add_option("--tol", cfg.tol, "stop when |m_t - m_{t-1}| < tol");
    probe->add_option("--max-iter", cfg.max_iter, "iteration cap");
    probe->add_option("--starts", cfg.probe_starts, "number of initial points i/(n+1)");

    auto* sim = app.add_subcommand("simulate", "exact posterior-mean inference on random instances");
    model_opts(sim, cfg);
    sim_opts(sim, cfg);
    sim->add_option("--sigma2-eaves", cfg.sigma2_eaves, "add an eavesdropper terminal with this noise variance");

    auto* dec = app.add_subcommand("decoupling-check", "RS/decoupled predictions against exact simulation");
    model_opts(dec, cfg);
    iter_opts(dec, cfg);
    sim_opts(dec, cfg);

    auto* sec = app.add_subcommand("secrecy-curve", "secure rate and Wyner limit versus legitimate SNR");
    sec->add_option("--snr-db", cfg.snr_db, "SNR range in dB a:b:step");
    sec->add_option("--sigma2-eaves", cfg.sigma2_eaves, "eavesdropper noise variance (default 1)");
    sec->add_option("--ps", cfg.ps, "signal power")->check(CLI::PositiveNumber);

    auto* fy = app.add_subcommand("fyodorov-curve", "full-RSB overlap of the quadratic field versus SNR");
    fy->add_option("--mu", cfg.mu, "ratio D/N in (0,1], decimal or p/q");
    fy->add_option("--snr-db", cfg.snr_db, "SNR range in dB a:b:step");

    auto* thr = app.add_subcommand("thresholds", "capacity, R*, R_Th and sigma_C^2");
    thr->add_option("--lambda", cfg.lambda, "field order")->check(CLI::PositiveNumber);
    thr->add_option("--sigma2", cfg.sigma2, "noise variance")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        const auto table = gfield::run(cfg);
        std::ofstream file;
        if (!cfg.out.empty()) {
            file.open(cfg.out);
            if (!file) throw std::runtime_error("cannot write " + cfg.out);
        }
        std::ostream& os = cfg.out.empty() ? std::cout : file;
        if (cfg.format == "json")
            gfield::write_json(os, table);
        else
            gfield::write_csv(os, table);
    } catch (const std::exception& e) {
        std::cerr << "error: " << cfg.command << ": " << e.what() << "\n";
        return 2;
    }
    return 0;
}
