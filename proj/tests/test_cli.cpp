#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "gfield/experiments.hpp"

using namespace gfield;

namespace {

struct Proc {
    int code;
    std::string out;
};

Proc run_cli(const std::string& args) {
    const std::string cmd = std::string(GFIELD_CLI) + " " + args + " 2>/dev/null";
    Proc p{-1, {}};
    FILE* f = popen(cmd.c_str(), "r");
    if (!f) return p;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, f)) p.out.append(buf, n);
    const int st = pclose(f);
    p.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return p;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& s) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(s);
    for (std::string line; std::getline(is, line);) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

const std::vector<std::string>* find_row(const std::vector<std::vector<std::string>>& rows, const std::string& key) {
    for (const auto& r : rows)
        if (!r.empty() && r[0] == key) return &r;
    return nullptr;
}

}  // namespace

TEST(Ranges, InclusiveAndSnapped) {
    const auto r = parse_range("0.3:6:0.1");
    ASSERT_EQ(r.size(), 58u);
    EXPECT_EQ(r.front(), 0.3);
    EXPECT_EQ(r[12], 1.5);
    EXPECT_EQ(r.back(), 6.0);
    EXPECT_EQ(parse_range("1.76"), std::vector<double>{1.76});
    EXPECT_NEAR(parse_scalar("2/3"), 2.0 / 3.0, 1e-16);
    EXPECT_THROW(parse_range("1:2"), DomainError);
    EXPECT_THROW(parse_range("2:1:0.1"), DomainError);
    EXPECT_THROW(parse_range("0:1:0"), DomainError);
    EXPECT_THROW(parse_scalar("1.5x"), DomainError);
}

TEST(Format, ShortestStableNumbers) {
    EXPECT_EQ(fmt(1.5), "1.5");
    EXPECT_EQ(fmt(2.0 / 1.1), "1.81818181818182");
    EXPECT_EQ(fmt(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(fmt(7), "7");
}

TEST(Format, CsvQuotingAndJson) {
    Table t{{"a", "b"}, {{"1", "x,y"}, {"2.5", "say \"hi\""}}};
    std::ostringstream os;
    write_csv(os, t);
    EXPECT_EQ(os.str(), "a,b\n1,\"x,y\"\n2.5,\"say \"\"hi\"\"\"\n");
    std::ostringstream js;
    write_json(js, t);
    const auto j = nlohmann::json::parse(js.str());
    EXPECT_EQ(j[1]["a"].get<double>(), 2.5);
    EXPECT_EQ(j[0]["b"].get<std::string>(), "x,y");
}

TEST(Runner, EveryCommandHasAStableHeader) {
    const std::map<std::string, std::vector<std::string>> expect{
        {"landscape", {"R", "m", "L"}},
        {"rate-sweep", {"R", "info_rate", "r_log2", "capacity"}},
        {"fyodorov-curve", {"snr_db", "gamma", "m_star"}},
        {"thresholds", {"quantity", "value"}},
    };
    for (const auto& [cmd, header] : expect) {
        ExperimentConfig c;
        c.command = cmd;
        c.r = "1.0";
        c.snr_db = "10";
        EXPECT_EQ(run(c).header, header) << cmd;
    }
    ExperimentConfig c;
    c.command = "nope";
    EXPECT_THROW(run(c), DomainError);
}

TEST(Runner, LandscapeRowsCoverGrid) {
    ExperimentConfig c;
    c.command = "landscape";
    c.m_step = 0.01;
    const auto t = run(c);
    ASSERT_EQ(t.rows.size(), 101u);
    EXPECT_EQ(t.rows.front()[2], fmt(1.19894763639919));
}

TEST(Cli, OverlapSweepReferenceRow) {
    const auto p = run_cli("overlap-sweep --lambda 1 --sigma2 0.1 --r 0.3:6:0.1");
    ASSERT_EQ(p.code, 0);
    const auto rows = parse_csv(p.out);
    ASSERT_EQ(rows[0][0], "R");
    ASSERT_EQ(rows[0][1], "m_star");
    EXPECT_EQ(rows.size(), 59u);
    const auto* r = find_row(rows, "1.5");
    ASSERT_NE(r, nullptr);
    EXPECT_NEAR(std::stod((*r)[1]), 0.7902, 0.005);
}

TEST(Cli, Thresholds) {
    const auto p = run_cli("thresholds --lambda 2 --sigma2 0.1");
    ASSERT_EQ(p.code, 0);
    const auto rows = parse_csv(p.out);
    const auto* r = find_row(rows, "r_th");
    ASSERT_NE(r, nullptr);
    EXPECT_NEAR(std::stod((*r)[1]), 1.81818181818182, 1e-12);
}

TEST(Cli, FyodorovCurve) {
    // the exact ratio; a 4-digit decimal mu shifts the 10 dB value by 2e-5
    const auto p = run_cli("fyodorov-curve --mu 2/3 --snr-db -10:20:0.1");
    ASSERT_EQ(p.code, 0);
    const auto rows = parse_csv(p.out);
    EXPECT_EQ(rows.size(), 302u);
    const auto* r = find_row(rows, "10");
    ASSERT_NE(r, nullptr);
    EXPECT_NEAR(std::stod((*r)[2]), 0.894427, 1e-5);
    const auto* z = find_row(rows, "0");
    ASSERT_NE(z, nullptr);
    EXPECT_EQ(std::stod((*z)[2]), 0.0);
    const auto q = run_cli("fyodorov-curve --mu 0.6667 --snr-db 10");
    EXPECT_NEAR(std::stod(parse_csv(q.out)[1][2]), 0.894427, 1e-4);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run_cli("").code, 1);
    EXPECT_EQ(run_cli("no-such-command").code, 1);
    EXPECT_EQ(run_cli("thresholds --sigma2 abc").code, 1);
    EXPECT_EQ(run_cli("simulate --K 30 --trials 1").code, 2);
    EXPECT_EQ(run_cli("fyodorov-curve --mu 1.5").code, 2);
    EXPECT_EQ(run_cli("landscape --r 1:0:0.1").code, 2);
    EXPECT_EQ(run_cli("--help").code, 0);
}

TEST(Cli, DeterministicOutput) {
    const std::string args = "simulate --lambda 2 --K 8 --N 12 --trials 20 --seed 7";
    const auto a = run_cli(args), b = run_cli(args + " --threads 1");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    const auto rows = parse_csv(a.out);
    EXPECT_EQ(rows.size(), 21u);
    EXPECT_EQ(rows[0][0], "trial");
    EXPECT_NE(a.out, run_cli("simulate --lambda 2 --K 8 --N 12 --trials 20 --seed 8").out);
}

TEST(Cli, WiretapColumns) {
    const auto p = run_cli("simulate --lambda 1 --K 8 --N 12 --trials 5 --sigma2-eaves 1");
    ASSERT_EQ(p.code, 0);
    const auto h = parse_csv(p.out)[0];
    EXPECT_NE(std::find(h.begin(), h.end(), "overlap_eaves"), h.end());
}

TEST(Cli, JsonOutputAndFile) {
    const auto path = (std::filesystem::temp_directory_path() / "gfield_cli_test.json").string();
    ASSERT_EQ(run_cli("--format json -o " + path + " thresholds").code, 0);
    std::ifstream is(path);
    const auto j = nlohmann::json::parse(is);
    std::remove(path.c_str());
    ASSERT_TRUE(j.is_array());
    EXPECT_EQ(j[0]["quantity"].get<std::string>(), "capacity");
    EXPECT_NEAR(j[0]["value"].get<double>(), 1.19894763639919, 1e-14);
}

TEST(Cli, ConfigFileWithFlagOverride) {
    const auto path = (std::filesystem::temp_directory_path() / "gfield_cli_cfg.json").string();
    {
        std::ofstream os(path);
        os << R"({"lambda": 1, "sigma2": 0.1, "r": "1.5:3:1.5"})";
    }
    const auto a = parse_csv(run_cli("--config " + path + " overlap-sweep").out);
    ASSERT_EQ(a.size(), 3u);
    EXPECT_NEAR(std::stod(a[1][1]), 0.7902, 0.005);
    EXPECT_NEAR(std::stod(a[2][1]), 0.3085, 0.005);
    const auto b = parse_csv(run_cli("--config " + path + " overlap-sweep --r 1.5").out);
    EXPECT_EQ(b.size(), 2u);
    EXPECT_EQ(run_cli("--config /nonexistent/x.json thresholds").code, 1);
    std::remove(path.c_str());
}

TEST(Cli, DecouplingCheckTable) {
    const auto p = run_cli("decoupling-check --lambda 1 --K 10 --N 16 --trials 50");
    ASSERT_EQ(p.code, 0);
    const auto rows = parse_csv(p.out);
    EXPECT_EQ(rows[0][0], "quantity");
    EXPECT_NE(find_row(rows, "orthogonality"), nullptr);
    EXPECT_NE(find_row(rows, "cross_entropy"), nullptr);
}

TEST(Cli, ConvergenceProbeAndSecrecy) {
    const auto p = parse_csv(run_cli("convergence-probe --lambda 2 --sigma2 0.1 --r 0.4:3:2.6").out);
    ASSERT_EQ(p.size(), 3u);
    EXPECT_NEAR(std::stod(p[1][1]), 7, 3);
    EXPECT_NEAR(std::stod(p[2][1]), 49, 15);
    const auto s = parse_csv(run_cli("secrecy-curve --snr-db 10").out);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_NEAR(std::stod(s[1][1]), 0.6943, 0.01);
    EXPECT_NEAR(std::stod(s[1][2]), 1.0, 1e-6);
}
