#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "covq/cli.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "covq");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = covq::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("covq_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write(const std::string& name, const std::string& content) const {
        std::ofstream(path(name)) << content;
        return path(name);
    }

    static std::string slurp(const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), {}};
    }

    fs::path dir_;
};

const std::vector<std::string> kRates{"--lambda-w", "0.3", "--lambda-b", "0.2", "--mu", "1"};

std::vector<std::string> with_rates(std::vector<std::string> args) {
    args.insert(args.begin() + 1, kRates.begin(), kRates.end());
    return args;
}

}  // namespace

TEST_F(Cli, SimulateWritesOneLine) {
    const auto r = run(with_rates({"simulate", "--n", "1000", "--seed", "7", "--hyp", "h1"}));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.size(), 1001u);
    EXPECT_EQ(r.out.find_first_not_of("01"), 1000u);
}

TEST_F(Cli, SimulateIsDeterministic) {
    const auto a = path("a.txt"), b = path("b.txt");
    ASSERT_EQ(run(with_rates({"simulate", "--n", "500", "--seed", "7", "--hyp", "h1", "--out", a})).code, 0);
    ASSERT_EQ(run(with_rates({"simulate", "--n", "500", "--seed", "7", "--hyp", "h1", "--out", b})).code, 0);
    EXPECT_EQ(slurp(a), slurp(b));
    const auto bin = path("a.bin");
    ASSERT_EQ(run(with_rates({"simulate", "--n", "500", "--seed", "7", "--hyp", "h1", "--format", "binary",
                              "--out", bin}))
                  .code,
              0);
    EXPECT_EQ(slurp(bin).substr(0, 8), "COVQSEQ1");
}

TEST_F(Cli, SimulateSummaryAndTrace) {
    const auto trace = path("trace.csv");
    const auto r = run(with_rates({"simulate", "--n", "100", "--seed", "3", "--hyp", "h1", "--out",
                                   path("s.txt"), "--trace", trace}));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["n"], 100);
    EXPECT_EQ(j["seed"]["seed"], 3);
    EXPECT_EQ(slurp(trace).substr(0, 18), "time,origin,served");
}

TEST_F(Cli, SimulateWithoutSeedReportsIt) {
    const auto r = run(with_rates({"simulate", "--n", "10", "--out", path("s.txt")}));
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("seed:"), std::string::npos);
    EXPECT_TRUE(json::parse(r.out)["seed_generated"].get<bool>());
}

TEST_F(Cli, InvalidArgumentsExitTwo) {
    EXPECT_EQ(run(with_rates({"simulate", "--n", "0", "--seed", "1"})).code, covq::cli::kExitUsage);
    const auto bad = run({"simulate", "--lambda-w", "-1", "--n", "5", "--seed", "1"});
    EXPECT_EQ(bad.code, covq::cli::kExitUsage);
    EXPECT_NE(bad.err.find("lambda_w"), std::string::npos);
    EXPECT_EQ(run({"frobnicate"}).code, covq::cli::kExitUsage);
    EXPECT_EQ(run({"exponent", "--no-such-flag"}).code, covq::cli::kExitUsage);
    EXPECT_EQ(run(with_rates({"exponent", "--output", "xml"})).code, covq::cli::kExitUsage);
    EXPECT_EQ(run({"exponent", "--config", path("missing.cfg")}).code, covq::cli::kExitUsage);
}

TEST_F(Cli, HelpExitsZero) {
    const auto r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("campaign"), std::string::npos);
}

TEST_F(Cli, StrictRegime) {
    const std::vector<std::string> heavy{"exponent", "--lambda-w", "0.8", "--lambda-b", "0.5"};
    const auto warn = run(heavy);
    EXPECT_EQ(warn.code, 0);
    EXPECT_NE(warn.err.find("warning"), std::string::npos);
    auto strict = heavy;
    strict.push_back("--strict");
    EXPECT_EQ(run(strict).code, covq::cli::kExitUsage);
}

TEST_F(Cli, DetectSequenceFiles) {
    const auto zeros = write("zeros.txt", std::string(40, '0') + "\n");
    auto r = run(with_rates({"detect", "--input", zeros}));
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_EQ(j["decision"], "H0");
    EXPECT_GT(j["llr"].get<double>(), 0.0);

    r = run({"detect", "--lambda-w", "0.3", "--lambda-b", "0", "--input", write("mixed.txt", "0110\n")});
    ASSERT_EQ(r.code, 0);
    j = json::parse(r.out);
    EXPECT_EQ(j["llr"].get<double>(), 0.0);
    EXPECT_EQ(j["decision"], "H0");

    EXPECT_EQ(run(with_rates({"detect", "--input", write("empty.txt", "")})).code, covq::cli::kExitInput);
    EXPECT_EQ(run(with_rates({"detect", "--input", write("bad.txt", "01x1\n")})).code, covq::cli::kExitInput);
    EXPECT_EQ(run(with_rates({"detect", "--input", path("none.txt")})).code, covq::cli::kExitInput);
}

TEST_F(Cli, DetectErrorRecord) {
    auto r = run(with_rates({"detect", "--n", "1"}));
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_NEAR(j["p_f"].get<double>(), 1.0 - 1.0 / 1.3, 1e-15);
    EXPECT_EQ(j["trials"], 0);
    r = run(with_rates({"detect", "--n", "12", "--method", "monte-carlo", "--trials", "100", "--seed", "4"}));
    ASSERT_EQ(r.code, 0) << r.err;
    j = json::parse(r.out);
    EXPECT_EQ(j["trials"], 100);
    EXPECT_EQ(j["seed"]["seed"], 4);
}

TEST_F(Cli, ExponentJsonCsvAndSelfCheck) {
    auto r = run(with_rates({"exponent", "--self-check"}));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(json::parse(r.out)["i_err_closed"].get<double>(), 0.0065587718112670366, 1e-14);
    r = run(with_rates({"exponent", "--sweep-lambda-b", "0.01,0.1,0.2", "--output", "csv", "--self-check"}));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "lambda_w,lambda_b,mu,v,i_err_closed,i_err_numeric,i_err_taylor");
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 4);
}

TEST_F(Cli, BoundJsonAndCsv) {
    auto r = run({"bound", "--lambda-w", "0.3", "--epsilon", "0.1", "--n", "1000", "--lambda-b", "0.015"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_NEAR(j["max_covert_rate"]["bound"].get<double>(), 0.020672, 1e-6);
    EXPECT_TRUE(j["covertness"]["taylor"]["covert"].get<bool>());
    r = run({"bound", "--lambda-w", "0.3", "--n", "1000", "--n-values", "1000,4000", "--output", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "N,K_of_N,bound,bound_times_sqrtN");
    // mu rescales lambda_w
    r = run({"bound", "--lambda-w", "0.6", "--mu", "2", "--n", "1000"});
    EXPECT_NEAR(json::parse(r.out)["max_covert_rate"]["bound"].get<double>(), 0.020672, 1e-6);
}

TEST_F(Cli, CampaignFromConfigWithOverride) {
    const auto cfg = write("c.cfg",
                           "lambda_w = 0.3\nlambda_b = 0.1\nn_grid = 100:100:500\nseed = 1\n");
    const auto prefix = path("out");
    const auto r = run({"campaign", "--config", cfg, "--lambda-b", "0.2", "--out", prefix});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(slurp(prefix + ".json"));
    EXPECT_EQ(j["params"]["lambda_b"], 0.2);
    EXPECT_EQ(j["rows"].size(), 5u);
    EXPECT_EQ(slurp(prefix + ".csv").substr(0, 30), "n,p_f,p_m,p_e,se_f,se_m,trials");
}

TEST_F(Cli, CampaignConfigErrors) {
    const auto bad = write("bad.cfg", "lambda_w = 0.3\nlambda_b = lots\nn_grid = 10,20,30\nseed = 1\n");
    const auto r = run({"campaign", "--config", bad});
    EXPECT_EQ(r.code, covq::cli::kExitUsage);
    EXPECT_NE(r.err.find("line 2"), std::string::npos);
    EXPECT_EQ(run({"campaign", "--lambda-w", "0.3", "--lambda-b", "0.2"}).code, covq::cli::kExitUsage);
}

TEST_F(Cli, CampaignThreadsDoNotChangeOutput) {
    const std::vector<std::string> base{"campaign", "--lambda-w", "0.3", "--lambda-b", "0.2", "--n-grid", "8,16",
                                        "--trials", "400", "--use-exact", "false", "--seed", "5"};
    auto one = base, four = base;
    one.insert(one.end(), {"--threads", "1"});
    four.insert(four.end(), {"--threads", "4"});
    const auto a = run(one), b = run(four);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
}

TEST_F(Cli, SweepOutputs) {
    auto r = run(with_rates({"sweep", "--n", "50", "--thresholds", "-1,0,1"}));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["rows"].size(), 3u);
    r = run(with_rates({"sweep", "--n", "50", "--gamma-min", "-2", "--gamma-max", "2", "--gamma-steps", "5",
                        "--output", "csv"}));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "threshold,p_f,p_m,p_e");
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 6);
}
