#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "andova/io.hpp"
#include "andova/simulation.hpp"
#include "json.hpp"
#include "support/builders.hpp"

namespace fs = std::filesystem;
using testing_support::make_dataset;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(ANDOVA_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, ""};
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("andova_cli_" + std::to_string(::getpid()) + "_" +
                                             ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
        andova::ScenarioSpec spec;
        spec.scenario = andova::Scenario::local_shift;
        spec.n = 300;
        spec.seed = 8;
        std::ofstream out(dir_ / "shift.csv");
        andova::write_csv(out, andova::generate(spec));
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, FitWritesReport) {
    const auto r = run("fit -i " + path("shift.csv") + " --depth 6 --omega-lo 0 --omega-hi 3.2");
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["schema_version"], 1);
    EXPECT_EQ(j["windows"].size(), 63u);
    EXPECT_EQ(j["config"]["depth"], 6);
    EXPECT_TRUE(j["sampler"].is_null());
}

TEST_F(Cli, SameSeedGivesIdenticalReports) {
    const std::string args = "fit -i " + path("shift.csv") + " -K 5 --draws 20 --seed 4 -o ";
    ASSERT_EQ(run(args + path("a.json")).code, 0);
    ASSERT_EQ(run(args + path("b.json")).code, 0);
    const auto a = slurp(path("a.json"));
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(path("b.json")));
    EXPECT_EQ(nlohmann::json::parse(a)["sampler"]["draws"], 20);
}

TEST_F(Cli, SingleGroupExitsTwo) {
    std::ofstream(path("one.csv")) << "group,replicate,value\na,r,0.1\na,r,0.2\n";
    EXPECT_EQ(run("fit -i " + path("one.csv")).code, 2);
}

TEST_F(Cli, MissingInputExitsTwo) { EXPECT_EQ(run("fit -i " + path("nope.csv")).code, 2); }

TEST_F(Cli, BadFlagsExitTwo) {
    EXPECT_EQ(run("fit -i " + path("shift.csv") + " --omega-lo 0").code, 2);
    EXPECT_EQ(run("fit -i " + path("shift.csv") + " --depth 40").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
}

TEST_F(Cli, CsvSummaryAndSvg) {
    const auto r = run("fit -i " + path("shift.csv") + " -K 4 --format csv-summary --svg " + path("plot"));
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("window,level,index", 0), 0u);
    EXPECT_TRUE(fs::exists(path("plot_pmap.svg")));
    EXPECT_TRUE(fs::exists(path("plot_effect_g1.svg")));
    EXPECT_TRUE(fs::exists(path("plot_effect_g2.svg")));
}

TEST_F(Cli, SimulateIsDeterministic) {
    const auto a = run("simulate --scenario null --runs 5 --seed 1 --n 50");
    const auto b = run("simulate --scenario null --runs 5 --seed 1 --n 50");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    std::istringstream lines(a.out);
    std::string line;
    int n = 0;
    while (std::getline(lines, line)) {
        const auto j = nlohmann::json::parse(line);
        EXPECT_EQ(j["run"], n);
        EXPECT_EQ(j["scenario"], "null");
        ++n;
    }
    EXPECT_EQ(n, 5);
}

TEST_F(Cli, SimulateWritesCsvFiles) {
    ASSERT_EQ(run("simulate --scenario local_dispersion --runs 2 --n 40 --output-dir " + path("sims")).code, 0);
    int files = 0;
    for (const auto& e : fs::directory_iterator(path("sims"))) {
        ++files;
        std::ifstream in(e.path());
        EXPECT_EQ(andova::parse_csv(in).groups.size(), 2u);
    }
    EXPECT_EQ(files, 2);
}

TEST_F(Cli, RocNeedsTwoRuns) { EXPECT_EQ(run("roc --runs 1").code, 2); }

TEST_F(Cli, RocSummary) {
    const auto r = run("roc --scenario local_shift --runs 3 --n 100 --replicates 2 -K 4 --records " + path("rec.jsonl"));
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    for (const char* m : {"andova", "nu_infinity"}) {
        const double auc = j["methods"][m]["auc"]["local_shift"];
        EXPECT_GE(auc, 0.0);
        EXPECT_LE(auc, 1.0);
    }
    std::istringstream lines(slurp(path("rec.jsonl")));
    std::string line;
    int n = 0;
    while (std::getline(lines, line)) {
        const auto rec = nlohmann::json::parse(line);
        EXPECT_TRUE(rec.contains("run") && rec.contains("scenario") && rec.contains("method") && rec.contains("statistic"));
        ++n;
    }
    EXPECT_EQ(n, 12);
}

TEST_F(Cli, ElicitMeetsTargets) {
    const auto r = run("elicit --prjap 0.5 --signals 2 --depth 11");
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["achieved_prjap"].get<double>(), 0.5, 1e-6);
    EXPECT_NEAR(j["achieved_signals"].get<double>(), 2.0, 1e-6);
    EXPECT_NEAR(j["beta"].get<double>(), 0.07, 0.02);
    EXPECT_NEAR(j["delta"].get<double>(), 0.4, 0.1);
}

TEST_F(Cli, ElicitZeroPrjap) {
    const auto r = run("elicit --prjap 0");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(nlohmann::json::parse(r.out)["beta"].get<double>(), 0.0);
    EXPECT_EQ(run("elicit --prjap 0.5 --signals 1000").code, 2);
}
