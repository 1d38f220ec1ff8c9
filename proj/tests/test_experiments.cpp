#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qcomp/experiments.hpp"

using namespace qcomp;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string command = std::string(QCOMP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("qcomp_test_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST(Settings, ConfigTextAndTypedGetters) {
    Settings s(parse_config_text("# comment\n--K = 40\nps=0.05\nm = 10, 20 ,40\n\n"));
    EXPECT_EQ(s.count("K"), 40u);
    EXPECT_DOUBLE_EQ(s.real("ps"), 0.05);
    EXPECT_EQ(s.counts("m"), (std::vector<std::uint64_t>{10, 20, 40}));
    EXPECT_EQ(s.count_or("seed", 42), 42u);
    EXPECT_EQ(s.resolved().at("seed"), "42");
    EXPECT_FALSE(s.flag("chan"));
    EXPECT_THROW(s.count("missing"), InvalidParameter);
    EXPECT_THROW(parse_config_text("no equals sign"), InvalidParameter);
    Settings bad(Config{{"K", "-3"}, {"r", "abc"}, {"f", "maybe"}});
    EXPECT_THROW(bad.count("K"), InvalidParameter);
    EXPECT_THROW(bad.real("r"), InvalidParameter);
    EXPECT_THROW(bad.flag("f"), InvalidParameter);
    EXPECT_THROW(read_config_file("/nonexistent/qcomp.cfg"), IoError);
}

TEST(Settings, EmbeddedConfigDropsRuntimeKeys) {
    Settings s(Config{{"K", "4"}, {"out", "/tmp/x"}, {"workers", "3"}, {"format", "json"}});
    EXPECT_EQ(s.embedded(), (Config{{"K", "4"}}));
}

TEST(Table, CsvLayoutAndRoundTrip) {
    Table t;
    t.name = "demo";
    t.columns = {"q", "p", "flag", "note"};
    t.config = {{"K", "4"}, {"seed", "42"}};
    t.add_row({Cell{std::uint64_t{1}}, Cell{0.1}, Cell{true}, Cell{}});
    t.add_row({Cell{std::uint64_t{2}}, Cell{1.0 / 3.0}, Cell{false}, Cell{std::string("x")}});
    EXPECT_THROW(t.add_row({Cell{1.0}}), InvalidParameter);
    const auto csv = render_csv(t);
    EXPECT_EQ(csv,
              "# config: {\"K\":\"4\",\"seed\":\"42\"}\n# meta: {}\nq,p,flag,note\n1,0.1,true,\n"
              "2,0.3333333333333333,false,x\n");
    EXPECT_EQ(parse_embedded_config(csv), t.config);
    EXPECT_EQ(parse_embedded_config(render_json(t)), t.config);
    const auto doc = Json::parse(render_json(t));
    EXPECT_EQ(doc["rows"][1][1].get<double>(), 1.0 / 3.0);
    EXPECT_TRUE(doc["rows"][0][3].is_null());
}

TEST(Table, WriteFailsWithIoError) {
    Table t;
    t.name = "x";
    EXPECT_THROW(write_table(t, "/proc/qcomp-cannot-create", OutputFormat::Csv), IoError);
    EXPECT_THROW(parse_format("xml"), InvalidParameter);
}

TEST(Resilience, MarksMinimumAndAddsHistoricalColumn) {
    Settings s(Config{{"K", "6"}, {"ps", "0.2"}, {"m", "2,6"}, {"chan", "true"}, {"q-max", "4"}});
    const auto tables = experiments::run_resilience(s);
    ASSERT_EQ(tables.size(), 1u);
    const auto& t = tables.front();
    ASSERT_EQ(t.rows.size(), 8u);
    const auto exact = t.column("p_compromised_exact");
    const auto chan = t.column("p_compromised_chan");
    const auto optimal = t.column("optimal");
    for (std::size_t block = 0; block < 2; ++block) {
        std::size_t best = 0;
        for (std::size_t i = 0; i < 4; ++i)
            if (std::get<double>(t.rows[block * 4 + i][exact]) < std::get<double>(t.rows[block * 4 + best][exact]))
                best = i;
        for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(std::get<bool>(t.rows[block * 4 + i][optimal]), i == best);
    }
    EXPECT_NE(std::get<double>(t.rows[1][exact]), std::get<double>(t.rows[1][chan]));
    EXPECT_EQ(t.config.at("q-min"), "1");
}

TEST(Resilience, RejectsZeroCaptures) {
    Settings s(Config{{"K", "6"}, {"ps", "0.2"}, {"m", "0"}});
    EXPECT_THROW(experiments::run_resilience(s), InvalidParameter);
}

TEST(ReplicationPlan, SpendsEverythingOnKeysWhenCostsAreLinear) {
    Settings s(Config{{"budget", "100"}, {"q", "2"}});
    const auto t = experiments::run_replication_plan(s).front();
    EXPECT_EQ(std::get<std::uint64_t>(t.rows[0][t.column("b")]), 100u);
    EXPECT_EQ(std::get<std::uint64_t>(t.rows[0][t.column("c")]), 1u);
    EXPECT_FALSE(std::get<bool>(t.rows[0][t.column("tie")]));
}

TEST(ConnectivitySimulate, DefaultsToFiveHundredTrialsAndReportsCritical) {
    Settings s(Config{{"n", "50"}, {"K", "4"}, {"P", "40"}, {"r", "0.3"}, {"sweep", "r"}, {"values", "0.2,0.4"},
                      {"workers", "2"}});
    const auto t = experiments::run_connectivity_simulate(s).front();
    EXPECT_EQ(t.config.at("trials"), "500");
    EXPECT_EQ(t.config.at("seed"), "42");
    EXPECT_EQ(t.config.count("workers"), 0u);
    EXPECT_TRUE(t.meta.contains("critical_r"));
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(std::get<std::uint64_t>(t.rows[0][t.column("trials")]), 500u);
}

TEST(Experiments, TwoNodePresetNearQuarterPi) {
    const auto t = experiments::run_experiment("two-node", Settings{}).front();
    const double p = std::get<double>(t.rows[0][t.column("connectivity")]);
    const double se = std::get<double>(t.rows[0][t.column("standard_error")]);
    EXPECT_NEAR(p, std::numbers::pi / 4, 3 * se);
    EXPECT_THROW(experiments::run_experiment("fig99", Settings{}), InvalidParameter);
}

TEST(Experiments, Table1PresetReproducesIntervals) {
    const auto t = experiments::run_experiment("table1", Settings{}).front();
    ASSERT_EQ(t.rows.size(), 8u);
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_EQ(std::get<std::uint64_t>(t.rows[i][t.column("optimal_q_at_midpoint")]), i + 1);
        EXPECT_LE(std::get<double>(t.rows[i][t.column("lower_relative_error")]), 0.2);
    }
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run_cli("optimal-q capture --K 40 --m 10"), 0);
    EXPECT_EQ(run_cli("resilience --K 40 --ps 0.05 --m 0"), 2);
    EXPECT_EQ(run_cli("resilience --K 4 --ps 0.05 --m 1 --bogus 3"), 2);
    EXPECT_EQ(run_cli("simulate compromise --n 10 --K 3 --P 2 --m 1"), 2);
    EXPECT_EQ(run_cli("resilience --K 200 --ps 0.001 --m 1"), 3);
    EXPECT_EQ(run_cli("optimal-q capture --K 40 --m 10 --config /nonexistent/cfg"), 4);
    EXPECT_EQ(run_cli("optimal-q capture --K 40 --m 10 --out /proc/qcomp-denied"), 4);
}

TEST(Cli, ConfigFileIsOverriddenByFlags) {
    const auto dir = scratch("config");
    fs::create_directories(dir);
    std::ofstream(dir / "run.cfg") << "K = 40\nm = 10\n";
    ASSERT_EQ(run_cli("optimal-q capture --config " + (dir / "run.cfg").string() + " --m 20 --out " +
                      (dir / "out").string()),
              0);
    const auto text = slurp(dir / "out" / "optimal_q_capture.csv");
    EXPECT_EQ(parse_embedded_config(text), (Config{{"K", "40"}, {"m", "20"}}));
    EXPECT_NE(text.find("\n40,20,2,true,"), std::string::npos) << text;
    fs::remove_all(dir);
}

TEST(Cli, SameSeedGivesIdenticalBytes) {
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    const std::string args = "connectivity simulate --n 60 --K 4 --P 40 --r 0.25 --trials 40 --format json --out ";
    ASSERT_EQ(run_cli(args + a.string() + " --workers 1"), 0);
    ASSERT_EQ(run_cli(args + b.string() + " --workers 3"), 0);
    EXPECT_EQ(slurp(a / "connectivity.json"), slurp(b / "connectivity.json"));
    fs::remove_all(a);
    fs::remove_all(b);
}
