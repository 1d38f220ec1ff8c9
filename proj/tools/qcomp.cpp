// qcomp: command-line front end for the q-composite resilience library.

#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcomp/qcomp.hpp"

namespace {

enum ExitCode { kOk = 0, kInvalid = 2, kCapacity = 3, kIo = 4 };

struct FlagSpec {
    const char* name;
    const char* help;
};

const std::vector<FlagSpec> kCommonFlags{
    {"n", "number of sensor nodes"},
    {"K", "key ring size"},
    {"P", "key pool size"},
    {"q", "overlap threshold (comma list where a sweep accepts one)"},
    {"m", "captured nodes (comma list for resilience and optimal-q)"},
    {"r", "transmission radius on the unit torus"},
    {"b", "keys per replica"},
    {"c", "replica count"},
    {"d", "benign nodes per replica neighbourhood"},
    {"ps", "target link probability"},
    {"trials", "Monte Carlo trials"},
    {"seed", "64-bit seed (default 42)"},
    {"workers", "worker threads (results do not depend on it)"},
};

const std::vector<FlagSpec> kBooleanFlags{{"chan", "also report the independent-key approximation"},
                                          {"hardened", "links use fresh keys after discovery"},
                                          {"poisson", "Poisson-distributed benign neighbours"}};

/// Flags beyond the common set, per leaf command.
const std::map<std::string, std::vector<FlagSpec>> kExtraFlags{
    {"resilience", {{"q-min", "smallest q"}, {"q-max", "largest q"}}},
    {"optimal-q budget", {{"pc", "target fraction of compromised links"}, {"q-max", "largest q"}}},
    {"connectivity critical", {{"solve", "unknown to solve for: K, P or r"}}},
    {"connectivity simulate", {{"sweep", "none, K, P, r or m"}, {"values", "comma list for the swept parameter"}}},
    {"replication plan", {{"budget", "total budget B"}, {"p-b", "key cost exponent"}, {"p-c", "replica cost exponent"}}},
    {"replication sweep", {}},
    {"replication ratio", {{"targets", "comma list of success targets"}}},
};

using Runner = std::function<std::vector<qcomp::Table>(qcomp::Settings&)>;

struct Leaf {
    CLI::App* command = nullptr;
    std::map<std::string, std::string> values;
    std::map<std::string, bool> booleans;
    Runner run;
};

Leaf& add_leaf(std::map<std::string, Leaf>& leaves, CLI::App& parent, const std::string& path,
               const std::string& name, const std::string& description, Runner run) {
    Leaf& leaf = leaves[path];
    leaf.command = parent.add_subcommand(name, description);
    leaf.run = std::move(run);
    auto add = [&](const FlagSpec& flag) { leaf.command->add_option("--" + std::string(flag.name), leaf.values[flag.name], flag.help); };
    for (const auto& flag : kCommonFlags) add(flag);
    if (auto it = kExtraFlags.find(path); it != kExtraFlags.end())
        for (const auto& flag : it->second) add(flag);
    for (const auto& flag : kBooleanFlags)
        leaf.command->add_flag(std::string("--") + flag.name, leaf.booleans[flag.name], flag.help);
    return leaf;
}

qcomp::Settings resolve(const Leaf& leaf, const std::string& config_path) {
    qcomp::Config config;
    if (!config_path.empty()) config = qcomp::read_config_file(config_path);
    for (const auto& [key, value] : leaf.values)
        if (leaf.command->count("--" + key) > 0) config[key] = value;
    for (const auto& [key, on] : leaf.booleans)
        if (on) config[key] = "true";
    return qcomp::Settings(std::move(config));
}

int emit(const std::vector<qcomp::Table>& tables, const std::string& out, qcomp::OutputFormat format) {
    if (out.empty()) {
        for (const auto& table : tables) {
            if (tables.size() > 1 && format == qcomp::OutputFormat::Csv) std::cout << "# table: " << table.name << '\n';
            std::cout << qcomp::render(table, format);
        }
        std::cout.flush();
        if (!std::cout) throw qcomp::IoError("failed writing to standard output");
        return kOk;
    }
    for (const auto& table : tables) std::cerr << qcomp::write_table(table, out, format).string() << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    namespace ex = qcomp::experiments;
    CLI::App app{"Resilience, connectivity and replication analysis for q-composite key predistribution"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);

    std::string out;
    std::string format_text = "csv";
    std::string config_path;
    app.add_option("--out", out, "output directory; tables go to stdout when omitted");
    app.add_option("--format", format_text, "csv or json");
    app.add_option("--config", config_path, "key=value file; command-line flags take precedence");
    app.fallthrough();

    std::map<std::string, Leaf> leaves;
    add_leaf(leaves, app, "resilience", "resilience", "exact compromise probability across q at fixed K and p_s",
             [](auto& s) { return ex::run_resilience(s); });

    auto* optimal = app.add_subcommand("optimal-q", "optimal overlap threshold");
    optimal->require_subcommand(1);
    add_leaf(leaves, *optimal, "optimal-q capture", "capture", "q* for m captured nodes",
             [](auto& s) { return ex::run_optimal_q_capture(s); });
    add_leaf(leaves, *optimal, "optimal-q budget", "budget", "q# for a target compromise fraction",
             [](auto& s) { return ex::run_optimal_q_budget(s); });

    auto* connectivity = app.add_subcommand("connectivity", "secure-network connectivity");
    connectivity->require_subcommand(1);
    add_leaf(leaves, *connectivity, "connectivity critical", "critical", "critical K, P or r",
             [](auto& s) { return ex::run_connectivity_critical(s); });
    add_leaf(leaves, *connectivity, "connectivity simulate", "simulate", "Monte Carlo connectivity",
             [](auto& s) { return ex::run_connectivity_simulate(s); });

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo attacks");
    simulate->require_subcommand(1);
    add_leaf(leaves, *simulate, "simulate compromise", "compromise", "fraction of links compromised by m captures",
             [](auto& s) { return ex::run_simulate_compromise(s); });
    add_leaf(leaves, *simulate, "simulate replication", "replication", "replica acceptance probability",
             [](auto& s) { return ex::run_simulate_replication(s); });

    auto* replication = app.add_subcommand("replication", "replication attack planning");
    replication->require_subcommand(1);
    add_leaf(leaves, *replication, "replication plan", "plan", "budget-optimal (b, c)",
             [](auto& s) { return ex::run_replication_plan(s); });
    add_leaf(leaves, *replication, "replication sweep", "sweep", "success over lists of q, b and c",
             [](auto& s) { return ex::run_replication_sweep(s); });
    add_leaf(leaves, *replication, "replication ratio", "ratio", "c(b)/c(2b) against 2^q",
             [](auto& s) { return ex::run_replica_ratio(s); });

    std::string preset;
    std::string preset_help = "preset:";
    for (const auto& name : ex::preset_names()) preset_help += " " + name;
    Leaf& experiment = add_leaf(leaves, app, "experiment", "experiment", "regenerate a figure or table", nullptr);
    experiment.command->add_option("preset", preset, preset_help)->required();
    experiment.run = [&preset](qcomp::Settings& s) { return ex::run_experiment(preset, s); };

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalid;
    }

    try {
        const auto format = qcomp::parse_format(format_text);
        for (auto& [path, leaf] : leaves) {
            if (!leaf.command->parsed()) continue;
            auto settings = resolve(leaf, config_path);
            return emit(leaf.run(settings), out, format);
        }
        std::cerr << "no command given\n";
        return kInvalid;
    } catch (const qcomp::CapacityExceeded& e) {
        std::cerr << "capacity exceeded: " << e.what() << '\n';
        return kCapacity;
    } catch (const qcomp::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid parameters: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::domain_error& e) {
        std::cerr << "undefined for these parameters: " << e.what() << '\n';
        return kInvalid;
    }
}
