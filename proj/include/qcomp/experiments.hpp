#pragma once

// Runners behind the command-line subcommands and the figure/table presets.
// Each runner reads a Settings map, returns result tables, and leaves the
// resolved configuration (defaults included) embedded in every table.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qcomp/asymptotics.hpp"
#include "qcomp/estimators.hpp"
#include "qcomp/exact.hpp"
#include "qcomp/replication.hpp"
#include "qcomp/rng.hpp"
#include "qcomp/settings.hpp"
#include "qcomp/table.hpp"

namespace qcomp::experiments {

inline constexpr std::uint64_t kDefaultConnectivityTrials = 500;

namespace detail {

inline std::uint32_t narrow(std::uint64_t value, const std::string& key) {
    if (value > std::numeric_limits<std::uint32_t>::max())
        throw InvalidParameter("--" + key + " is too large");
    return static_cast<std::uint32_t>(value);
}

inline SchemeParams key_scheme(Settings& s) {
    SchemeParams params;
    params.key_ring_size = narrow(s.count("K"), "K");
    params.key_pool_size = narrow(s.count("P"), "P");
    params.overlap_threshold = narrow(s.count_or("q", 1), "q");
    params.validate();
    return params;
}

inline SchemeParams network_scheme(Settings& s) {
    SchemeParams params = key_scheme(s);
    params.node_count = narrow(s.count("n"), "n");
    if (params.node_count < 1) throw InvalidParameter("--n must be at least 1");
    return params;
}

inline SimulationOptions simulation(Settings& s) {
    SimulationOptions options;
    if (s.has("workers")) options.workers = static_cast<unsigned>(s.count("workers"));
    return options;
}

inline Json warnings_json(const Warnings& warnings) {
    Json out = Json::array();
    for (const auto& w : warnings) out.push_back({{"code", w.code}, {"message", w.message}});
    return out;
}

inline Table make_table(std::string name, std::vector<std::string> columns) {
    Table table;
    table.name = std::move(name);
    table.columns = std::move(columns);
    return table;
}

inline void finish(std::vector<Table>& tables, const Settings& s) {
    for (auto& t : tables) t.config = s.embedded();
}

inline Cell real(double v) { return Cell{v}; }
inline Cell whole(std::uint64_t v) { return Cell{v}; }

inline CriticalUnknown parse_unknown(const std::string& text) {
    if (text == "K") return CriticalUnknown::KeyRingSize;
    if (text == "P") return CriticalUnknown::KeyPoolSize;
    if (text == "r") return CriticalUnknown::Radius;
    throw InvalidParameter("--solve must be one of K, P, r; got '" + text + "'");
}

inline double critical_radius(std::uint64_t nodes, std::uint64_t captured, double ring, double pool,
                              std::uint32_t threshold) {
    DesignGuidelineInput input;
    input.node_count = nodes;
    input.captured = captured;
    input.key_ring_size = ring;
    input.key_pool_size = pool;
    input.overlap_threshold = threshold;
    input.solve_for = CriticalUnknown::Radius;
    return critical_parameter(input);
}

}  // namespace detail

/// Exact (and optionally historical and asymptotic) compromise probability
/// over a range of q at a fixed K and link probability; P is re-solved for
/// each q. Marks the minimizing q for each m.
inline std::vector<Table> run_resilience(Settings& s, const std::string& name = "resilience") {
    const auto ring = detail::narrow(s.count("K"), "K");
    const double target = s.real("ps");
    const auto captures = s.counts("m");
    const auto q_min = detail::narrow(s.count_or("q-min", 1), "q-min");
    const auto q_max = detail::narrow(s.count_or("q-max", std::min<std::uint64_t>(10, ring)), "q-max");
    const bool chan = s.flag("chan");
    if (ring < 1) throw InvalidParameter("--K must be at least 1");
    if (q_min < 1 || q_min > q_max || q_max > ring) throw InvalidParameter("need 1 <= q-min <= q-max <= K");
    for (auto m : captures)
        if (m < 1) throw InvalidParameter("--m values must be at least 1 (compromise needs a capture)");

    std::vector<std::uint32_t> pools;
    Json pool_meta = Json::object();
    for (std::uint32_t q = q_min; q <= q_max; ++q) {
        pools.push_back(find_pool_size(ring, q, target));
        pool_meta[std::to_string(q)] = pools.back();
    }

    std::vector<std::string> columns{"q", "m", "P", "p_s", "p_compromised_exact"};
    if (chan) columns.push_back("p_compromised_chan");
    columns.insert(columns.end(), {"p_compromised_asymptotic", "optimal"});
    Table table = detail::make_table(name, columns);
    Json optimal_exact = Json::object();
    Json optimal_rule = Json::object();
    Warnings warnings;

    for (auto m64 : captures) {
        const auto m = detail::narrow(m64, "m");
        std::uint64_t max_keys = 0;
        for (auto pool : pools) max_keys = std::max<std::uint64_t>(max_keys, std::min<std::uint64_t>(std::uint64_t{m} * ring, pool));
        std::optional<CoveringCounts> counts;
        if (m <= capacity::kMaxCaptures && max_keys <= capacity::kMaxCapturedKeys)
            counts.emplace(ring, m, static_cast<std::uint32_t>(max_keys));

        std::vector<ExactProbability> exact;
        for (std::size_t i = 0; i < pools.size(); ++i)
            exact.push_back(compromise_probability_exact({0, ring, pools[i], q_min + static_cast<std::uint32_t>(i)}, m,
                                                         counts ? &*counts : nullptr));
        std::size_t best = 0;
        for (std::size_t i = 1; i < exact.size(); ++i)
            if (exact[i] < exact[best]) best = i;
        optimal_exact[std::to_string(m)] = q_min + best;
        optimal_rule[std::to_string(m)] = optimal_q_given_captures(ring, m).q;

        for (std::size_t i = 0; i < pools.size(); ++i) {
            const std::uint32_t q = q_min + static_cast<std::uint32_t>(i);
            const SchemeParams params{0, ring, pools[i], q};
            std::vector<Cell> row{detail::whole(q), detail::whole(m), detail::whole(pools[i]),
                                  detail::real(link_probability(params).to_double()),
                                  detail::real(exact[i].to_double())};
            if (chan) row.push_back(detail::real(compromise_probability_chan(params, m).to_double()));
            row.push_back(detail::real(compromise_asymptotic(m, ring, pools[i], q, &warnings)));
            row.push_back(Cell{i == best});
            table.add_row(std::move(row));
        }
    }
    table.meta["pool_size_by_q"] = pool_meta;
    table.meta["optimal_q_exact"] = optimal_exact;
    table.meta["optimal_q_rule"] = optimal_rule;
    if (!warnings.empty()) table.meta["warnings"] = detail::warnings_json({warnings.front()});
    std::vector<Table> out{std::move(table)};
    detail::finish(out, s);
    return out;
}

/// q* = max(floor(K/m), 1) for each requested m.
inline std::vector<Table> run_optimal_q_capture(Settings& s, const std::string& name = "optimal_q_capture") {
    const auto ring = s.count("K");
    const auto captures = s.counts("m");
    Table table = detail::make_table(name, {"K", "m", "q_star", "tie_with_q_minus_1", "ratio_asymptotic"});
    for (auto m : captures) {
        const auto best = optimal_q_given_captures(ring, m);
        table.add_row({detail::whole(ring), detail::whole(m), detail::whole(best.q), Cell{best.tie},
                       detail::real(compromise_ratio_asymptotic(static_cast<double>(m), static_cast<double>(ring), best.q))});
    }
    std::vector<Table> out{std::move(table)};
    detail::finish(out, s);
    return out;
}

/// Captures needed per q for a target compromise fraction, and q#.
inline std::vector<Table> run_optimal_q_budget(Settings& s, const std::string& name = "optimal_q_budget") {
    BudgetAdversary adversary;
    adversary.target_fraction = s.real("pc");
    adversary.link_probability = s.real("ps");
    adversary.key_ring_size = detail::narrow(s.count_or("K", 1), "K");
    const auto q_max = detail::narrow(s.count_or("q-max", kDefaultMaxThreshold), "q-max");
    const auto best = optimal_q_given_target(adversary, q_max);
    Table table = detail::make_table(name, {"q", "capture_multiplier", "required_captures", "optimal"});
    for (std::uint32_t q = 1; q <= q_max; ++q)
        table.add_row({detail::whole(q), detail::real(std::exp(capture_exponent(adversary.ratio(), q))),
                       detail::real(required_captures(adversary, q)), Cell{q == best}});
    table.meta["ratio"] = adversary.ratio();
    table.meta["q_sharp"] = best;
    table.meta["ratio_interval"] = {best < q_max ? q_sharp_boundary(best) : 0.0,
                                    best > 1 ? Json(q_sharp_boundary(best - 1)) : Json(nullptr)};
    std::vector<Table> out{std::move(table)};
    detail::finish(out, s);
    return out;
}

/// Critical K, P or r for connectivity, with the substituted edge probability.
inline std::vector<Table> run_connectivity_critical(Settings& s, const std::string& name = "critical") {
    DesignGuidelineInput input;
    input.node_count = s.count("n");
    input.captured = s.count_or("m", 0);
    input.overlap_threshold = detail::narrow(s.count_or("q", 1), "q");
    input.solve_for = detail::parse_unknown(s.text("solve"));
    if (input.solve_for != CriticalUnknown::KeyRingSize) input.key_ring_size = s.real("K");
    if (input.solve_for != CriticalUnknown::KeyPoolSize) input.key_pool_size = s.real("P");
    if (input.solve_for != CriticalUnknown::Radius) input.radius = s.real("r");
    Warnings warnings;
    const double value = critical_parameter(input, &warnings);

    DesignGuidelineInput solved = input;
    switch (input.solve_for) {
        case CriticalUnknown::KeyRingSize: solved.key_ring_size = value; break;
        case CriticalUnknown::KeyPoolSize: solved.key_pool_size = value; break;
        case CriticalUnknown::Radius: solved.radius = value; break;
    }
    const double edge = secure_edge_probability_asymptotic(solved.key_ring_size, solved.key_pool_size,
                                                           solved.overlap_threshold, solved.radius);
    const double threshold = connectivity_threshold(static_cast<double>(input.effective_nodes()));
    Table table = detail::make_table(
        name, {"solve", "value", "n_effective", "K", "P", "r", "edge_probability", "threshold", "relative_error"});
    table.add_row({Cell{s.text("solve")}, detail::real(value), detail::whole(input.effective_nodes()),
                   detail::real(solved.key_ring_size), detail::real(solved.key_pool_size), detail::real(solved.radius),
                   detail::real(edge), detail::real(threshold), detail::real(std::abs(edge - threshold) / threshold)});
    if (!warnings.empty()) table.meta["warnings"] = detail::warnings_json(warnings);
    std::vector<Table> out{std::move(table)};
    detail::finish(out, s);
    return out;
}

/// Monte Carlo connectivity of the secure topology, optionally sweeping one
/// of K, P, r or m.
inline std::vector<Table> run_connectivity_simulate(Settings& s, const std::string& name = "connectivity") {
    const auto nodes = detail::narrow(s.count("n"), "n");
    const auto trials = s.count_or("trials", kDefaultConnectivityTrials);
    const auto seed = s.count_or("seed", kDefaultSeed);
    const std::string sweep = s.text_or("sweep", "none");
    if (sweep != "none" && sweep != "K" && sweep != "P" && sweep != "r" && sweep != "m")
        throw InvalidParameter("--sweep must be one of none, K, P, r, m");
    const auto options = detail::simulation(s);

    std::vector<std::string> values{""};
    if (sweep != "none") {
        values = qcomp::detail::split_list(s.text("values"));
        if (values.empty()) throw InvalidParameter("--values needs at least one entry");
    }

    Table table = detail::make_table(name, {"swept", "K", "P", "q", "r", "m", "p_s", "edge_probability", "a",
                                            "critical_radius", "connectivity", "standard_error", "trials"});
    for (const auto& value : values) {
        Settings row = s;
        if (sweep != "none") row.set(sweep, value);
        const SchemeParams params{nodes, detail::narrow(row.count("K"), "K"), detail::narrow(row.count("P"), "P"),
                                  detail::narrow(row.count_or("q", 1), "q")};
        params.validate();
        const double radius = row.real("r");
        const auto captured = detail::narrow(row.count_or("m", 0), "m");
        if (captured >= nodes) throw InvalidParameter("need m < n");
        const double ps = link_probability(params).to_double();
        const double edge = ps * std::numbers::pi * radius * radius;
        const auto effective = nodes - captured;
        const std::optional<double> a =
            effective >= 2 ? std::optional<double>(edge / connectivity_threshold(effective)) : std::nullopt;
        const std::optional<double> critical =
            effective >= 2 ? std::optional<double>(detail::critical_radius(nodes, captured, params.key_ring_size,
                                                                           params.key_pool_size,
                                                                           params.overlap_threshold))
                           : std::nullopt;
        const auto estimate = estimate_connectivity(params, radius, trials, seed, captured, options);
        table.add_row({sweep == "none" ? Cell{} : Cell{value}, detail::whole(params.key_ring_size),
                       detail::whole(params.key_pool_size), detail::whole(params.overlap_threshold),
                       detail::real(radius), detail::whole(captured), detail::real(ps), detail::real(edge),
                       a ? Cell{*a} : Cell{}, critical ? Cell{*critical} : Cell{},
                       detail::real(estimate.point_estimate), detail::real(estimate.standard_error),
                       detail::whole(trials)});
    }
    // Analytic critical value of the swept parameter, from the unswept settings.
    if (sweep == "K" || sweep == "P" || sweep == "r") {
        DesignGuidelineInput input;
        input.node_count = nodes;
        input.captured = s.count_or("m", 0);
        input.overlap_threshold = detail::narrow(s.count_or("q", 1), "q");
        input.solve_for = detail::parse_unknown(sweep);
        if (sweep != "K") input.key_ring_size = s.real("K");
        if (sweep != "P") input.key_pool_size = s.real("P");
        if (sweep != "r") input.radius = s.real("r");
        Warnings warnings;
        table.meta["critical_" + sweep] = critical_parameter(input, &warnings);
        if (!warnings.empty()) table.meta["warnings"] = detail::warnings_json(warnings);
    }
    table.meta["rng"] = std::string(kRngAlgorithm);
    std::vector<Table> out{std::move(table)};
    detail::finish(out, s);
    return out;
}

inline std::vector<Table> run_simulate_compromise(Settings& s, const std::string& name = "compromise") {
    const SchemeParams params = detail::network_scheme(s);
    const auto captures = detail::narrow(s.count("m"), "m");
    const auto trials = s.count_or("trials", 10'000);
    const auto seed = s.count_or("seed", kDefaultSeed);
    CompromiseOptions options;
    options.hardened = s.flag("hardened");
    if (s.has("r")) options.geometric_radius = s.real("r");
    options.simulation = detail::simulation(s);

    const auto estimate = estimate_compromise(params, captures, trials, seed, options);
    Cell exact;
    try {
        exact = detail::real(options.hardened ? 0.0 : compromise_probability_exact(params, captures).to_double());
    } catch (const CapacityExceeded&) {
        // Beyond the exact path; the simulated value stands alone.
    }
    Warnings warnings;
    Table table = detail::make_table(name, {"m", "estimate", "standard_error", "trials", "linked_pairs",
                                            "compromised_pairs", "degenerate", "exact", "asymptotic"});
    table.add_row({detail::whole(captures), detail::real(estimate.point_estimate),
                   detail::real(estimate.standard_error), detail::whole(trials), detail::whole(estimate.weight),
                   detail::whole(estimate.hits), Cell{estimate.degenerate}, exact,
                   detail::real(options.hardened ? 0.0
                                                 : compromise_asymptotic(captures, params.key_ring_size,
                                                                         params.key_pool_size,
                                                                         params.overlap_threshold, &warnings))});
    table.meta["rng"] = std::string(kRngAlgorithm);
    if (!warnings.empty()) table.meta["warnings"] = detail::warnings_json(warnings);
    std::vector<Table> out{std::move(table)};
    detail::finish(out, s);
    return out;
}

namespace detail {

inline std::vector<Cell> replication_row(const ReplicationSpec& spec, std::uint64_t trials, std::uint64_t seed,
                                         const ReplicationOptions& options, Warnings& warnings) {
    const auto& scheme = spec.scheme;
    std::vector<Cell> row{whole(spec.keys_per_replica), whole(spec.replica_count), whole(spec.benign_density),
                          whole(scheme.overlap_threshold), real(miss_probability(spec).to_double()),
                          real(replication_success(spec)), real(replication_success_asymptotic(spec, &warnings))};
    if (trials > 0) {
        const auto estimate =
            estimate_replication(scheme.key_ring_size, scheme.key_pool_size, scheme.overlap_threshold,
                                 spec.keys_per_replica, spec.replica_count, spec.benign_density, trials, seed, options);
        row.push_back(real(estimate.point_estimate));
        row.push_back(real(estimate.standard_error));
    } else {
        row.push_back(Cell{});
        row.push_back(Cell{});
    }
    return row;
}

inline const std::vector<std::string>& replication_columns() {
    static const std::vector<std::string> columns{"b", "c", "d", "q", "alpha", "success_exact",
                                                  "success_asymptotic", "success_simulated", "standard_error"};
    return columns;
}

}  // namespace detail

inline std::vector<Table> run_simulate_replication(Settings& s, const std::string& name = "replication") {
    ReplicationSpec spec;
    spec.scheme = detail::key_scheme(s);
    spec.keys_per_replica = detail::narrow(s.count("b"), "b");
    spec.replica_count = s.count("c");
    spec.benign_density = s.count_or("d", 1);
    spec.validate();
    const auto trials = s.count_or("trials", 10'000);
    if (trials < 1) throw InvalidParameter("--trials must be at least 1");
    const auto seed = s.count_or("seed", kDefaultSeed);
    ReplicationOptions options;
    options.poisson_neighbours = s.flag("poisson");
    options.simulation = detail::simulation(s);
    Warnings warnings;
    Table table = detail::make_table(name, detail::replication_columns());
    table.add_row(detail::replication_row(spec, trials, seed, options, warnings));
    table.meta["rng"] = std::string(kRngAlgorithm);
    if (!warnings.empty()) table.meta["warnings"] = detail::warnings_json(warnings);
    std::vector<Table> out{std::move(table)};
    detail::finish(out, s);
    return out;
}

/// Exact, asymptotic and (with --trials > 0) simulated success over lists of
/// q, b and c.
inline std::vector<Table> run_replication_sweep(Settings& s, const std::string& name = "replication_sweep") {
    const auto ring = detail::narrow(s.count("K"), "K");
    const auto pool = detail::narrow(s.count("P"), "P");
    const auto thresholds = s.counts("q");
    const auto keys = s.counts("b");
    const auto replicas = s.counts("c");
    const auto density = s.count_or("d", 1);
    const auto trials = s.count_or("trials", 0);
    const auto seed = s.count_or("seed", kDefaultSeed);
    ReplicationOptions options;
    options.poisson_neighbours = s.flag("poisson");
    options.simulation = detail::simulation(s);
    Warnings warnings;
    Table table = detail::make_table(name, detail::replication_columns());
    for (auto q : thresholds)
        for (auto b : keys)
            for (auto c : replicas) {
                ReplicationSpec spec{detail::narrow(b, "b"), c, density, {0, ring, pool, detail::narrow(q, "q")}};
                spec.validate();
                table.add_row(detail::replication_row(spec, trials, seed, options, warnings));
            }
    if (trials > 0) table.meta["rng"] = std::string(kRngAlgorithm);
    if (!warnings.empty()) table.meta["warnings"] = detail::warnings_json({warnings.front()});
    std::vector<Table> out{std::move(table)};
    detail::finish(out, s);
    return out;
}

inline std::vector<Table> run_replication_plan(Settings& s, const std::string& name = "replication_plan") {
    BudgetModel model;
    model.budget = s.real("budget");
    model.key_cost_exponent = s.real_or("p-b", 1.0);
    model.replica_cost_exponent = s.real_or("p-c", 1.0);
    const auto q = detail::narrow(s.count_or("q", 1), "q");
    const auto plan = optimal_allocation(model, q);
    const char* regime = plan.regime == AllocationRegime::FewRichReplicas  ? "few-rich-replicas"
                         : plan.regime == AllocationRegime::ManyPoorReplicas ? "many-poor-replicas"
                                                                             : "indifferent";
    Table table = detail::make_table(name, {"budget", "p_b", "p_c", "q", "b", "c", "regime", "tie", "corner_b",
                                            "corner_c"});
    table.add_row({detail::real(model.budget), detail::real(model.key_cost_exponent),
                   detail::real(model.replica_cost_exponent), detail::whole(q), detail::whole(plan.keys_per_replica),
                   detail::whole(plan.replica_count), Cell{std::string(regime)}, Cell{plan.tie},
                   detail::whole(plan.corner_keys), detail::whole(plan.corner_replicas)});
    std::vector<Table> out{std::move(table)};
    detail::finish(out, s);
    return out;
}

/// Minimum replica counts for b and 2b and the q-th root of their ratio.
inline std::vector<Table> run_replica_ratio(Settings& s, const std::string& name = "replica_ratio") {
    const auto ring = detail::narrow(s.count("K"), "K");
    const auto pool = detail::narrow(s.count("P"), "P");
    const auto thresholds = s.counts("q");
    const auto keys = detail::narrow(s.count("b"), "b");
    const auto density = s.count_or("d", 1);
    const auto targets = s.reals("targets");
    Table table = detail::make_table(name, {"q", "target", "b", "c_b", "c_2b", "ratio", "qth_root_ratio",
                                            "expected_ratio", "relative_error", "regime_ok"});
    const bool regime = std::uint64_t{pool} >= 100ULL * 2 * keys * ring;
    for (auto q64 : thresholds) {
        const auto q = detail::narrow(q64, "q");
        const SchemeParams scheme{0, ring, pool, q};
        for (double target : targets) {
            const auto low = min_replicas(target, keys, density, scheme);
            const auto high = min_replicas(target, keys * 2, density, scheme);
            const double ratio = static_cast<double>(low) / static_cast<double>(high);
            const double expected = std::pow(2.0, q);
            table.add_row({detail::whole(q), detail::real(target), detail::whole(keys), detail::whole(low),
                           detail::whole(high), detail::real(ratio), detail::real(std::pow(ratio, 1.0 / q)),
                           detail::real(expected), detail::real(std::abs(ratio - expected) / expected),
                           Cell{regime}});
        }
    }
    std::vector<Table> out{std::move(table)};
    detail::finish(out, s);
    return out;
}

/// Analytic q# boundaries against the printed intervals of the optimal-q table.
inline std::vector<Table> run_table1(Settings& s, const std::string& name = "table1") {
    struct Interval {
        double lower;
        double upper;
    };
    // Printed intervals for q# = 1..8; the first is [0.5, inf).
    static const Interval printed[] = {{0.5, std::numeric_limits<double>::infinity()},
                                       {0.222, 0.5},
                                       {0.094, 0.222},
                                       {0.038, 0.094},
                                       {0.016, 0.038},
                                       {0.0053, 0.016},
                                       {0.0023, 0.0053},
                                       {0.0009, 0.0023}};
    Table table = detail::make_table(name, {"q", "printed_lower", "printed_upper", "analytic_lower",
                                            "lower_relative_error", "midpoint", "optimal_q_at_midpoint"});
    for (std::uint32_t q = 1; q <= 8; ++q) {
        const auto& interval = printed[q - 1];
        const double analytic = q_sharp_boundary(q);
        // The open-ended first interval is probed at 0.75.
        const double midpoint = std::isinf(interval.upper) ? 0.75 : 0.5 * (interval.lower + interval.upper);
        table.add_row({detail::whole(q), detail::real(interval.lower),
                       std::isinf(interval.upper) ? Cell{} : detail::real(interval.upper), detail::real(analytic),
                       detail::real(std::abs(analytic - interval.lower) / interval.lower), detail::real(midpoint),
                       detail::whole(optimal_q_for_ratio(midpoint))});
    }
    std::vector<Table> out{std::move(table)};
    detail::finish(out, s);
    return out;
}

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"fig2",  "fig3",  "fig-connectivity-K", "fig-connectivity-P",
                                                "fig-connectivity-r", "fig-capture", "fig8", "table1",
                                                "table2-ratio", "two-node"};
    return names;
}

namespace detail {

/// Preset values plus the caller's seed, trials and runtime keys.
inline Settings preset_settings(const std::string& preset, Config values, const Settings& user) {
    Settings out(std::move(values));
    out.set("preset", preset);
    for (const char* key : {"seed", "trials", "workers", "out", "format"})
        if (user.has(key)) out.set(key, user.text(key));
    return out;
}

inline void append(std::vector<Table>& into, std::vector<Table> more) {
    for (auto& t : more) into.push_back(std::move(t));
}

}  // namespace detail

/// Regenerates one figure or table as plot data.
inline std::vector<Table> run_experiment(const std::string& preset, const Settings& user) {
    using detail::append;
    using detail::preset_settings;
    std::vector<Table> out;
    if (preset == "fig2" || preset == "fig3") {
        const std::string ps = preset == "fig2" ? "0.05" : "0.1";
        const std::pair<const char*, const char*> cases[] = {{"20", "5,10,20"}, {"40", "10,20,40"}, {"80", "20,30"}};
        for (const auto& [ring, captures] : cases) {
            auto s = preset_settings(preset, {{"K", ring}, {"ps", ps}, {"m", captures}, {"q-min", "1"},
                                              {"q-max", "10"}, {"chan", "true"}}, user);
            append(out, run_resilience(s, preset + "_K" + ring));
        }
    } else if (preset == "fig-connectivity-K") {
        auto s1 = preset_settings(preset, {{"n", "1000"}, {"P", "10000"}, {"q", "1"}, {"r", "0.1"},
                                           {"K", "45"}, {"sweep", "K"}, {"values", "30,35,40,45,50,55,60,70"}}, user);
        append(out, run_connectivity_simulate(s1, preset + "_q1"));
        auto s2 = preset_settings(preset, {{"n", "1000"}, {"P", "20000"}, {"q", "2"}, {"r", "0.2"},
                                           {"K", "80"}, {"sweep", "K"}, {"values", "60,70,80,90,100,110,120"}}, user);
        append(out, run_connectivity_simulate(s2, preset + "_q2"));
    } else if (preset == "fig-connectivity-P") {
        auto s1 = preset_settings(preset, {{"n", "1000"}, {"K", "40"}, {"q", "1"}, {"r", "0.1"}, {"P", "7000"},
                                           {"sweep", "P"}, {"values", "4000,5000,6000,7000,8000,10000,12000"}}, user);
        append(out, run_connectivity_simulate(s1, preset + "_q1"));
        auto s2 = preset_settings(preset, {{"n", "1000"}, {"K", "80"}, {"q", "2"}, {"r", "0.2"}, {"P", "19000"},
                                           {"sweep", "P"}, {"values", "10000,13000,16000,19000,22000,25000,28000"}},
                                  user);
        append(out, run_connectivity_simulate(s2, preset + "_q2"));
    } else if (preset == "fig-connectivity-r") {
        auto s1 = preset_settings(preset, {{"n", "1000"}, {"K", "40"}, {"P", "10000"}, {"q", "1"}, {"r", "0.12"},
                                           {"sweep", "r"}, {"values", "0.07,0.09,0.11,0.13,0.15,0.17"}}, user);
        append(out, run_connectivity_simulate(s1, preset + "_q1"));
        auto s2 = preset_settings(preset, {{"n", "1000"}, {"K", "80"}, {"P", "20000"}, {"q", "2"}, {"r", "0.2"},
                                           {"sweep", "r"}, {"values", "0.14,0.18,0.22,0.26,0.3,0.34"}}, user);
        append(out, run_connectivity_simulate(s2, preset + "_q2"));
    } else if (preset == "fig-capture") {
        auto s = preset_settings(preset, {{"n", "1000"}, {"K", "40"}, {"P", "10000"}, {"q", "1"}, {"r", "0.13"},
                                          {"m", "0"}, {"sweep", "m"}, {"values", "0,100,200,300,400,500,600,700,800"}},
                                 user);
        append(out, run_connectivity_simulate(s, preset));
    } else if (preset == "fig8") {
        // K and P are not given for these plots; 50 and 10000 put bK/P near
        // the printed replica counts.
        const Config base{{"K", "50"}, {"P", "10000"}, {"trials", "1000"}};
        auto with = [&](Config extra) {
            Config merged = base;
            for (auto& [k, v] : extra) merged[k] = v;
            return preset_settings(preset, merged, user);
        };
        auto a = with({{"q", "1,3"}, {"b", "100,200"}, {"c", "1,2,4,8,16,32,64,128"}, {"d", "1"}});
        append(out, run_replication_sweep(a, "fig8a"));
        auto b = with({{"q", "1,3"}, {"b", "100,200"}, {"c", "1,2,4,8,16,32"}, {"d", "8"}});
        append(out, run_replication_sweep(b, "fig8b"));
        auto c = with({{"q", "1,2,3"}, {"b", "20,50,100,150,200"}, {"c", "10"}, {"d", "1"}});
        append(out, run_replication_sweep(c, "fig8c"));
        auto d = with({{"q", "1,2,3"}, {"b", "20,50,100,150,200"}, {"c", "1"}, {"d", "1"}});
        append(out, run_replication_sweep(d, "fig8d"));
    } else if (preset == "table1") {
        auto s = preset_settings(preset, {}, user);
        append(out, run_table1(s, "table1"));
    } else if (preset == "table2-ratio") {
        auto plotted = preset_settings(preset, {{"K", "50"}, {"P", "10000"}, {"d", "1"}, {"q", "1,3"}, {"b", "100"},
                                              {"targets", "0.3,0.5,0.7,0.8,0.9,0.97,0.99"}}, user);
        append(out, run_replica_ratio(plotted, "table2_plot_setting"));
        auto regime = preset_settings(preset, {{"K", "10"}, {"P", "100000"}, {"d", "1"}, {"q", "1,2,3"}, {"b", "50"},
                                               {"targets", "0.5,0.9"}}, user);
        append(out, run_replica_ratio(regime, "table2_ratio"));
    } else if (preset == "two-node") {
        auto s = preset_settings(preset, {{"n", "2"}, {"K", "1"}, {"P", "1"}, {"q", "1"}, {"r", "0.5"},
                                          {"trials", "10000"}}, user);
        if (user.has("trials")) s.set("trials", user.text("trials"));
        auto tables = run_connectivity_simulate(s, "two_node");
        tables.front().meta["closed_form"] = std::numbers::pi / 4.0;
        append(out, std::move(tables));
    } else {
        throw InvalidParameter("unknown preset '" + preset + "'");
    }
    return out;
}

}  // namespace qcomp::experiments
