#include "tollsplit/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "tollsplit/arrivals.hpp"
#include "tollsplit/config.hpp"
#include "tollsplit/coupling.hpp"
#include "tollsplit/io.hpp"
#include "tollsplit/optimize.hpp"

namespace tollsplit::cli {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
    std::string command;
    std::string scenario_path;
    std::string schedule_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::size_t reps = kDefaultReplications;
    std::size_t budget = 200;
    std::string grid;
    std::string space = "variable";
};

std::ofstream open_out(const fs::path& dir, const std::string& name) {
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(fmt::format("cannot write '{}'", (dir / name).string()));
    return f;
}

void write_line(std::ostream& out, const nlohmann::json& record) { out << record.dump() << '\n'; }

Scenario scenario_for(const RunConfig& cfg) {
    if (cfg.scenario_path.empty()) throw Error("--scenario is required");
    Scenario sc = load_scenario(cfg.scenario_path);
    if (cfg.seed) sc.seed = *cfg.seed;
    return sc;
}

Schedule schedule_for(const RunConfig& cfg, const Scenario& sc) {
    if (cfg.schedule_path.empty()) return generate_schedule(sc, sc.seed);
    std::ifstream in(cfg.schedule_path);
    if (!in) throw Error(fmt::format("cannot read schedule '{}'", cfg.schedule_path));
    return read_schedule_csv(in);
}

void require_unit_classes(const Scenario& sc) {
    for (const auto& c : sc.classes)
        if (!is_unit_fixed(c.size_model))
            throw Error(fmt::format("Lemma 1 scope is fixed-size: class {} has size model {}", c.id,
                                    describe(c.size_model)));
}

std::vector<double> parse_grid(const std::string& spec, const Scenario& sc) {
    if (spec.empty()) {
        double top = 0.0;
        for (const auto& c : sc.classes) top = std::max(top, c.reward);
        return make_grid(0.0, top, top / 40.0);
    }
    const auto a = spec.find(':');
    const auto b = a == std::string::npos ? std::string::npos : spec.find(':', a + 1);
    if (b == std::string::npos) throw Error(fmt::format("--grid expects lo:hi:step, got '{}'", spec));
    try {
        return make_grid(std::stod(spec.substr(0, a)), std::stod(spec.substr(a + 1, b - a - 1)),
                         std::stod(spec.substr(b + 1)));
    } catch (const std::logic_error&) {
        throw Error(fmt::format("--grid expects lo:hi:step, got '{}'", spec));
    }
}

int cmd_simulate(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
    const Scenario sc = scenario_for(cfg);
    const Schedule schedule = schedule_for(cfg, sc);
    const SimResult result = simulate(sc, schedule);

    auto sched = open_out(dir, "schedule.csv");
    write_schedule_csv(sched, schedule);
    auto trace = open_out(dir, "trace.csv");
    write_trace_csv(trace, result.trace, sc.system.servers.size());
    auto report = open_out(dir, "report.jsonl");
    auto record = to_json(result.report);
    record["command"] = "simulate";
    record["seed"] = sc.seed;
    write_line(report, record);

    out << fmt::format("admitted {} balked {} revenue_rate {}\n", result.report.admitted, result.report.balked,
                       format_number(result.report.revenue_rate));
    return kExitOk;
}

int cmd_verify(const RunConfig& cfg, const fs::path& dir, std::ostream& out, bool theorem) {
    const Scenario sc = scenario_for(cfg);
    require_unit_classes(sc);
    if (!is_equal_toll(sc.system)) throw Error("equal-toll required");
    if (!theorem && sc.system.servers.size() != 2)
        throw Error(fmt::format("verify-lemma1 needs exactly 2 servers, scenario has {}", sc.system.servers.size()));

    const ScheduleFamily family{sc, sc.seed};
    auto report = open_out(dir, "report.jsonl");
    auto violations = open_out(dir, "violations.csv");
    auto trace_file = open_out(dir, "trace.csv");

    bool clean = true;
    std::size_t epochs = 0;
    for (std::size_t r = 0; r < cfg.reps; ++r) {
        const Schedule schedule = r == 0 && !cfg.schedule_path.empty() ? schedule_for(cfg, sc) : family.replication(r);
        const CouplingReport rep = theorem
                                       ? verify_theorem1(sc.system, schedule, sc.classes)
                                       : verify_lemma1(sc.system, merge(sc.system.servers), schedule, sc.classes);
        auto record = to_json(rep);
        record["command"] = theorem ? "verify-theorem1" : "verify-lemma1";
        record["replication"] = r;
        write_line(report, record);
        if (r == 0) {
            write_violations_csv(violations, rep);
            Trace trace;
            SimOptions options;
            options.trace = &trace;
            simulate(sc.system, sc.classes, schedule, sc.horizon, options);
            write_trace_csv(trace_file, trace, sc.system.servers.size());
        } else {
            std::ostringstream rows;
            write_violations_csv(rows, rep);
            const auto text = rows.str();
            violations << text.substr(text.find('\n') + 1);
        }
        clean = clean && rep.dominance_holds;
        epochs += rep.epochs_checked;
    }
    out << fmt::format("{} replications, {} epochs checked, {}\n", cfg.reps, epochs,
                       clean ? "no violations" : "VIOLATIONS FOUND");
    return clean ? kExitOk : kExitViolations;
}

int cmd_optimize(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
    const Scenario sc = scenario_for(cfg);
    const auto grid = parse_grid(cfg.grid, sc);
    const TollSearchResult result =
        find_optn(sc.system.total_rate, sc.classes, ScheduleFamily{sc, sc.seed}, grid, cfg.reps);

    auto curve = open_out(dir, "curve.csv");
    write_toll_curve_csv(curve, result);
    auto report = open_out(dir, "report.jsonl");
    auto record = to_json(result);
    record["command"] = "optimize";
    record["seed"] = sc.seed;
    record["replications"] = cfg.reps;
    write_line(report, record);

    if (sc.system.servers.size() > 1 && is_equal_toll(sc.system)) {
        auto cmp = to_json(compare_split(sc.system, sc.classes, ScheduleFamily{sc, sc.seed}, cfg.reps));
        cmp["command"] = "compare-split";
        write_line(report, cmp);
    }
    out << fmt::format("best toll {} revenue rate {}\n", format_number(result.best_toll),
                       format_number(result.best_revenue_rate));
    return kExitOk;
}

int cmd_hunt(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
    HuntSpace space;
    if (cfg.space == "fixed") space = HuntSpace::fixed_unit();
    else if (cfg.space == "variable") space = HuntSpace::variable_size();
    else throw Error(fmt::format("--space must be 'fixed' or 'variable', got '{}'", cfg.space));
    space.replications = cfg.reps;

    std::uint64_t seed = cfg.seed.value_or(0);
    if (!cfg.scenario_path.empty() && !cfg.seed) seed = load_scenario(cfg.scenario_path).seed;

    const HuntResult result = hunt_counterexample(space, cfg.budget, seed);
    auto findings = open_out(dir, "findings.csv");
    write_findings_csv(findings, result.findings);
    if (!result.findings.empty()) {
        fs::create_directories(dir / "findings");
        for (const auto& f : result.findings) {
            auto cfg_out = open_out(dir / "findings", fmt::format("instance_{}.cfg", f.instance));
            cfg_out << format_scenario(f.scenario);
        }
    }
    auto report = open_out(dir, "report.jsonl");
    write_line(report, {{"command", "hunt"},
                        {"space", cfg.space},
                        {"seed", seed},
                        {"budget", cfg.budget},
                        {"instances", result.instances},
                        {"findings", result.findings.size()},
                        {"largest_margin", result.largest_margin}});
    out << fmt::format("{} instances, {} findings\n", result.instances, result.findings.size());
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Toll-queue simulator, resource-splitting verifier and revenue optimizer", "tollsplit"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto common = [&](CLI::App* sub, bool scenario_required) {
        auto* opt = sub->add_option("--scenario", cfg.scenario_path, "Scenario config file");
        if (scenario_required) opt->required();
        opt->check(CLI::ExistingFile);
        sub->add_option("--out", cfg.out_dir, "Output directory");
        sub->add_option("--seed", cfg.seed, "Override the scenario seed");
        sub->add_option("--reps", cfg.reps, "Replications")->check(CLI::PositiveNumber);
    };

    auto* simulate_cmd = app.add_subcommand("simulate", "Replay one sample path and write trace.csv, report.jsonl");
    common(simulate_cmd, true);
    simulate_cmd->add_option("--schedule", cfg.schedule_path, "Replay this schedule.csv instead of generating one")
        ->check(CLI::ExistingFile);

    auto* lemma_cmd = app.add_subcommand("verify-lemma1", "Check the two-server coupling invariants");
    common(lemma_cmd, true);
    lemma_cmd->add_option("--schedule", cfg.schedule_path, "Use this schedule.csv for replication 0")
        ->check(CLI::ExistingFile);

    auto* theorem_cmd = app.add_subcommand("verify-theorem1", "Check split-vs-merged dominance and the induction chain");
    common(theorem_cmd, true);
    theorem_cmd->add_option("--schedule", cfg.schedule_path, "Use this schedule.csv for replication 0")
        ->check(CLI::ExistingFile);

    auto* optimize_cmd = app.add_subcommand("optimize", "Search the single-server revenue-maximizing toll");
    common(optimize_cmd, true);
    optimize_cmd->add_option("--grid", cfg.grid, "Toll grid lo:hi:step");

    auto* hunt_cmd = app.add_subcommand("hunt", "Search random instances for splits that beat the merged server");
    common(hunt_cmd, false);
    hunt_cmd->add_option("--budget", cfg.budget, "Instances to sample")->check(CLI::PositiveNumber);
    hunt_cmd->add_option("--space", cfg.space, "fixed | variable job sizes");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        const fs::path dir = cfg.out_dir;
        fs::create_directories(dir);
        if (simulate_cmd->parsed()) return cmd_simulate(cfg, dir, out);
        if (lemma_cmd->parsed()) return cmd_verify(cfg, dir, out, false);
        if (theorem_cmd->parsed()) return cmd_verify(cfg, dir, out, true);
        if (optimize_cmd->parsed()) return cmd_optimize(cfg, dir, out);
        if (hunt_cmd->parsed()) return cmd_hunt(cfg, dir, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace tollsplit::cli
