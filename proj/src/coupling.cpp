#include "tollsplit/coupling.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace tollsplit {

namespace {

double imbalance(const SimReport& r) {
    return std::abs(r.total_admitted_work - r.completed_work - r.residual_work);
}

double horizon_of(const Schedule& schedule) { return schedule.empty() ? 0.0 : schedule.arrivals.back().time; }

void require_scope(const SystemSpec& split, const Schedule& schedule, const VerifyOptions& options) {
    if (!is_equal_toll(split)) throw Error("equal-toll required");
    if (!options.require_unit_sizes) return;
    for (std::size_t k = 0; k < schedule.size(); ++k)
        if (schedule.arrivals[k].size != 1.0)
            throw Error(fmt::format("Lemma 1 scope is fixed-size: arrival {} has size {:.17g}", k,
                                    schedule.arrivals[k].size));
}

struct Run {
    Trace trace;
    SimReport report;
};

Run run(const SystemSpec& system, std::span<const ClassSpec> classes, const Schedule& schedule,
        CouplingReport& into) {
    Run r;
    SimOptions options;
    options.trace = &r.trace;
    r.report = simulate(system, classes, schedule, horizon_of(schedule), options);
    ++into.simulations;
    into.max_work_imbalance = std::max(into.max_work_imbalance, imbalance(r.report));
    return r;
}

void settle(CouplingReport& report) {
    report.dominance_holds = report.admitted_merged_on_L >= report.admitted_split && report.violations.empty();
}

}  // namespace

ServerSpec merge(std::span<const ServerSpec> servers) {
    if (servers.empty()) throw Error("cannot merge an empty server list");
    ServerSpec out{0.0, servers.front().toll};
    for (const auto& s : servers) {
        if (s.toll != out.toll) throw Error("equal-toll required");
        out.rate += s.rate;
    }
    return out;
}

Schedule admitted_subschedule(const Trace& trace, const Schedule& schedule) {
    if (trace.size() != schedule.size())
        throw Error(fmt::format("trace has {} events but schedule has {} arrivals", trace.size(), schedule.size()));
    Schedule out;
    for (std::size_t k = 0; k < trace.size(); ++k)
        if (trace[k].decision.joined()) out.arrivals.push_back(schedule.arrivals[k]);
    return out;
}

CouplingReport verify_lemma1(const SystemSpec& split, const ServerSpec& merged, const Schedule& schedule,
                             std::span<const ClassSpec> classes, const VerifyOptions& options) {
    if (split.servers.size() != 2)
        throw Error(fmt::format("lemma check needs exactly 2 servers, got {}", split.servers.size()));
    require_scope(split, schedule, options);
    if (merged.toll != split.servers[0].toll) throw Error("equal-toll required: merged toll differs");
    const double rate_sum = split.servers[0].rate + split.servers[1].rate;
    if (std::abs(merged.rate - rate_sum) > kSplitTolerance)
        throw Error(fmt::format("merged rate {:.17g} is not the split total {:.17g}", merged.rate, rate_sum));

    const SystemSpec single{{merged}, merged.rate};
    CouplingReport report;
    report.schedule_length = schedule.size();

    // S1 on L, then L'.
    const Run split_on_L = run(split, classes, schedule, report);
    report.admitted_split = split_on_L.report.admitted;
    const Schedule admitted = admitted_subschedule(split_on_L.trace, schedule);

    // Both systems replay L'; compare pre-arrival states epoch by epoch.
    const Run split_on_Lp = run(split, classes, admitted, report);
    const Run merged_on_Lp = run(single, classes, admitted, report);
    report.admitted_merged_on_Lprime = merged_on_Lp.report.admitted;

    for (std::size_t k = 0; k < admitted.size(); ++k) {
        const TraceEvent& s = split_on_Lp.trace[k];
        const TraceEvent& m = merged_on_Lp.trace[k];
        ++report.epochs_checked;

        const double f_min = std::min(s.sojourns[0], s.sojourns[1]);
        if (m.sojourns[0] > f_min + kInvariantTolerance)
            report.violations.push_back({k, kSojournInvariant, m.sojourns[0], f_min});

        const double w_sum = s.workloads[0] + s.workloads[1];
        if (m.workloads[0] > w_sum + kInvariantTolerance)
            report.violations.push_back({k, kWorkloadInvariant, m.workloads[0], w_sum});

        if (!m.decision.joined()) report.violations.push_back({k, kAdmissionInvariant, 0.0, 1.0});
        if (!s.decision.joined()) report.violations.push_back({k, kSplitReplayInvariant, 0.0, 1.0});
    }

    const Run merged_on_L = run(single, classes, schedule, report);
    report.admitted_merged_on_L = merged_on_L.report.admitted;
    settle(report);
    return report;
}

CouplingReport verify_theorem1(const SystemSpec& split, const Schedule& schedule, std::span<const ClassSpec> classes,
                               const VerifyOptions& options) {
    if (split.servers.empty()) throw Error("system has no servers");
    require_scope(split, schedule, options);

    const ServerSpec merged = merge(split.servers);
    const SystemSpec single{{merged}, merged.rate};
    CouplingReport report;
    report.schedule_length = schedule.size();

    const Run split_on_L = run(split, classes, schedule, report);
    report.admitted_split = split_on_L.report.admitted;
    const Schedule admitted = admitted_subschedule(split_on_L.trace, schedule);
    report.admitted_merged_on_Lprime = run(single, classes, admitted, report).report.admitted;
    report.admitted_merged_on_L = run(single, classes, schedule, report).report.admitted;

    // Induction chain: the first p servers merged into one, against server p+1.
    const std::size_t m = split.servers.size();
    for (std::size_t p = 1; p < m; ++p) {
        const std::span<const ServerSpec> head(split.servers.data(), p);
        const ServerSpec prefix = merge(head);
        const ServerSpec next = split.servers[p];
        const SystemSpec pair{{prefix, next}, prefix.rate + next.rate};
        const ServerSpec pair_merged{prefix.rate + next.rate, prefix.toll};

        CouplingReport step = verify_lemma1(pair, pair_merged, schedule, classes, options);
        report.epochs_checked += step.epochs_checked;
        report.simulations += step.simulations;
        report.max_work_imbalance = std::max(report.max_work_imbalance, step.max_work_imbalance);
        for (auto v : step.violations) {
            v.step = p;
            report.violations.push_back(v);
        }
        report.steps.push_back(std::move(step));
    }

    settle(report);
    return report;
}

}  // namespace tollsplit
