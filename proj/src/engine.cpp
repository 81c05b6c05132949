#include "tollsplit/engine.hpp"

#include <algorithm>
#include <unordered_map>

#include <fmt/format.h>

namespace tollsplit {

bool Schedule::is_sorted() const {
    return std::is_sorted(arrivals.begin(), arrivals.end(),
                          [](const Arrival& a, const Arrival& b) { return a.time < b.time; });
}

ServerState decay(const ServerState& state, double to_time, double rate) {
    if (to_time < state.last_update)
        throw Error(fmt::format("non-monotonic clock: {:.17g} < {:.17g}", to_time, state.last_update));
    const double elapsed = to_time - state.last_update;
    return ServerState{std::max(state.workload - rate * elapsed, 0.0), to_time};
}

double predict_sojourn(const ServerState& state, double size, double rate) {
    return (state.workload + size) / rate;
}

double utility(const ClassSpec& cls, const ServerSpec& server, double sojourn) {
    return cls.reward - server.toll - cls.waiting_cost * sojourn;
}

ServerState apply(const ServerState& state, double size) {
    return ServerState{state.workload + size, state.last_update};
}

Decision decide(std::span<const double> utilities) {
    if (utilities.empty()) return Decision::balk();
    std::size_t best = 0;
    for (std::size_t j = 1; j < utilities.size(); ++j)
        if (utilities[j] > utilities[best]) best = j;
    return utilities[best] > 0.0 ? Decision::join(best) : Decision::balk();
}

SimReport simulate(const SystemSpec& system, std::span<const ClassSpec> classes, const Schedule& schedule,
                   double horizon, const SimOptions& options) {
    if (system.servers.empty()) throw Error("system has no servers");
    if (!schedule.is_sorted()) throw Error("schedule is not sorted by time");

    std::unordered_map<int, const ClassSpec*> by_id;
    for (const auto& c : classes) by_id.emplace(c.id, &c);

    const std::size_t m = system.servers.size();
    std::vector<ServerState> states(m);
    std::vector<double> sojourns(m), utilities(m);

    SimReport report;
    report.admitted_per_server.assign(m, 0);
    report.window_start = options.window_start;
    report.horizon = horizon;

    if (options.trace != nullptr) {
        options.trace->clear();
        options.trace->reserve(schedule.size());
    }

    auto advance = [&](double to_time) {
        for (std::size_t j = 0; j < m; ++j) {
            const double before = states[j].workload;
            states[j] = decay(states[j], to_time, system.servers[j].rate);
            report.completed_work += before - states[j].workload;
        }
    };

    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const Arrival& arrival = schedule.arrivals[k];
        if (arrival.time < 0.0) throw Error(fmt::format("arrival {} has negative time", k));
        if (!(arrival.size > 0.0)) throw Error(fmt::format("arrival {} has unrealized size", k));
        auto found = by_id.find(arrival.class_id);
        if (found == by_id.end()) throw Error(fmt::format("arrival {} names unknown class {}", k, arrival.class_id));
        const ClassSpec& cls = *found->second;

        advance(arrival.time);
        for (std::size_t j = 0; j < m; ++j) {
            sojourns[j] = predict_sojourn(states[j], arrival.size, system.servers[j].rate);
            utilities[j] = utility(cls, system.servers[j], sojourns[j]);
        }
        const Decision decision = decide(utilities);

        if (options.trace != nullptr) {
            TraceEvent event;
            event.index = k;
            event.time = arrival.time;
            event.class_id = arrival.class_id;
            event.size = arrival.size;
            event.workloads.reserve(m);
            for (const auto& s : states) event.workloads.push_back(s.workload);
            event.sojourns = sojourns;
            event.utilities = utilities;
            event.decision = decision;
            options.trace->push_back(std::move(event));
        }

        const bool counted = arrival.time >= options.window_start;
        if (decision.joined()) {
            const std::size_t j = *decision.server;
            states[j] = apply(states[j], arrival.size);
            report.total_admitted_work += arrival.size;
            if (counted) {
                ++report.admitted;
                ++report.admitted_per_server[j];
                report.admitted_work += arrival.size;
                report.revenue += system.servers[j].toll;
            }
        } else if (counted) {
            ++report.balked;
        }
    }

    report.end_time = schedule.empty() ? horizon : std::max(horizon, schedule.arrivals.back().time);
    advance(report.end_time);
    for (const auto& s : states) report.residual_work += s.workload;

    const double span = horizon - options.window_start;
    if (span > 0.0) {
        report.throughput_rate = static_cast<double>(report.admitted) / span;
        report.revenue_rate = report.revenue / span;
    }
    return report;
}

SimResult simulate(const Scenario& scenario, const Schedule& schedule) {
    require_valid(scenario);
    SimResult result;
    SimOptions options;
    options.trace = &result.trace;
    result.report = simulate(scenario.system, scenario.classes, schedule, scenario.horizon, options);
    return result;
}

}  // namespace tollsplit
