#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tollsplit/model.hpp"

namespace tollsplit {

struct Arrival {
    double time = 0.0;
    int class_id = 0;
    double size = 0.0;  // 0 until realized
};

struct Schedule {
    std::vector<Arrival> arrivals;

    std::size_t size() const { return arrivals.size(); }
    bool empty() const { return arrivals.empty(); }
    bool is_sorted() const;
};

// Remaining work at one server.
struct ServerState {
    double workload = 0.0;
    double last_update = 0.0;
};

ServerState decay(const ServerState& state, double to_time, double rate);
// Time an arriving job of `size` would spend at the server: wait plus own service.
double predict_sojourn(const ServerState& state, double size, double rate);
double utility(const ClassSpec& cls, const ServerSpec& server, double sojourn);
ServerState apply(const ServerState& state, double size);

struct Decision {
    std::optional<std::size_t> server;  // empty means balk

    static Decision balk() { return {}; }
    static Decision join(std::size_t j) { return Decision{j}; }
    bool joined() const { return server.has_value(); }
    friend bool operator==(const Decision&, const Decision&) = default;
};

// Lowest-index maximizer joins if its utility is strictly positive.
Decision decide(std::span<const double> utilities);

struct TraceEvent {
    std::size_t index = 0;
    double time = 0.0;
    int class_id = 0;
    double size = 0.0;
    std::vector<double> workloads;  // V_j just before the arrival
    std::vector<double> sojourns;   // f_j just before the arrival
    std::vector<double> utilities;
    Decision decision;
};

using Trace = std::vector<TraceEvent>;

struct SimReport {
    std::size_t admitted = 0;
    std::size_t balked = 0;
    std::vector<std::size_t> admitted_per_server;
    double admitted_work = 0.0;
    double window_start = 0.0;  // arrivals before this instant are not counted
    double horizon = 0.0;
    double throughput_rate = 0.0;
    double revenue = 0.0;
    double revenue_rate = 0.0;

    // Whole-run work accounting, independent of the counting window.
    double total_admitted_work = 0.0;
    double completed_work = 0.0;
    double residual_work = 0.0;
    double end_time = 0.0;
};

struct SimOptions {
    double window_start = 0.0;
    Trace* trace = nullptr;  // filled with one event per arrival when set
};

// Replays `schedule` through `system`. Every arrival must name a class in `classes`.
SimReport simulate(const SystemSpec& system, std::span<const ClassSpec> classes, const Schedule& schedule,
                   double horizon, const SimOptions& options = {});

struct SimResult {
    Trace trace;
    SimReport report;
};

SimResult simulate(const Scenario& scenario, const Schedule& schedule);

}  // namespace tollsplit
