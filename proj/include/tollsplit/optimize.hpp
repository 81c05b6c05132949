#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tollsplit/engine.hpp"
#include "tollsplit/model.hpp"

namespace tollsplit {

inline constexpr double kWarmupFraction = 0.1;
inline constexpr std::size_t kDefaultReplications = 8;
inline constexpr double kDefaultExpectedArrivals = 1e4;

// Sum of toll times admissions over the counting window length.
double revenue_rate(const SimReport& report, const SystemSpec& system);

// Replication r replays generate_schedule(scenario, derive_seed(seed, replication domain, r)).
// Only the classes, interarrival laws and horizon of `scenario` are used.
struct ScheduleFamily {
    Scenario scenario;
    std::uint64_t seed = 0;

    Schedule replication(std::size_t r) const;
};

struct TollPoint {
    double toll = 0.0;
    double revenue_rate = 0.0;
    double std_error = 0.0;
};

struct TollSearchResult {
    double best_toll = 0.0;
    double best_revenue_rate = 0.0;
    std::vector<TollPoint> curve;  // grid points plus refinement probes, sorted by toll
    std::size_t grid_points = 0;
    double grid_step = 0.0;
};

std::vector<double> make_grid(double lo, double hi, double step);

// Mean windowed revenue rate of a single server over the replications at one toll.
TollPoint evaluate_toll(double total_rate, std::span<const ClassSpec> classes, std::span<const Schedule> schedules,
                        double horizon, double toll);

TollSearchResult find_optn(double total_rate, std::span<const ClassSpec> classes, const ScheduleFamily& family,
                           std::span<const double> toll_grid, std::size_t replications);

// Workload below which a unit job joins a single server.
double join_threshold(const ClassSpec& cls, const ServerSpec& server);

enum class Verdict { MergedDominates, SplitWins, NotAsserted };

std::string to_string(Verdict v);

struct SplitComparison {
    std::vector<double> split_rates;
    std::vector<double> merged_rates;
    std::vector<double> margins;  // split - merged, one per replication
    double split_mean = 0.0;
    double merged_mean = 0.0;
    double margin_mean = 0.0;
    double margin_std_error = 0.0;
    Verdict verdict = Verdict::NotAsserted;
};

// Revenue rates of `split` and its merged single server on identical schedules, measured from t = 0.
SplitComparison compare_split(const SystemSpec& split, std::span<const ClassSpec> classes, const ScheduleFamily& family,
                              std::size_t replications);

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

struct HuntSpace {
    std::size_t min_servers = 2;
    std::size_t max_servers = 4;
    std::size_t min_classes = 1;
    std::size_t max_classes = 3;
    Range total_rate{1.0, 4.0};
    Range reward{1.0, 10.0};
    Range waiting_cost{0.25, 2.0};
    Range toll_fraction{0.0, 0.9};  // common toll as a fraction of the smallest reward
    Range load{0.5, 2.0};           // offered work per unit of total rate
    bool fixed_unit_only = false;
    double expected_arrivals = kDefaultExpectedArrivals;
    std::size_t replications = kDefaultReplications;

    static HuntSpace fixed_unit();
    static HuntSpace variable_size();
};

struct HuntFinding {
    std::size_t instance = 0;
    std::uint64_t seed = 0;  // instance seed; regenerates scenario and schedules
    Scenario scenario;
    double split_revenue_rate = 0.0;
    double merged_revenue_rate = 0.0;
    double margin = 0.0;
    double margin_std_error = 0.0;
};

struct HuntResult {
    std::vector<HuntFinding> findings;
    std::size_t instances = 0;
    double largest_margin = 0.0;
};

Scenario sample_instance(const HuntSpace& space, std::uint64_t instance_seed);
std::uint64_t hunt_instance_seed(std::uint64_t hunt_seed, std::size_t index);

// Threshold for a split win to count as a finding.
double significance_threshold(double std_error);

HuntResult hunt_counterexample(const HuntSpace& space, std::size_t budget, std::uint64_t seed);

// Reruns a finding from its stored scenario and seed.
SplitComparison replay_finding(const HuntFinding& finding, std::size_t replications);

}  // namespace tollsplit
