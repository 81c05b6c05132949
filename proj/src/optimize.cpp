#include "tollsplit/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "tollsplit/arrivals.hpp"
#include "tollsplit/coupling.hpp"
#include "tollsplit/rng.hpp"

namespace tollsplit {

namespace {

struct MeanStdErr {
    double mean = 0.0;
    double std_error = 0.0;
};

MeanStdErr mean_std_error(std::span<const double> xs) {
    MeanStdErr out;
    if (xs.empty()) return out;
    const double n = static_cast<double>(xs.size());
    out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    if (xs.size() < 2) return out;
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.std_error = std::sqrt(ss / (n - 1.0) / n);
    return out;
}

double mean_size(const SizeModel& model) {
    return std::visit(
        [](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, FixedSize>) return m.size;
            else if constexpr (std::is_same_v<T, ExponentialSize>) return m.mean;
            else if constexpr (std::is_same_v<T, TwoPointSize>) return m.p * m.a + (1.0 - m.p) * m.b;
            else return std::accumulate(m.values.begin(), m.values.end(), 0.0) / static_cast<double>(m.values.size());
        },
        model);
}

bool all_unit_fixed(std::span<const ClassSpec> classes) {
    return std::all_of(classes.begin(), classes.end(), [](const ClassSpec& c) { return is_unit_fixed(c.size_model); });
}

std::vector<Schedule> replications_of(const ScheduleFamily& family, std::size_t replications) {
    std::vector<Schedule> out;
    out.reserve(replications);
    for (std::size_t r = 0; r < replications; ++r) out.push_back(family.replication(r));
    return out;
}

}  // namespace

double revenue_rate(const SimReport& report, const SystemSpec& system) {
    const double span = report.horizon - report.window_start;
    if (!(span > 0.0)) throw Error("revenue rate needs a positive counting window");
    double revenue = 0.0;
    for (std::size_t j = 0; j < system.servers.size() && j < report.admitted_per_server.size(); ++j)
        revenue += system.servers[j].toll * static_cast<double>(report.admitted_per_server[j]);
    return revenue / span;
}

Schedule ScheduleFamily::replication(std::size_t r) const {
    return generate_schedule(scenario, derive_seed(seed, kReplicationDomain, r));
}

std::vector<double> make_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || hi < lo) throw Error("grid needs step > 0 and lo <= hi");
    std::vector<double> grid;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) grid.push_back(lo + static_cast<double>(i) * step);
    return grid;
}

TollPoint evaluate_toll(double total_rate, std::span<const ClassSpec> classes, std::span<const Schedule> schedules,
                        double horizon, double toll) {
    const SystemSpec system = single_server(total_rate, toll);
    SimOptions options;
    options.window_start = kWarmupFraction * horizon;
    std::vector<double> rates;
    rates.reserve(schedules.size());
    for (const auto& schedule : schedules)
        rates.push_back(revenue_rate(simulate(system, classes, schedule, horizon, options), system));
    const auto stats = mean_std_error(rates);
    return TollPoint{toll, stats.mean, stats.std_error};
}

TollSearchResult find_optn(double total_rate, std::span<const ClassSpec> classes, const ScheduleFamily& family,
                           std::span<const double> toll_grid, std::size_t replications) {
    if (toll_grid.empty()) throw Error("toll grid is empty");
    if (!std::is_sorted(toll_grid.begin(), toll_grid.end())) throw Error("toll grid must be sorted");
    if (replications < 1) throw Error("replications must be >= 1");

    const double horizon = family.scenario.horizon;
    const auto schedules = replications_of(family, replications);
    auto eval = [&](double toll) { return evaluate_toll(total_rate, classes, schedules, horizon, toll); };

    TollSearchResult result;
    result.grid_points = toll_grid.size();
    for (double toll : toll_grid) result.curve.push_back(eval(toll));

    std::size_t best = 0;
    for (std::size_t i = 1; i < result.curve.size(); ++i)
        if (result.curve[i].revenue_rate > result.curve[best].revenue_rate) best = i;

    if (toll_grid.size() > 1) {
        double step = toll_grid.back() - toll_grid.front();
        for (std::size_t i = 1; i < toll_grid.size(); ++i)
            if (toll_grid[i] > toll_grid[i - 1]) step = std::min(step, toll_grid[i] - toll_grid[i - 1]);
        result.grid_step = step;

        // Golden-section pass between the argmax's grid neighbours.
        double a = toll_grid[best == 0 ? 0 : best - 1];
        double b = toll_grid[std::min(best + 1, toll_grid.size() - 1)];
        const double tolerance = step / 100.0;
        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double c = b - inv_phi * (b - a);
        double d = a + inv_phi * (b - a);
        TollPoint pc = eval(c), pd = eval(d);
        result.curve.push_back(pc);
        result.curve.push_back(pd);
        while (b - a >= tolerance) {
            if (pc.revenue_rate > pd.revenue_rate) {
                b = d;
                d = c;
                pd = pc;
                c = b - inv_phi * (b - a);
                pc = eval(c);
                result.curve.push_back(pc);
            } else {
                a = c;
                c = d;
                pc = pd;
                d = a + inv_phi * (b - a);
                pd = eval(d);
                result.curve.push_back(pd);
            }
        }
    }

    std::stable_sort(result.curve.begin(), result.curve.end(),
                     [](const TollPoint& x, const TollPoint& y) { return x.toll < y.toll; });
    const auto top = std::max_element(result.curve.begin(), result.curve.end(),
                                      [](const TollPoint& x, const TollPoint& y) { return x.revenue_rate < y.revenue_rate; });
    result.best_toll = top->toll;
    result.best_revenue_rate = top->revenue_rate;
    return result;
}

double join_threshold(const ClassSpec& cls, const ServerSpec& server) {
    return server.rate * (cls.reward - server.toll) / cls.waiting_cost - 1.0;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::MergedDominates: return "merged-dominates";
        case Verdict::SplitWins: return "split-wins";
        case Verdict::NotAsserted: return "not-asserted";
    }
    return "unknown";
}

SplitComparison compare_split(const SystemSpec& split, std::span<const ClassSpec> classes, const ScheduleFamily& family,
                              std::size_t replications) {
    if (replications < 1) throw Error("replications must be >= 1");
    const ServerSpec merged_server = merge(split.servers);
    const SystemSpec merged{{merged_server}, merged_server.rate};
    const double horizon = family.scenario.horizon;

    SplitComparison out;
    for (std::size_t r = 0; r < replications; ++r) {
        const Schedule schedule = family.replication(r);
        const double s = revenue_rate(simulate(split, classes, schedule, horizon), split);
        const double m = revenue_rate(simulate(merged, classes, schedule, horizon), merged);
        out.split_rates.push_back(s);
        out.merged_rates.push_back(m);
        out.margins.push_back(s - m);
    }
    out.split_mean = mean_std_error(out.split_rates).mean;
    out.merged_mean = mean_std_error(out.merged_rates).mean;
    const auto margin = mean_std_error(out.margins);
    out.margin_mean = margin.mean;
    out.margin_std_error = margin.std_error;

    if (all_unit_fixed(classes)) {
        const bool dominated = std::all_of(out.margins.begin(), out.margins.end(), [](double x) { return x <= 0.0; });
        out.verdict = dominated ? Verdict::MergedDominates : Verdict::SplitWins;
    }
    return out;
}

HuntSpace HuntSpace::fixed_unit() {
    HuntSpace space;
    space.fixed_unit_only = true;
    return space;
}

HuntSpace HuntSpace::variable_size() { return HuntSpace{}; }

std::uint64_t hunt_instance_seed(std::uint64_t hunt_seed, std::size_t index) {
    return derive_seed(hunt_seed, kHuntDomain, index);
}

Scenario sample_instance(const HuntSpace& space, std::uint64_t instance_seed) {
    Rng rng(instance_seed);
    auto pick = [&](Range r) { return rng.uniform(r.lo, r.hi); };
    auto count = [&](std::size_t lo, std::size_t hi) { return lo + static_cast<std::size_t>(rng.below(hi - lo + 1)); };

    Scenario sc;
    sc.seed = instance_seed;
    const double total = pick(space.total_rate);
    const std::size_t m = count(space.min_servers, space.max_servers);
    const std::size_t n = count(space.min_classes, space.max_classes);

    std::vector<double> weights(m);
    for (auto& w : weights) w = 0.2 + rng.uniform();
    const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);

    double min_reward = 0.0;
    std::vector<double> shares(n);
    for (std::size_t i = 0; i < n; ++i) {
        ClassSpec c;
        c.id = static_cast<int>(i);
        c.reward = pick(space.reward);
        c.waiting_cost = pick(space.waiting_cost);
        if (space.fixed_unit_only) {
            c.size_model = FixedSize{1.0};
        } else {
            switch (rng.below(3)) {
                case 0: c.size_model = ExponentialSize{rng.uniform(0.5, 2.0)}; break;
                case 1: c.size_model = TwoPointSize{rng.uniform(0.1, 1.0), rng.uniform(2.0, 8.0), rng.uniform(0.5, 0.95)}; break;
                default: c.size_model = FixedSize{rng.uniform(0.25, 3.0)}; break;
            }
        }
        shares[i] = 0.2 + rng.uniform();
        min_reward = i == 0 ? c.reward : std::min(min_reward, c.reward);
        sc.classes.push_back(c);
    }
    const double share_sum = std::accumulate(shares.begin(), shares.end(), 0.0);
    const double load = pick(space.load);
    double lambda = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        auto& c = sc.classes[i];
        c.arrival_rate = load * total * (shares[i] / share_sum) / mean_size(c.size_model);
        lambda += c.arrival_rate;
    }

    const double toll = pick(space.toll_fraction) * min_reward;
    sc.system.total_rate = total;
    for (std::size_t j = 0; j < m; ++j) sc.system.servers.push_back({total * weights[j] / wsum, toll});
    sc.horizon = space.expected_arrivals / lambda;
    return sc;
}

double significance_threshold(double std_error) { return 3.0 * std_error + 1e-6; }

HuntResult hunt_counterexample(const HuntSpace& space, std::size_t budget, std::uint64_t seed) {
    if (budget < 1) throw Error("hunt budget must be >= 1");
    HuntResult result;
    for (std::size_t i = 0; i < budget; ++i) {
        const std::uint64_t instance_seed = hunt_instance_seed(seed, i);
        Scenario sc = sample_instance(space, instance_seed);
        const SplitComparison cmp = compare_split(sc.system, sc.classes, ScheduleFamily{sc, instance_seed},
                                                  space.replications);
        ++result.instances;
        result.largest_margin = i == 0 ? cmp.margin_mean : std::max(result.largest_margin, cmp.margin_mean);
        if (cmp.margin_mean > significance_threshold(cmp.margin_std_error)) {
            result.findings.push_back(HuntFinding{i, instance_seed, std::move(sc), cmp.split_mean, cmp.merged_mean,
                                                  cmp.margin_mean, cmp.margin_std_error});
        }
    }
    return result;
}

SplitComparison replay_finding(const HuntFinding& finding, std::size_t replications) {
    return compare_split(finding.scenario.system, finding.scenario.classes,
                         ScheduleFamily{finding.scenario, finding.seed}, replications);
}

}  // namespace tollsplit
