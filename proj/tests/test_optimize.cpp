#include <doctest.h>

#include <cmath>

#include "tollsplit/arrivals.hpp"
#include "tollsplit/optimize.hpp"

using namespace tollsplit;

namespace {

SimReport counted(std::vector<std::size_t> per_server, double horizon) {
    SimReport r;
    r.admitted_per_server = std::move(per_server);
    r.horizon = horizon;
    return r;
}

Scenario naor(double reward, double cost, double rate, double lambda, double horizon) {
    Scenario sc;
    sc.classes = {ClassSpec{0, lambda, reward, cost, FixedSize{1}}};
    sc.system = single_server(rate, 0);
    sc.horizon = horizon;
    return sc;
}

}  // namespace

TEST_CASE("revenue_rate is toll-weighted admissions over the window") {
    CHECK(revenue_rate(counted({50}, 100), single_server(1, 2)) == 1.0);
    CHECK(revenue_rate(counted({50}, 100), single_server(1, 0)) == 0.0);
    CHECK(revenue_rate(counted({10, 0}, 10), SystemSpec{{{1, 1}, {1, 3}}, 2}) == 1.0);
    CHECK_THROWS_AS(revenue_rate(counted({1}, 0), single_server(1, 1)), Error);
}

TEST_CASE("revenue_rate is linear in toll for fixed admissions") {
    const auto r = counted({37}, 50);
    CHECK(revenue_rate(r, single_server(1, 3.0)) == doctest::Approx(3.0 * revenue_rate(r, single_server(1, 1.0))));
}

TEST_CASE("join_threshold closed form") {
    CHECK(join_threshold(ClassSpec{0, 1, 2, 1, FixedSize{}}, ServerSpec{1, 0}) == 1.0);
    CHECK(join_threshold(ClassSpec{0, 1, 1, 3, FixedSize{}}, ServerSpec{5, 1}) == -1.0);
    CHECK(join_threshold(ClassSpec{0, 1, 3, 2, FixedSize{}}, ServerSpec{2, 1}) == 1.0);
}

TEST_CASE("single-server decisions follow the threshold rule") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng rng(seed);
        Scenario sc = naor(rng.uniform(1, 10), rng.uniform(0.1, 3), rng.uniform(0.5, 3), rng.uniform(0.5, 4), 1);
        sc.system.servers[0].toll = rng.uniform(0, sc.classes[0].reward);
        sc.horizon = 1000 / sc.classes[0].arrival_rate;
        const auto result = simulate(sc, generate_schedule(sc, seed));
        const double threshold = join_threshold(sc.classes[0], sc.system.servers[0]);
        for (const auto& e : result.trace) CHECK(e.decision.joined() == (e.workloads[0] < threshold));
    }
}

TEST_CASE("find_optn degenerate grids") {
    const auto sc = naor(4, 1, 1, 2, 500);
    const std::vector<double> zero{0.0};
    const auto r0 = find_optn(1.0, sc.classes, ScheduleFamily{sc, 1}, zero, 2);
    CHECK(r0.best_toll == 0.0);
    CHECK(r0.best_revenue_rate == 0.0);

    const std::vector<double> high{4.0, 5.0, 6.0};
    const auto rh = find_optn(1.0, sc.classes, ScheduleFamily{sc, 1}, high, 2);
    CHECK(rh.best_revenue_rate == 0.0);
    for (const auto& p : rh.curve) CHECK(p.revenue_rate == 0.0);

    CHECK_THROWS_AS(find_optn(1.0, sc.classes, ScheduleFamily{sc, 1}, std::vector<double>{}, 1), Error);
    CHECK_THROWS_AS(find_optn(1.0, sc.classes, ScheduleFamily{sc, 1}, std::vector<double>{2, 1}, 1), Error);
}

TEST_CASE("find_optn never reports less than the best grid point and is reproducible") {
    const auto sc = naor(4, 1, 1, 2, 1000);
    const auto grid = make_grid(0, 4, 0.25);
    const auto a = find_optn(1.0, sc.classes, ScheduleFamily{sc, 5}, grid, 3);
    const auto b = find_optn(1.0, sc.classes, ScheduleFamily{sc, 5}, grid, 3);
    CHECK(a.best_toll == b.best_toll);
    CHECK(a.best_revenue_rate == b.best_revenue_rate);
    CHECK(a.curve.size() > grid.size());
    std::vector<Schedule> schedules;
    for (std::size_t r = 0; r < 3; ++r) schedules.push_back(ScheduleFamily{sc, 5}.replication(r));
    for (double t : grid) CHECK(evaluate_toll(1.0, sc.classes, schedules, sc.horizon, t).revenue_rate <= a.best_revenue_rate);
    for (const auto& p : a.curve) CHECK(p.revenue_rate <= a.best_revenue_rate);
}

TEST_CASE("make_grid covers both ends") {
    const auto g = make_grid(0, 1, 0.1);
    CHECK(g.size() == 11);
    CHECK(g.back() == doctest::Approx(1.0));
    CHECK_THROWS_AS(make_grid(0, 1, 0), Error);
}

TEST_CASE("compare_split on fixed sizes: merged dominates every replication") {
    Scenario sc;
    sc.classes = {ClassSpec{0, 3, 4, 1, FixedSize{1}}, ClassSpec{1, 1, 8, 2, FixedSize{1}}};
    sc.system = SystemSpec{{{1.5, 1}, {1.0, 1}, {1.5, 1}}, 4};
    sc.horizon = 500;
    const auto cmp = compare_split(sc.system, sc.classes, ScheduleFamily{sc, 2}, 4);
    CHECK(cmp.verdict == Verdict::MergedDominates);
    for (double m : cmp.margins) CHECK(m <= 0.0);
}

TEST_CASE("compare_split edge cases") {
    Scenario sc = naor(4, 1, 2, 2, 300);
    sc.system.servers[0].toll = 1;
    const auto same = compare_split(sc.system, sc.classes, ScheduleFamily{sc, 3}, 3);
    for (double m : same.margins) CHECK(m == 0.0);

    Scenario var = sc;
    var.classes[0].size_model = ExponentialSize{1.0};
    var.system = SystemSpec{{{1, 1}, {1, 1}}, 2};
    const auto v = compare_split(var.system, var.classes, ScheduleFamily{var, 3}, 3);
    CHECK(v.verdict == Verdict::NotAsserted);
    CHECK(v.margins.size() == 3);

    var.system.servers[1].toll = 2;
    CHECK_THROWS_AS(compare_split(var.system, var.classes, ScheduleFamily{var, 3}, 3), Error);
}

TEST_CASE("sampled hunt instances are valid and reproducible") {
    for (std::uint64_t i = 0; i < 20; ++i) {
        const auto seed = hunt_instance_seed(9, i);
        const auto a = sample_instance(HuntSpace::variable_size(), seed);
        CHECK(validate(a).ok());
        CHECK(is_equal_toll(a.system));
        const auto b = sample_instance(HuntSpace::variable_size(), seed);
        CHECK(a.horizon == b.horizon);
        CHECK(a.system.servers.size() == b.system.servers.size());
        const auto f = sample_instance(HuntSpace::fixed_unit(), seed);
        for (const auto& c : f.classes) CHECK(is_unit_fixed(c.size_model));
    }
}

TEST_CASE("hunt rejects a zero budget") {
    CHECK_THROWS_AS(hunt_counterexample(HuntSpace::fixed_unit(), 0, 1), Error);
}

TEST_CASE("small fixed-size hunt finds nothing; variable findings replay exactly") {
    HuntSpace fixed = HuntSpace::fixed_unit();
    fixed.expected_arrivals = 1000;
    CHECK(hunt_counterexample(fixed, 20, 4).findings.empty());

    HuntSpace variable = HuntSpace::variable_size();
    variable.expected_arrivals = 1000;
    variable.replications = 4;
    const auto result = hunt_counterexample(variable, 20, 4);
    CHECK(result.instances == 20);
    for (const auto& f : result.findings) {
        CHECK(f.margin > significance_threshold(f.margin_std_error));
        const auto again = replay_finding(f, variable.replications);
        CHECK(again.margin_mean == f.margin);
        CHECK(again.margin_std_error == f.margin_std_error);
    }
}
