#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "tollsplit/arrivals.hpp"

using namespace tollsplit;

namespace {

std::vector<double> times_of(const Schedule& s) {
    std::vector<double> t;
    for (const auto& a : s.arrivals) t.push_back(a.time);
    return t;
}

}  // namespace

TEST_CASE("gen_deterministic keeps the given epochs") {
    const std::vector<double> t{0, 1, 2};
    const auto s = gen_deterministic(t, 3);
    CHECK(times_of(s) == t);
    CHECK(s.arrivals[1].class_id == 3);
    CHECK(s.arrivals[1].size == 0.0);
    CHECK(gen_deterministic(std::vector<double>{}, 0).empty());
    CHECK(gen_deterministic(std::vector<double>{0, 0}, 0).size() == 2);
    CHECK_THROWS_AS(gen_deterministic(std::vector<double>{1, 0.5}, 0), Error);
}

TEST_CASE("gen_renewal with a fixed gap") {
    CHECK(times_of(gen_renewal(FixedGap{1.0}, 3.5, 0, 1)) == std::vector<double>{1, 2, 3});
    CHECK(gen_renewal(FixedGap{1.0}, 0.0001, 0, 1).empty());
    CHECK(gen_renewal(ExponentialGap{1e-6}, 0.0001, 0, 1).empty());
}

TEST_CASE("Poisson counts sit within 5 sigma of lambda*H") {
    // Count ~ Poisson(1000): sd = sqrt(1000).
    const double mean = 1000.0, sd = std::sqrt(1000.0);
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        const auto s = gen_renewal(ExponentialGap{2.0}, 500.0, 0, seed);
        CHECK(std::abs(static_cast<double>(s.size()) - mean) < 5.0 * sd);
    }
}

TEST_CASE("uniform and empirical gaps stay in range") {
    const auto u = gen_renewal(UniformGap{0.5, 1.5}, 100.0, 0, 7);
    double prev = 0.0;
    for (double t : times_of(u)) {
        CHECK(t - prev >= 0.5);
        CHECK(t - prev <= 1.5);
        prev = t;
    }
    const auto e = gen_renewal(EmpiricalGap{{0.25, 2.0}}, 100.0, 0, 7);
    prev = 0.0;
    for (double t : times_of(e)) {
        const double gap = t - prev;
        CHECK((std::abs(gap - 0.25) < 1e-12 || std::abs(gap - 2.0) < 1e-12));
        prev = t;
    }
}

TEST_CASE("superpose merges with stable ties") {
    std::vector<Schedule> in{gen_deterministic(std::vector<double>{0, 2}, 0), gen_deterministic(std::vector<double>{1, 3}, 1)};
    CHECK(times_of(superpose(in)) == std::vector<double>{0, 1, 2, 3});

    std::vector<Schedule> tie{gen_deterministic(std::vector<double>{1}, 0), gen_deterministic(std::vector<double>{1}, 1)};
    const auto t = superpose(tie);
    CHECK(t.arrivals[0].class_id == 0);
    CHECK(t.arrivals[1].class_id == 1);

    std::vector<Schedule> one_empty{Schedule{}, gen_deterministic(std::vector<double>{5}, 1)};
    CHECK(times_of(superpose(one_empty)) == std::vector<double>{5});
}

TEST_CASE("superpose preserves the multiset of epochs") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        std::vector<Schedule> streams;
        std::vector<double> all;
        for (int c = 0; c < 3; ++c) {
            streams.push_back(gen_renewal(ExponentialGap{1.0 + c}, 50.0, c, derive_seed(seed, c)));
            for (double t : times_of(streams.back())) all.push_back(t);
        }
        const auto merged = superpose(streams);
        CHECK(merged.is_sorted());
        auto got = times_of(merged);
        std::sort(all.begin(), all.end());
        CHECK(got == all);
    }
}

TEST_CASE("realize_sizes draws from each class model") {
    const std::vector<ClassSpec> classes{ClassSpec{0, 1, 1, 1, FixedSize{1.0}}, ClassSpec{1, 1, 1, 1, TwoPointSize{1.0, 2.0, 1.0}}};
    std::vector<Schedule> streams{gen_renewal(FixedGap{1.0}, 50, 0, 1), gen_renewal(FixedGap{0.7}, 50, 1, 1)};
    const auto s = realize_sizes(superpose(streams), classes, 5);
    for (const auto& a : s.arrivals) CHECK(a.size == 1.0);

    Schedule unknown = gen_deterministic(std::vector<double>{0}, 42);
    CHECK_THROWS_AS(realize_sizes(unknown, classes, 5), Error);
}

TEST_CASE("exponential sizes have the configured mean") {
    // 1e4 draws of mean 2: standard error 2/100.
    const std::vector<ClassSpec> classes{ClassSpec{0, 1, 1, 1, ExponentialSize{2.0}}};
    std::vector<double> times(10000, 0.0);
    const auto s = realize_sizes(gen_deterministic(times, 0), classes, 11);
    double sum = 0.0;
    for (const auto& a : s.arrivals) {
        CHECK(a.size > 0.0);
        sum += a.size;
    }
    CHECK(std::abs(sum / 1e4 - 2.0) < 5.0 * 0.02);
}

TEST_CASE("generation is seed-deterministic and per-class streams are isolated") {
    Scenario sc;
    sc.classes = {ClassSpec{0, 1.5, 1, 1, ExponentialSize{1.0}}, ClassSpec{1, 0.5, 1, 1, FixedSize{1.0}}};
    sc.system = single_server(1, 0);
    sc.horizon = 200;
    const auto a = generate_schedule(sc, 17);
    const auto b = generate_schedule(sc, 17);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a.arrivals[k].time == b.arrivals[k].time);
        CHECK(a.arrivals[k].size == b.arrivals[k].size);
    }
    CHECK(a.is_sorted());

    Scenario more = sc;
    more.classes.push_back(ClassSpec{2, 3.0, 1, 1, ExponentialSize{4.0}});
    const auto c = generate_schedule(more, 17);
    std::vector<Arrival> only0_a, only0_c;
    for (const auto& x : a.arrivals) if (x.class_id == 0) only0_a.push_back(x);
    for (const auto& x : c.arrivals) if (x.class_id == 0) only0_c.push_back(x);
    REQUIRE(only0_a.size() == only0_c.size());
    for (std::size_t k = 0; k < only0_a.size(); ++k) {
        CHECK(only0_a[k].time == only0_c[k].time);
        CHECK(only0_a[k].size == only0_c[k].size);
    }
}
