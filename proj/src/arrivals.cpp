#include "tollsplit/arrivals.hpp"

#include <cmath>
#include <unordered_map>

#include <fmt/format.h>

namespace tollsplit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::uint64_t stream_id(int class_id) { return static_cast<std::uint64_t>(static_cast<std::int64_t>(class_id)); }

}  // namespace

double draw_gap(const InterarrivalDist& dist, Rng& rng) {
    return std::visit(overloaded{
                          [&](const ExponentialGap& d) { return rng.exponential(d.rate); },
                          [&](const FixedGap& d) { return d.gap; },
                          [&](const UniformGap& d) { return rng.uniform(d.lo, d.hi); },
                          [&](const EmpiricalGap& d) { return d.values[rng.below(d.values.size())]; },
                      },
                      dist);
}

double draw_size(const SizeModel& model, Rng& rng) {
    return std::visit(overloaded{
                          [&](const FixedSize& m) { return m.size; },
                          [&](const ExponentialSize& m) {
                              // An exact zero would violate size > 0.
                              double x = 0.0;
                              while (!(x > 0.0)) x = rng.exponential(1.0 / m.mean);
                              return x;
                          },
                          [&](const TwoPointSize& m) { return rng.uniform() < m.p ? m.a : m.b; },
                          [&](const EmpiricalSize& m) { return m.values[rng.below(m.values.size())]; },
                      },
                      model);
}

Schedule gen_deterministic(std::span<const double> times, int class_id) {
    Schedule out;
    out.arrivals.reserve(times.size());
    double prev = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] >= 0.0)) throw Error(fmt::format("arrival time {} is negative", k));
        if (times[k] < prev) throw Error(fmt::format("arrival times decrease at index {}", k));
        prev = times[k];
        out.arrivals.push_back(Arrival{times[k], class_id, 0.0});
    }
    return out;
}

Schedule gen_renewal(const InterarrivalDist& dist, double horizon, int class_id, std::uint64_t seed) {
    if (!(horizon > 0.0)) throw Error("renewal horizon must be > 0");
    Rng rng(seed);
    Schedule out;
    double t = 0.0;
    for (;;) {
        t += draw_gap(dist, rng);
        if (t > horizon) break;
        out.arrivals.push_back(Arrival{t, class_id, 0.0});
    }
    return out;
}

Schedule superpose(std::span<const Schedule> schedules) {
    Schedule out;
    std::size_t total = 0;
    for (const auto& s : schedules) total += s.size();
    out.arrivals.reserve(total);
    std::vector<std::size_t> cursor(schedules.size(), 0);
    for (std::size_t n = 0; n < total; ++n) {
        std::size_t pick = schedules.size();
        for (std::size_t i = 0; i < schedules.size(); ++i) {
            if (cursor[i] == schedules[i].size()) continue;
            if (pick == schedules.size() ||
                schedules[i].arrivals[cursor[i]].time < schedules[pick].arrivals[cursor[pick]].time)
                pick = i;
        }
        out.arrivals.push_back(schedules[pick].arrivals[cursor[pick]++]);
    }
    return out;
}

Schedule realize_sizes(const Schedule& schedule, std::span<const ClassSpec> classes, std::uint64_t seed) {
    std::unordered_map<int, std::pair<const ClassSpec*, Rng>> streams;
    for (const auto& c : classes)
        streams.try_emplace(c.id, &c, Rng(derive_seed(seed, kSizeDomain, stream_id(c.id))));

    Schedule out = schedule;
    for (std::size_t k = 0; k < out.size(); ++k) {
        auto& a = out.arrivals[k];
        auto found = streams.find(a.class_id);
        if (found == streams.end())
            throw Error(fmt::format("arrival {} names unknown class {}", k, a.class_id));
        a.size = draw_size(found->second.first->size_model, found->second.second);
    }
    return out;
}

Schedule generate_schedule(const Scenario& scenario, std::uint64_t seed) {
    std::vector<Schedule> streams;
    streams.reserve(scenario.classes.size());
    for (std::size_t i = 0; i < scenario.classes.size(); ++i) {
        const int id = scenario.classes[i].id;
        streams.push_back(gen_renewal(scenario.interarrival_for(i), scenario.horizon, id,
                                      derive_seed(seed, kArrivalDomain, stream_id(id))));
    }
    return realize_sizes(superpose(streams), scenario.classes, seed);
}

}  // namespace tollsplit
