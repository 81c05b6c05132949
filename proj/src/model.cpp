#include "tollsplit/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

namespace tollsplit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

void check_size_model(const SizeModel& model, const std::string& path, std::vector<Violation>& out) {
    std::visit(overloaded{
                   [&](const FixedSize& m) {
                       if (!positive(m.size)) out.push_back({path, "fixed size must be > 0"});
                   },
                   [&](const ExponentialSize& m) {
                       if (!positive(m.mean)) out.push_back({path, "exponential mean must be > 0"});
                   },
                   [&](const TwoPointSize& m) {
                       if (!positive(m.a) || !positive(m.b))
                           out.push_back({path, "two-point sizes must be > 0"});
                       if (!(m.p >= 0.0 && m.p <= 1.0))
                           out.push_back({path, "two-point probability must lie in [0, 1]"});
                   },
                   [&](const EmpiricalSize& m) {
                       if (m.values.empty()) out.push_back({path, "empirical size list is empty"});
                       if (!std::all_of(m.values.begin(), m.values.end(), positive))
                           out.push_back({path, "empirical sizes must be > 0"});
                   },
               },
               model);
}

void check_interarrival(const InterarrivalDist& dist, const std::string& path,
                        std::vector<Violation>& out) {
    std::visit(overloaded{
                   [&](const ExponentialGap& d) {
                       if (!positive(d.rate)) out.push_back({path, "exponential rate must be > 0"});
                   },
                   [&](const FixedGap& d) {
                       if (!positive(d.gap)) out.push_back({path, "fixed gap must be > 0"});
                   },
                   [&](const UniformGap& d) {
                       if (!positive(d.lo) || !positive(d.hi))
                           out.push_back({path, "uniform bounds must be > 0"});
                       if (!(d.lo <= d.hi)) out.push_back({path, "uniform requires lo <= hi"});
                   },
                   [&](const EmpiricalGap& d) {
                       if (d.values.empty()) out.push_back({path, "empirical gap list is empty"});
                       if (!std::all_of(d.values.begin(), d.values.end(), positive))
                           out.push_back({path, "empirical gaps must be > 0"});
                   },
               },
               dist);
}

void append(std::vector<Violation>& into, const ValidationResult& from) {
    into.insert(into.end(), from.violations.begin(), from.violations.end());
}

}  // namespace

bool is_unit_fixed(const SizeModel& model) {
    const auto* fixed = std::get_if<FixedSize>(&model);
    return fixed != nullptr && fixed->size == 1.0;
}

std::string describe(const SizeModel& model) {
    return std::visit(overloaded{
                          [](const FixedSize& m) { return fmt::format("fixed:{:.17g}", m.size); },
                          [](const ExponentialSize& m) { return fmt::format("exp:{:.17g}", m.mean); },
                          [](const TwoPointSize& m) {
                              return fmt::format("twopoint:{:.17g},{:.17g},{:.17g}", m.a, m.b, m.p);
                          },
                          [](const EmpiricalSize& m) {
                              return fmt::format("empirical:{:.17g}", fmt::join(m.values, ","));
                          },
                      },
                      model);
}

SystemSpec single_server(double rate, double toll) {
    return SystemSpec{{ServerSpec{rate, toll}}, rate};
}

InterarrivalDist Scenario::interarrival_for(std::size_t class_index) const {
    if (class_index < interarrivals.size()) return interarrivals[class_index];
    return ExponentialGap{classes.at(class_index).arrival_rate};
}

const ClassSpec& Scenario::class_by_id(int id) const {
    for (const auto& c : classes)
        if (c.id == id) return c;
    throw Error(fmt::format("unknown class id {}", id));
}

std::string ValidationResult::summary() const {
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) out += "; ";
        out += v.path + ": " + v.message;
    }
    return out;
}

ValidationResult validate(const ClassSpec& spec, const std::string& path) {
    ValidationResult result;
    auto& out = result.violations;
    if (!positive(spec.arrival_rate)) out.push_back({path + ".rate", "arrival rate must be > 0"});
    if (!positive(spec.reward)) out.push_back({path + ".reward", "reward must be > 0"});
    if (!positive(spec.waiting_cost)) out.push_back({path + ".cost", "waiting cost must be > 0"});
    check_size_model(spec.size_model, path + ".size", out);
    return result;
}

ValidationResult validate(const SystemSpec& system) {
    ValidationResult result;
    auto& out = result.violations;
    if (system.servers.empty()) {
        out.push_back({"servers", "servers nonempty"});
        return result;
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < system.servers.size(); ++j) {
        const auto& s = system.servers[j];
        const auto path = fmt::format("servers[{}]", j);
        if (!positive(s.rate)) out.push_back({path + ".rate", "rate must be > 0"});
        if (!(std::isfinite(s.toll) && s.toll >= 0.0)) out.push_back({path + ".toll", "toll must be >= 0"});
        sum += s.rate;
    }
    if (!(std::abs(sum - system.total_rate) <= kSplitTolerance))
        out.push_back({"total_rate", fmt::format("split constraint: server rates sum to {:.17g}, total_rate is {:.17g}",
                                                 sum, system.total_rate)});
    return result;
}

ValidationResult validate(const Scenario& scenario) {
    ValidationResult result;
    auto& out = result.violations;
    if (scenario.classes.empty()) out.push_back({"classes", "classes nonempty"});
    std::set<int> seen;
    for (std::size_t i = 0; i < scenario.classes.size(); ++i) {
        const auto& c = scenario.classes[i];
        const auto path = fmt::format("classes[{}]", i);
        append(out, validate(c, path));
        if (!seen.insert(c.id).second) out.push_back({path + ".id", fmt::format("duplicate class id {}", c.id)});
    }
    for (std::size_t i = 0; i < scenario.interarrivals.size(); ++i)
        check_interarrival(scenario.interarrivals[i], fmt::format("classes[{}].interarrival", i), out);
    if (scenario.interarrivals.size() > scenario.classes.size())
        out.push_back({"classes", "more interarrival laws than classes"});
    append(out, validate(scenario.system));
    if (!(std::isfinite(scenario.horizon) && scenario.horizon > 0.0))
        out.push_back({"horizon", "horizon must be > 0"});
    return result;
}

void require_valid(const Scenario& scenario) {
    auto result = validate(scenario);
    if (!result.ok()) throw Error("invalid scenario: " + result.summary());
}

bool is_equal_toll(const SystemSpec& system) {
    return std::adjacent_find(system.servers.begin(), system.servers.end(),
                              [](const ServerSpec& a, const ServerSpec& b) { return a.toll != b.toll; }) ==
           system.servers.end();
}

}  // namespace tollsplit
