#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tollsplit {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Job-size models. Sizes are in work units; a server of rate mu finishes w units in w/mu seconds.
struct FixedSize {
    double size = 1.0;
};
struct ExponentialSize {
    double mean = 1.0;
};
// Size a with probability p, b otherwise.
struct TwoPointSize {
    double a = 1.0;
    double b = 1.0;
    double p = 1.0;
};
struct EmpiricalSize {
    std::vector<double> values;
};

using SizeModel = std::variant<FixedSize, ExponentialSize, TwoPointSize, EmpiricalSize>;

bool is_unit_fixed(const SizeModel& model);
std::string describe(const SizeModel& model);

struct ClassSpec {
    int id = 0;
    double arrival_rate = 1.0;  // customers per second
    double reward = 1.0;
    double waiting_cost = 1.0;  // currency per second of sojourn
    SizeModel size_model = FixedSize{};
};

struct ServerSpec {
    double rate = 1.0;  // work units per second
    double toll = 0.0;
};

struct SystemSpec {
    std::vector<ServerSpec> servers;
    double total_rate = 0.0;

    std::size_t size() const { return servers.size(); }
};

// A single server that owns the whole resource.
SystemSpec single_server(double rate, double toll);

// Interarrival law of one class's renewal process.
struct ExponentialGap {
    double rate = 1.0;
};
struct FixedGap {
    double gap = 1.0;
};
struct UniformGap {
    double lo = 0.0;
    double hi = 1.0;
};
struct EmpiricalGap {
    std::vector<double> values;
};

using InterarrivalDist = std::variant<ExponentialGap, FixedGap, UniformGap, EmpiricalGap>;

struct Scenario {
    std::vector<ClassSpec> classes;
    SystemSpec system;
    double horizon = 1.0;
    std::uint64_t seed = 0;
    // Optional per-class interarrival law, indexed like `classes`. Missing entries
    // default to Poisson at the class arrival rate.
    std::vector<InterarrivalDist> interarrivals;

    InterarrivalDist interarrival_for(std::size_t class_index) const;
    const ClassSpec& class_by_id(int id) const;
};

inline constexpr double kSplitTolerance = 1e-9;

struct Violation {
    std::string path;     // e.g. "servers[1].rate"
    std::string message;  // e.g. "split constraint"
};

struct ValidationResult {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    std::string summary() const;
};

ValidationResult validate(const ClassSpec& spec, const std::string& path = "class");
ValidationResult validate(const SystemSpec& system);
ValidationResult validate(const Scenario& scenario);

// Throws Error carrying the summary when validation fails.
void require_valid(const Scenario& scenario);

// Tolls are configuration values, so equality is exact.
bool is_equal_toll(const SystemSpec& system);

}  // namespace tollsplit
