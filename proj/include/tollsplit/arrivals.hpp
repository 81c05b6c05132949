#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tollsplit/engine.hpp"
#include "tollsplit/model.hpp"
#include "tollsplit/rng.hpp"

namespace tollsplit {

double draw_gap(const InterarrivalDist& dist, Rng& rng);
double draw_size(const SizeModel& model, Rng& rng);

// Epochs as given; sizes are left at 0 until realize_sizes.
Schedule gen_deterministic(std::span<const double> times, int class_id);

// Cumulative sums of i.i.d. gaps, keeping every epoch <= horizon.
Schedule gen_renewal(const InterarrivalDist& dist, double horizon, int class_id, std::uint64_t seed);

// Stable merge; ties go to the lower stream index.
Schedule superpose(std::span<const Schedule> schedules);

// One draw per arrival from its class's size model, one RNG stream per class id.
Schedule realize_sizes(const Schedule& schedule, std::span<const ClassSpec> classes, std::uint64_t seed);

// Full sample path for a scenario: per-class renewal streams, merged, sizes realized.
Schedule generate_schedule(const Scenario& scenario, std::uint64_t seed);

}  // namespace tollsplit
