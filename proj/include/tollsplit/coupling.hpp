#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tollsplit/engine.hpp"
#include "tollsplit/model.hpp"

namespace tollsplit {

inline constexpr double kInvariantTolerance = 1e-9;

// Invariant names as they appear in reports.
inline constexpr const char* kSojournInvariant = "F<=min(f1,f2)";
inline constexpr const char* kWorkloadInvariant = "W<=W1+W2";
inline constexpr const char* kAdmissionInvariant = "merged admits L'";
inline constexpr const char* kSplitReplayInvariant = "split admits L'";

struct CouplingViolation {
    std::size_t epoch = 0;  // index into L'
    std::string invariant;
    double lhs = 0.0;
    double rhs = 0.0;
    std::size_t step = 0;  // induction step for the theorem check; 0 for a direct lemma check

    friend bool operator==(const CouplingViolation&, const CouplingViolation&) = default;
};

struct CouplingReport {
    std::size_t epochs_checked = 0;
    std::vector<CouplingViolation> violations;
    std::size_t admitted_split = 0;
    std::size_t admitted_merged_on_L = 0;
    std::size_t admitted_merged_on_Lprime = 0;
    bool dominance_holds = true;

    std::size_t schedule_length = 0;
    std::size_t simulations = 0;
    double max_work_imbalance = 0.0;  // |admitted - completed - residual| over every run

    // Theorem check only: one lemma report per prefix merge, p = 1..m-1.
    std::vector<CouplingReport> steps;
};

// Single server carrying the combined rate at the common toll.
ServerSpec merge(std::span<const ServerSpec> servers);

// L': the arrivals the traced system admitted, in order, sizes unchanged.
Schedule admitted_subschedule(const Trace& trace, const Schedule& schedule);

struct VerifyOptions {
    // Outside fixed unit sizes the checks still run, and violations are findings.
    bool require_unit_sizes = true;
};

CouplingReport verify_lemma1(const SystemSpec& split, const ServerSpec& merged, const Schedule& schedule,
                             std::span<const ClassSpec> classes, const VerifyOptions& options = {});

CouplingReport verify_theorem1(const SystemSpec& split, const Schedule& schedule, std::span<const ClassSpec> classes,
                               const VerifyOptions& options = {});

}  // namespace tollsplit
