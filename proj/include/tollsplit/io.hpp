#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include <json.hpp>

#include "tollsplit/coupling.hpp"
#include "tollsplit/engine.hpp"
#include "tollsplit/optimize.hpp"

namespace tollsplit {

// 17 significant digits; reading the text back yields the identical double.
std::string format_number(double v);

// index,time,class_id,size,f_1..f_m,u_1..u_m,decision
void write_trace_csv(std::ostream& out, const Trace& trace, std::size_t servers);

// time,class_id,size
void write_schedule_csv(std::ostream& out, const Schedule& schedule);
Schedule read_schedule_csv(std::istream& in);

nlohmann::json to_json(const SimReport& report);
nlohmann::json to_json(const CouplingReport& report);
nlohmann::json to_json(const TollSearchResult& result);
nlohmann::json to_json(const SplitComparison& comparison);

void write_violations_csv(std::ostream& out, const CouplingReport& report);
void write_toll_curve_csv(std::ostream& out, const TollSearchResult& result);
void write_findings_csv(std::ostream& out, std::span<const HuntFinding> findings);

}  // namespace tollsplit
