#include "tollsplit/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "tollsplit/config.hpp"

namespace tollsplit {

namespace {

std::string decision_label(const Decision& d) { return d.joined() ? fmt::format("join:{}", *d.server + 1) : "balk"; }

double field_double(std::string_view s, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error(fmt::format("schedule line {}: bad number '{}'", line, s));
    return v;
}

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

void write_trace_csv(std::ostream& out, const Trace& trace, std::size_t servers) {
    out << "index,time,class_id,size";
    for (std::size_t j = 1; j <= servers; ++j) out << ",f_" << j;
    for (std::size_t j = 1; j <= servers; ++j) out << ",u_" << j;
    out << ",decision\n";
    for (const auto& e : trace) {
        out << e.index << ',' << format_number(e.time) << ',' << e.class_id << ',' << format_number(e.size);
        for (double f : e.sojourns) out << ',' << format_number(f);
        for (double u : e.utilities) out << ',' << format_number(u);
        out << ',' << decision_label(e.decision) << '\n';
    }
}

void write_schedule_csv(std::ostream& out, const Schedule& schedule) {
    out << "time,class_id,size\n";
    for (const auto& a : schedule.arrivals)
        out << format_number(a.time) << ',' << a.class_id << ',' << format_number(a.size) << '\n';
}

Schedule read_schedule_csv(std::istream& in) {
    Schedule schedule;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || (line_no == 1 && line.rfind("time", 0) == 0)) continue;
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos) throw Error(fmt::format("schedule line {}: expected 3 columns", line_no));
        const std::string_view view = line;
        Arrival a;
        a.time = field_double(view.substr(0, c1), line_no);
        int id = 0;
        const auto id_text = view.substr(c1 + 1, c2 - c1 - 1);
        auto [ptr, ec] = std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
        if (ec != std::errc{} || ptr != id_text.data() + id_text.size())
            throw Error(fmt::format("schedule line {}: bad class id '{}'", line_no, id_text));
        a.class_id = id;
        a.size = field_double(view.substr(c2 + 1), line_no);
        schedule.arrivals.push_back(a);
    }
    if (!schedule.is_sorted()) throw Error("schedule file is not sorted by time");
    return schedule;
}

nlohmann::json to_json(const SimReport& r) {
    return {
        {"admitted", r.admitted},
        {"balked", r.balked},
        {"admitted_per_server", r.admitted_per_server},
        {"admitted_work", r.admitted_work},
        {"window_start", r.window_start},
        {"horizon", r.horizon},
        {"throughput_rate", r.throughput_rate},
        {"revenue", r.revenue},
        {"revenue_rate", r.revenue_rate},
        {"completed_work", r.completed_work},
        {"residual_work", r.residual_work},
    };
}

nlohmann::json to_json(const CouplingReport& r) {
    nlohmann::json steps = nlohmann::json::array();
    for (std::size_t p = 0; p < r.steps.size(); ++p) {
        auto s = to_json(r.steps[p]);
        s["step"] = p + 1;
        steps.push_back(std::move(s));
    }
    return {
        {"epochs_checked", r.epochs_checked},
        {"violations", r.violations.size()},
        {"admitted_split", r.admitted_split},
        {"admitted_merged_on_L", r.admitted_merged_on_L},
        {"admitted_merged_on_Lprime", r.admitted_merged_on_Lprime},
        {"dominance_holds", r.dominance_holds},
        {"schedule_length", r.schedule_length},
        {"steps", steps},
    };
}

nlohmann::json to_json(const TollSearchResult& r) {
    return {
        {"best_toll", r.best_toll},
        {"best_revenue_rate", r.best_revenue_rate},
        {"grid_points", r.grid_points},
        {"grid_step", r.grid_step},
        {"curve_points", r.curve.size()},
    };
}

nlohmann::json to_json(const SplitComparison& c) {
    return {
        {"split_revenue_rate", c.split_mean},
        {"merged_revenue_rate", c.merged_mean},
        {"margin", c.margin_mean},
        {"margin_std_error", c.margin_std_error},
        {"margins", c.margins},
        {"verdict", to_string(c.verdict)},
    };
}

void write_violations_csv(std::ostream& out, const CouplingReport& report) {
    out << "step,epoch,invariant,lhs,rhs\n";
    for (const auto& v : report.violations)
        out << v.step << ',' << v.epoch << ',' << csv_quote(v.invariant) << ',' << format_number(v.lhs) << ','
            << format_number(v.rhs) << '\n';
}

void write_toll_curve_csv(std::ostream& out, const TollSearchResult& result) {
    out << "toll,revenue_rate,std_error\n";
    for (const auto& p : result.curve)
        out << format_number(p.toll) << ',' << format_number(p.revenue_rate) << ',' << format_number(p.std_error)
            << '\n';
}

void write_findings_csv(std::ostream& out, std::span<const HuntFinding> findings) {
    out << "instance,seed,servers,classes,split_revenue_rate,merged_revenue_rate,margin,margin_std_error,scenario\n";
    for (const auto& f : findings) {
        std::string scenario = format_scenario(f.scenario);
        for (auto& ch : scenario)
            if (ch == '\n') ch = ';';
        out << f.instance << ',' << f.seed << ',' << f.scenario.system.servers.size() << ','
            << f.scenario.classes.size() << ',' << format_number(f.split_revenue_rate) << ','
            << format_number(f.merged_revenue_rate) << ',' << format_number(f.margin) << ','
            << format_number(f.margin_std_error) << ',' << csv_quote(scenario) << '\n';
    }
}

}  // namespace tollsplit
