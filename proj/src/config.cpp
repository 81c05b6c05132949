#include "tollsplit/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <fmt/format.h>

namespace tollsplit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view text) {
    text = trim(text);
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty())
        throw Error(fmt::format("expected a number, got '{}'", text));
    return value;
}

template <class Int>
Int parse_int(std::string_view text) {
    text = trim(text);
    Int value{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty())
        throw Error(fmt::format("expected an integer, got '{}'", text));
    return value;
}

std::vector<double> parse_list(std::string_view text) {
    std::vector<double> out;
    while (true) {
        const auto comma = text.find(',');
        out.push_back(parse_double(text.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

// "kind" or "kind:args".
std::pair<std::string_view, std::optional<std::string_view>> split_kind(std::string_view text) {
    text = trim(text);
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) return {text, std::nullopt};
    return {trim(text.substr(0, colon)), text.substr(colon + 1)};
}

std::vector<double> expect_args(std::optional<std::string_view> args, std::size_t count, std::string_view kind) {
    if (!args) throw Error(fmt::format("'{}' needs {} argument(s)", kind, count));
    auto values = parse_list(*args);
    if (count != 0 && values.size() != count)
        throw Error(fmt::format("'{}' needs {} argument(s), got {}", kind, count, values.size()));
    return values;
}

struct ClassEntry {
    std::optional<int> id;
    std::optional<double> rate, reward, cost;
    std::optional<SizeModel> size;
    std::optional<std::string> interarrival;
    std::size_t line = 0;
};

struct ServerEntry {
    std::optional<double> rate;
    std::optional<double> toll;
    std::size_t line = 0;
};

// Parses "name[index].field".
struct IndexedKey {
    std::string name;
    std::size_t index = 0;
    std::string field;
};

std::optional<IndexedKey> parse_indexed(std::string_view key) {
    const auto open = key.find('[');
    const auto close = key.find(']');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) return std::nullopt;
    if (close + 1 >= key.size() || key[close + 1] != '.') return std::nullopt;
    IndexedKey out;
    out.name = std::string(key.substr(0, open));
    out.index = parse_int<std::size_t>(key.substr(open + 1, close - open - 1));
    out.field = std::string(key.substr(close + 2));
    return out;
}

template <class Entry>
Entry& slot(std::map<std::size_t, Entry>& entries, std::size_t index, std::size_t line) {
    auto& e = entries[index];
    if (e.line == 0) e.line = line;
    return e;
}

template <class T>
void set_once(std::optional<T>& field, T value, std::string_view key) {
    if (field) throw Error(fmt::format("duplicate key '{}'", key));
    field = std::move(value);
}

}  // namespace

SizeModel parse_size_model(std::string_view text) {
    const auto [kind, args] = split_kind(text);
    if (kind == "fixed") return FixedSize{expect_args(args, 1, kind)[0]};
    if (kind == "exp") return ExponentialSize{expect_args(args, 1, kind)[0]};
    if (kind == "twopoint") {
        const auto v = expect_args(args, 3, kind);
        return TwoPointSize{v[0], v[1], v[2]};
    }
    if (kind == "empirical") return EmpiricalSize{expect_args(args, 0, kind)};
    throw Error(fmt::format("unknown size model '{}'", kind));
}

InterarrivalDist parse_interarrival(std::string_view text, double class_rate) {
    const auto [kind, args] = split_kind(text);
    if (kind == "exp") return ExponentialGap{args ? expect_args(args, 1, kind)[0] : class_rate};
    if (kind == "fixed") return FixedGap{args ? expect_args(args, 1, kind)[0] : 1.0 / class_rate};
    if (kind == "uniform") {
        const auto v = expect_args(args, 2, kind);
        return UniformGap{v[0], v[1]};
    }
    if (kind == "empirical") return EmpiricalGap{expect_args(args, 0, kind)};
    throw Error(fmt::format("unknown interarrival law '{}'", kind));
}

Scenario parse_scenario(std::string_view text, const std::string& source) {
    std::map<std::size_t, ClassEntry> classes;
    std::map<std::size_t, ServerEntry> servers;
    std::optional<double> horizon, total_rate;
    std::optional<std::uint64_t> seed;

    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        try {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) throw Error("expected 'key = value'");
            const auto key = trim(line.substr(0, eq));
            const auto value = trim(line.substr(eq + 1));
            if (value.empty()) throw Error(fmt::format("missing value for '{}'", key));

            if (key == "horizon") set_once(horizon, parse_double(value), key);
            else if (key == "total_rate") set_once(total_rate, parse_double(value), key);
            else if (key == "seed") set_once(seed, parse_int<std::uint64_t>(value), key);
            else if (auto ik = parse_indexed(key); ik && ik->name == "classes") {
                auto& c = slot(classes, ik->index, line_no);
                if (ik->field == "rate") set_once(c.rate, parse_double(value), key);
                else if (ik->field == "reward") set_once(c.reward, parse_double(value), key);
                else if (ik->field == "cost") set_once(c.cost, parse_double(value), key);
                else if (ik->field == "size") set_once(c.size, parse_size_model(value), key);
                else if (ik->field == "interarrival") set_once(c.interarrival, std::string(value), key);
                else if (ik->field == "id") set_once(c.id, parse_int<int>(value), key);
                else throw Error(fmt::format("unknown key '{}'", key));
            } else if (ik && ik->name == "servers") {
                auto& s = slot(servers, ik->index, line_no);
                if (ik->field == "rate") set_once(s.rate, parse_double(value), key);
                else if (ik->field == "toll") set_once(s.toll, parse_double(value), key);
                else throw Error(fmt::format("unknown key '{}'", key));
            } else {
                throw Error(fmt::format("unknown key '{}'", key));
            }
        } catch (const Error& e) {
            throw Error(fmt::format("{}:{}: {}", source, line_no, e.what()));
        }
    }

    auto fail = [&](std::size_t line, const std::string& msg) {
        return Error(line == 0 ? fmt::format("{}: {}", source, msg) : fmt::format("{}:{}: {}", source, line, msg));
    };

    Scenario sc;
    if (!horizon) throw fail(0, "missing key 'horizon'");
    sc.horizon = *horizon;
    sc.seed = seed.value_or(0);

    std::size_t expected = 0;
    for (auto& [index, e] : classes) {
        if (index != expected) throw fail(e.line, fmt::format("classes[{}] is missing", expected));
        ++expected;
        const auto path = fmt::format("classes[{}]", index);
        if (!e.rate) throw fail(e.line, fmt::format("missing key '{}.rate'", path));
        if (!e.reward) throw fail(e.line, fmt::format("missing key '{}.reward'", path));
        if (!e.cost) throw fail(e.line, fmt::format("missing key '{}.cost'", path));
        ClassSpec c;
        c.id = e.id.value_or(static_cast<int>(index));
        c.arrival_rate = *e.rate;
        c.reward = *e.reward;
        c.waiting_cost = *e.cost;
        c.size_model = e.size.value_or(FixedSize{1.0});
        sc.classes.push_back(c);
        try {
            sc.interarrivals.push_back(e.interarrival ? parse_interarrival(*e.interarrival, c.arrival_rate)
                                                      : InterarrivalDist{ExponentialGap{c.arrival_rate}});
        } catch (const Error& err) {
            throw fail(e.line, fmt::format("{}.interarrival: {}", path, err.what()));
        }
    }

    expected = 0;
    double rate_sum = 0.0;
    for (auto& [index, e] : servers) {
        if (index != expected) throw fail(e.line, fmt::format("servers[{}] is missing", expected));
        ++expected;
        if (!e.rate) throw fail(e.line, fmt::format("missing key 'servers[{}].rate'", index));
        sc.system.servers.push_back(ServerSpec{*e.rate, e.toll.value_or(0.0)});
        rate_sum += *e.rate;
    }
    sc.system.total_rate = total_rate.value_or(rate_sum);

    const auto result = validate(sc);
    if (!result.ok()) throw fail(0, "invalid scenario: " + result.summary());
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(fmt::format("cannot read scenario file '{}'", path.string()));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str(), path.string());
}

std::string format_scenario(const Scenario& sc) {
    std::string out;
    auto line = [&](std::string_view key, const std::string& value) { out += fmt::format("{} = {}\n", key, value); };
    auto num = [](double v) { return fmt::format("{:.17g}", v); };

    line("horizon", num(sc.horizon));
    line("seed", std::to_string(sc.seed));
    line("total_rate", num(sc.system.total_rate));
    for (std::size_t j = 0; j < sc.system.servers.size(); ++j) {
        line(fmt::format("servers[{}].rate", j), num(sc.system.servers[j].rate));
        line(fmt::format("servers[{}].toll", j), num(sc.system.servers[j].toll));
    }
    for (std::size_t i = 0; i < sc.classes.size(); ++i) {
        const auto& c = sc.classes[i];
        const auto p = fmt::format("classes[{}]", i);
        line(p + ".id", std::to_string(c.id));
        line(p + ".rate", num(c.arrival_rate));
        line(p + ".reward", num(c.reward));
        line(p + ".cost", num(c.waiting_cost));
        line(p + ".size", describe(c.size_model));
        const auto dist = sc.interarrival_for(i);
        line(p + ".interarrival",
             std::visit(overloaded{
                            [&](const ExponentialGap& d) { return fmt::format("exp:{}", num(d.rate)); },
                            [&](const FixedGap& d) { return fmt::format("fixed:{}", num(d.gap)); },
                            [&](const UniformGap& d) { return fmt::format("uniform:{},{}", num(d.lo), num(d.hi)); },
                            [&](const EmpiricalGap& d) { return fmt::format("empirical:{:.17g}", fmt::join(d.values, ",")); },
                        },
                        dist));
    }
    return out;
}

}  // namespace tollsplit
