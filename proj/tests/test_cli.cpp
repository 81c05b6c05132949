#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "tollsplit/cli.hpp"

namespace fs = std::filesystem;
using tollsplit::cli::run;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("tollsplit_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int n = 0;
        return n;
    }
};

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int call(std::vector<std::string> args, std::string* err_text = nullptr) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    if (err_text) *err_text = err.str();
    return code;
}

const char* kThreeServers = R"(horizon = 300
seed = 11
total_rate = 3
servers[0].rate = 1
servers[0].toll = 0.5
servers[1].rate = 1.25
servers[1].toll = 0.5
servers[2].rate = 0.75
servers[2].toll = 0.5
classes[0].rate = 2
classes[0].reward = 4
classes[0].cost = 1
classes[1].rate = 1
classes[1].reward = 6
classes[1].cost = 2
classes[1].interarrival = fixed
)";

}  // namespace

TEST_CASE("simulate writes the trace, schedule and report") {
    TempDir tmp;
    const auto cfg = write_file(tmp.path, "s.cfg", kThreeServers);
    const auto out = tmp.path / "run";
    CHECK(call({"simulate", "--scenario", cfg.string(), "--out", out.string()}) == 0);
    CHECK(fs::exists(out / "trace.csv"));
    CHECK(fs::exists(out / "schedule.csv"));
    const auto report = slurp(out / "report.jsonl");
    CHECK(report.find("\"admitted\"") != std::string::npos);
    CHECK(std::count(report.begin(), report.end(), '\n') == 1);

    // Replaying the saved schedule reproduces the trace.
    const auto again = tmp.path / "again";
    CHECK(call({"simulate", "--scenario", cfg.string(), "--out", again.string(), "--schedule",
                (out / "schedule.csv").string()}) == 0);
    CHECK(slurp(again / "trace.csv") == slurp(out / "trace.csv"));
}

TEST_CASE("identical config and seed give byte-identical outputs") {
    TempDir tmp;
    const auto cfg = write_file(tmp.path, "s.cfg", kThreeServers);
    CHECK(call({"simulate", "--scenario", cfg.string(), "--out", (tmp.path / "a").string(), "--seed", "3"}) == 0);
    CHECK(call({"simulate", "--scenario", cfg.string(), "--out", (tmp.path / "b").string(), "--seed", "3"}) == 0);
    CHECK(slurp(tmp.path / "a" / "trace.csv") == slurp(tmp.path / "b" / "trace.csv"));
    CHECK(slurp(tmp.path / "a" / "report.jsonl") == slurp(tmp.path / "b" / "report.jsonl"));
    CHECK(call({"simulate", "--scenario", cfg.string(), "--out", (tmp.path / "c").string(), "--seed", "4"}) == 0);
    CHECK(slurp(tmp.path / "a" / "trace.csv") != slurp(tmp.path / "c" / "trace.csv"));
}

TEST_CASE("verify-theorem1 on a fixed-size equal-toll scenario exits 0") {
    TempDir tmp;
    const auto cfg = write_file(tmp.path, "s.cfg", kThreeServers);
    CHECK(call({"verify-theorem1", "--scenario", cfg.string(), "--out", tmp.path.string(), "--reps", "3"}) == 0);
    const auto report = slurp(tmp.path / "report.jsonl");
    CHECK(std::count(report.begin(), report.end(), '\n') == 3);
    CHECK(slurp(tmp.path / "violations.csv") == "step,epoch,invariant,lhs,rhs\n");
}

TEST_CASE("verify-lemma1 checks server count and scope") {
    TempDir tmp;
    const auto three = write_file(tmp.path, "three.cfg", kThreeServers);
    std::string err;
    CHECK(call({"verify-lemma1", "--scenario", three.string(), "--out", tmp.path.string()}, &err) == 1);
    CHECK(err.find("exactly 2 servers") != std::string::npos);

    const auto two = write_file(tmp.path, "two.cfg",
                                "horizon = 200\nservers[0].rate = 1\nservers[1].rate = 2\n"
                                "classes[0].rate = 2\nclasses[0].reward = 3\nclasses[0].cost = 1\n");
    CHECK(call({"verify-lemma1", "--scenario", two.string(), "--out", tmp.path.string()}) == 0);

    const auto var = write_file(tmp.path, "var.cfg",
                                "horizon = 200\nservers[0].rate = 1\nservers[1].rate = 2\n"
                                "classes[0].rate = 2\nclasses[0].reward = 3\nclasses[0].cost = 1\nclasses[0].size = exp:1\n");
    CHECK(call({"verify-lemma1", "--scenario", var.string(), "--out", tmp.path.string()}, &err) == 1);
    CHECK(err.find("fixed-size") != std::string::npos);
}

TEST_CASE("usage and config errors exit 1") {
    TempDir tmp;
    CHECK(call({"simulate", "--scenario", (tmp.path / "missing.cfg").string()}) == 1);
    CHECK(call({}) == 1);
    CHECK(call({"frobnicate"}) == 1);
    const auto bad = write_file(tmp.path, "bad.cfg", "horizon = 1\nservers[0].rate = x\n");
    std::string err;
    CHECK(call({"simulate", "--scenario", bad.string(), "--out", tmp.path.string()}, &err) == 1);
    CHECK(err.find("bad.cfg:2:") != std::string::npos);
}

TEST_CASE("optimize writes the toll curve") {
    TempDir tmp;
    const auto cfg = write_file(tmp.path, "n.cfg",
                                "horizon = 500\nseed = 2\nservers[0].rate = 1\n"
                                "classes[0].rate = 2\nclasses[0].reward = 4\nclasses[0].cost = 1\n");
    CHECK(call({"optimize", "--scenario", cfg.string(), "--out", tmp.path.string(), "--grid", "0:4:0.5", "--reps", "2"}) == 0);
    const auto curve = slurp(tmp.path / "curve.csv");
    CHECK(curve.rfind("toll,revenue_rate,std_error\n", 0) == 0);
    CHECK(slurp(tmp.path / "report.jsonl").find("best_toll") != std::string::npos);
    CHECK(call({"optimize", "--scenario", cfg.string(), "--out", tmp.path.string(), "--grid", "0:4"}) == 1);
}

TEST_CASE("hunt over fixed sizes exits 0 with an empty findings file") {
    TempDir tmp;
    CHECK(call({"hunt", "--space", "fixed", "--budget", "3", "--reps", "2", "--seed", "5", "--out", tmp.path.string()}) == 0);
    const auto findings = slurp(tmp.path / "findings.csv");
    CHECK(std::count(findings.begin(), findings.end(), '\n') == 1);
    CHECK(call({"hunt", "--space", "odd", "--out", tmp.path.string()}) == 1);
}
