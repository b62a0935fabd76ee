#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "support.hpp"

#include "srcloc/bench.hpp"
#include "srcloc/cli.hpp"

using namespace srcloc;
using namespace srcloc::testing;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "srcloc");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("stats on the builtin graph") {
    auto r = cli({"stats", "--builtin", "karate"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("34 nodes, 78 edges, avg degree 4.588\n", 0) == 0);
    CHECK(r.out.find("MISMATCH") == std::string::npos);
}

TEST_CASE("stats on an edge-list file with a registry mismatch") {
    auto dir = scratch_dir("cli_stats");
    write_file(dir / "p3.txt", "0 1\n1 2\n1 0\n");
    auto r = cli({"stats", "--graph", (dir / "p3.txt").string(), "--dataset", "dolphins"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("3 nodes, 2 edges, avg degree 1.333\n", 0) == 0);
    CHECK(r.out.find("dropped 1 duplicate") != std::string::npos);
    CHECK(r.out.find("MISMATCH") != std::string::npos);
}

TEST_CASE("registry listing") {
    auto r = cli({"stats", "--registry"});
    CHECK(r.code == 0);
    CHECK(count_lines(r.out) == 9);
    for (const char* name : {"Karate", "Dolphins", "Jazz", "Power Grid", "Memetracker", "Digg"}) {
        CHECK(r.out.find(name) != std::string::npos);
    }
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    std::size_t yes = 0;
    while (std::getline(in, line)) {
        bool has = line.size() >= 3 && line.compare(line.size() - 3, 3, "yes") == 0;
        yes += has;
        if (has) CHECK((line.find("Memetracker") == 0 || line.find("Digg") == 0));
    }
    CHECK(yes == 2);
}

TEST_CASE("simulate is reproducible") {
    auto dir = scratch_dir("cli_simulate");
    auto a = (dir / "a.jsonl").string(), b = (dir / "b.jsonl").string();
    auto ra = cli({"simulate", "--builtin", "karate", "--model", "ic", "--p", "0.1", "--pairs", "50", "--seed", "7",
                   "-o", a});
    auto rb = cli({"simulate", "--builtin", "karate", "--model", "ic", "--p", "0.1", "--pairs", "50", "--seed", "7",
                   "--workers", "2", "-o", b});
    REQUIRE(ra.code == 0);
    REQUIRE(rb.code == 0);
    CHECK(count_lines(read_file(a)) == 50);
    CHECK(read_file(a) == read_file(b));

    auto lt = cli({"simulate", "--builtin", "karate", "--model", "lt", "--pairs", "3"});
    CHECK(lt.code == 0);
    CHECK(count_lines(lt.out) == 3);
}

TEST_CASE("run on a pair file writes a report") {
    auto dir = scratch_dir("cli_run");
    auto pairs = (dir / "pairs.jsonl").string(), report = (dir / "report.json").string();
    REQUIRE(cli({"simulate", "--builtin", "karate", "--pairs", "50", "--seed", "7", "-o", pairs}).code == 0);
    auto r = cli({"run", "--builtin", "karate", "--pairs-file", pairs, "--method", "lpsi", "--seed", "7", "-o",
                  report});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("10 test pairs:", 0) == 0);
    auto j = nlohmann::json::parse(read_file(report));
    CHECK(j["num_test"] == 10);
    CHECK(j["pairs"].size() == 10);
    CHECK(j["config"]["method"] == "lpsi");

    auto csv = cli({"run", "--builtin", "karate", "--pairs-file", pairs, "--method", "ojc", "--seed", "7",
                    "--format", "csv"});
    CHECK(csv.code == 0);
    CHECK(count_lines(csv.out) == 12);
}

TEST_CASE("exit codes") {
    CHECK(cli({"--help"}).code == 0);
    CHECK(cli({"run", "--help"}).code == 0);
    CHECK(cli({}).code == 1);
    CHECK(cli({"frobnicate"}).code == 1);
    CHECK(cli({"stats", "--builtin", "karate", "--bogus"}).code == 1);
    CHECK(cli({"stats"}).code == 1);
    CHECK(cli({"run", "--builtin", "karate", "--pairs", "many"}).code == 1);

    auto missing = cli({"stats", "--graph", "/nonexistent/file.txt"});
    CHECK(missing.code == 2);
    CHECK(missing.err.rfind("error: ", 0) == 0);
    CHECK(cli({"run", "--builtin", "karate", "--method", "nope"}).code == 2);
    CHECK(cli({"run", "--builtin", "karate", "--split", "1.5"}).code == 2);
    CHECK(cli({"run", "--builtin", "karate", "--pairs-file", "/nonexistent/p.jsonl"}).code == 2);
}

TEST_CASE("flags override config which overrides defaults") {
    auto dir = scratch_dir("cli_config");
    auto cfg = (dir / "cfg.json").string();
    write_file(cfg, R"({"builtin": "karate", "num_pairs": 10, "method": "ojc", "split": 0.5})");

    auto from_file = cli({"run", "--config", cfg});
    REQUIRE(from_file.code == 0);
    auto j = nlohmann::json::parse(from_file.out);
    CHECK(j["num_pairs"] == 10);
    CHECK(j["num_test"] == 5);
    CHECK(j["config"]["method"] == "ojc");
    CHECK(j["config"]["master_seed"] == 0);

    auto overridden = cli({"run", "--config", cfg, "--pairs", "8", "--method", "lpsi"});
    REQUIRE(overridden.code == 0);
    auto k = nlohmann::json::parse(overridden.out);
    CHECK(k["num_pairs"] == 8);
    CHECK(k["num_test"] == 4);
    CHECK(k["config"]["method"] == "lpsi");
    CHECK(k["config"]["split"] == 0.5);

    write_file(dir / "bad.json", R"({"nonsense": true})");
    CHECK(cli({"run", "--config", (dir / "bad.json").string()}).code == 2);
}

TEST_CASE("eval scores emitted predictions") {
    auto dir = scratch_dir("cli_eval");
    auto pairs = (dir / "pairs.jsonl").string(), pred = (dir / "pred.jsonl").string();
    REQUIRE(cli({"simulate", "--builtin", "karate", "--pairs", "20", "--seed", "3", "-o", pairs}).code == 0);
    auto run = cli({"run", "--builtin", "karate", "--pairs-file", pairs, "--method", "netsleuth", "--seed", "3",
                    "--emit-predictions", pred});
    REQUIRE(run.code == 0);
    auto ev = cli({"eval", "--builtin", "karate", "--pairs-file", pairs, "--predictions", pred});
    REQUIRE(ev.code == 0);
    auto a = report_from_json(nlohmann::json::parse(run.out));
    auto b = report_from_json(nlohmann::json::parse(ev.out));
    CHECK(a.pairs == b.pairs);
    CHECK(a.aggregate == b.aggregate);

    CHECK(cli({"eval", "--builtin", "karate", "--pairs-file", pairs}).code == 2);
}

TEST_CASE("methods listing") {
    auto r = cli({"methods"});
    CHECK(r.code == 0);
    for (const char* m : {"lpsi", "netsleuth", "ojc", "gcnsi"}) CHECK(r.out.find(m) != std::string::npos);
}

}
