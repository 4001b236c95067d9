#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

#include "rangelab/experiment.hpp"

using namespace rangelab;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
    const fs::path p = fs::temp_directory_path() / name;
    fs::remove(p);
    return p;
}

}  // namespace

TEST_CASE("config round-trips through json") {
    ExperimentConfig c;
    c.experiment = "scan";
    c.d = 5;
    c.n_grid = {100, 200};
    c.eps_grid = {0.1};
    c.seed = 42;
    const ExperimentConfig back = config_from_json(c.to_json());
    CHECK(back.experiment == "scan");
    CHECK(back.d == 5);
    CHECK(back.n_grid == c.n_grid);
    CHECK(back.seed == 42);
    CHECK(back.hash() == c.hash());
}

TEST_CASE("unknown config keys are rejected") {
    json j{{"experiment", "green"}, {"n_gird", json::array({10})}};
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
}

TEST_CASE("bad values are rejected with ConfigError") {
    CHECK_THROWS_AS(config_from_json(json{{"d", 2}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"d", 7}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"replicas", 0}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"threads", 0}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"n_grid", json::array()}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"d", "three"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::array()), ConfigError);
}

TEST_CASE("config hash is sensitive to every knob that matters") {
    ExperimentConfig base;
    const std::string h = base.hash();
    auto changed = [&](auto&& mutate) {
        ExperimentConfig c;
        mutate(c);
        return c.hash() != h;
    };
    CHECK(changed([](ExperimentConfig& c) { c.seed = 2; }));
    CHECK(changed([](ExperimentConfig& c) { c.d = 4; }));
    CHECK(changed([](ExperimentConfig& c) { c.replicas = 101; }));
    CHECK(changed([](ExperimentConfig& c) { c.n_grid = {1001}; }));
    CHECK(changed([](ExperimentConfig& c) { c.experiment = "polymer"; }));
    CHECK(changed([](ExperimentConfig& c) { c.beta_grid = {0.5}; }));
    CHECK(changed([](ExperimentConfig& c) { c.mu_n = 3.0; }));
    // identical configs agree
    ExperimentConfig same;
    CHECK(same.hash() == h);
}

TEST_CASE("config file parsing reports parse errors as config errors") {
    const fs::path p = temp_file("rangelab_bad.json");
    std::ofstream(p) << "{ not json";
    CHECK_THROWS_AS(config_from_file(p.string()), ConfigError);
    CHECK_THROWS_AS(config_from_file("/nonexistent/path.json"), ConfigError);
    fs::remove(p);
}

TEST_CASE("jsonl writer emits one object per line") {
    const fs::path p = temp_file("rangelab_rows.jsonl");
    {
        JsonlWriter w(p);
        w.row(json{{"k", 1}});
        w.row(json{{"k", 2}, {"x", 0.5}});
    }
    std::ifstream in(p);
    std::string line;
    std::vector<json> rows;
    while (std::getline(in, line)) rows.push_back(json::parse(line));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0]["k"] == 1);
    CHECK(rows[1]["x"] == 0.5);
    fs::remove(p);
}

TEST_CASE("jsonl output is byte-identical across reruns") {
    const fs::path p1 = temp_file("rangelab_a.jsonl");
    const fs::path p2 = temp_file("rangelab_b.jsonl");
    for (const fs::path& p : {p1, p2}) {
        JsonlWriter w(p);
        for (int i = 0; i < 50; ++i) w.row(json{{"i", i}, {"v", 0.1 * i}});
    }
    std::ifstream a(p1), b(p2);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
    fs::remove(p1);
    fs::remove(p2);
}

TEST_CASE("csv writer enforces the column count") {
    const fs::path p = temp_file("rangelab_t.csv");
    CsvWriter w(p, {"a", "b"});
    w.row({"1", "2"});
    CHECK_THROWS_AS(w.row({"1"}), std::invalid_argument);
    fs::remove(p);
}

TEST_CASE("run record serializes its provenance fields") {
    RunRecord rec;
    rec.config_hash = "deadbeef";
    rec.experiment = "green";
    rec.aggregates["x"] = 1.5;
    const json j = rec.to_json();
    CHECK(j["config_hash"] == "deadbeef");
    CHECK(j["aggregates"]["x"] == 1.5);
    CHECK(j["assertion_failed"] == false);
    CHECK(j["resource_cap_hit"] == false);
    CHECK(j.contains("code_version"));
}

TEST_CASE("iso timestamps look like UTC timestamps") {
    const std::string t = iso_timestamp();
    REQUIRE(t.size() == 20);
    CHECK(t[4] == '-');
    CHECK(t[10] == 'T');
    CHECK(t.back() == 'Z');
}

TEST_CASE("parallel_for covers every index exactly once") {
    for (int threads : {1, 4}) {
        std::vector<std::atomic<int>> counts(257);
        for (auto& c : counts) c = 0;
        parallel_for(counts.size(), threads, [&](std::size_t i) { ++counts[i]; });
        for (auto& c : counts) CHECK(c == 1);
    }
}

TEST_CASE("resource guard trips after the deadline") {
    ResourceGuard g;
    g.max_seconds = 0.0;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    CHECK_THROWS_AS(g.check(), ResourceCapError);
    ResourceGuard lax;
    lax.max_seconds = 3600;
    CHECK_NOTHROW(lax.check());
}
