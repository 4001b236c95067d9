#ifndef RANGELAB_EXPERIMENT_HPP
#define RANGELAB_EXPERIMENT_HPP

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

namespace rangelab {

using json = nlohmann::json;

/// Config problems exit with status 2; resource-cap hits with status 3.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ResourceCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string experiment = "identities";
    int d = 3;
    std::vector<std::int64_t> n_grid{1000};
    std::vector<std::int64_t> T_grid{};
    std::vector<double> r_grid{};
    std::vector<double> rho_grid{};
    std::vector<double> eps_grid{};
    std::vector<double> beta_grid{};
    std::vector<std::int64_t> t_grid{};
    std::size_t replicas = 100;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_dir = "out";
    std::string cache_dir;
    double level = 0.95;
    std::size_t max_memory_mb = 4096;
    double max_wall_seconds = 3600;
    // polymer chain knobs
    std::size_t sweeps = 20000;
    std::size_t burn_in = 4000;
    std::size_t thin = 40;
    double block_len_mean = 16;
    std::string r_n_rule = "n_over_log_n";
    double mu_n = -1;  // < 0: measured before the run

    void validate() const {
        if (d < 3 || d > 6) throw ConfigError("config: d must be in [3, 6]");
        if (replicas < 1) throw ConfigError("config: replicas must be >= 1");
        if (n_grid.empty()) throw ConfigError("config: n_grid must be nonempty");
        if (threads < 1) throw ConfigError("config: threads must be >= 1");
        for (auto n : n_grid)
            if (n < 1) throw ConfigError("config: n_grid entries must be positive");
    }

    json to_json() const {
        return json{{"experiment", experiment},
                    {"d", d},
                    {"n_grid", n_grid},
                    {"T_grid", T_grid},
                    {"r_grid", r_grid},
                    {"rho_grid", rho_grid},
                    {"eps_grid", eps_grid},
                    {"beta_grid", beta_grid},
                    {"t_grid", t_grid},
                    {"replicas", replicas},
                    {"seed", seed},
                    {"threads", threads},
                    {"out_dir", out_dir},
                    {"cache_dir", cache_dir},
                    {"level", level},
                    {"max_memory_mb", max_memory_mb},
                    {"max_wall_seconds", max_wall_seconds},
                    {"sweeps", sweeps},
                    {"burn_in", burn_in},
                    {"thin", thin},
                    {"block_len_mean", block_len_mean},
                    {"r_n_rule", r_n_rule},
                    {"mu_n", mu_n}};
    }

    /// FNV-1a over the canonical serialization; covers every field above.
    std::string hash() const {
        const std::string s = to_json().dump();
        std::uint64_t h = 1469598103934665603ULL;
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return std::string(buf);
    }
};

namespace detail {

template <class T>
void read_field(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config: bad type for key '") + key + "'");
    }
}

}  // namespace detail

inline ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    static const char* known[] = {"experiment", "d", "n_grid", "T_grid", "r_grid", "rho_grid",
                                  "eps_grid", "beta_grid", "t_grid", "replicas", "seed", "threads",
                                  "out_dir", "cache_dir", "level", "max_memory_mb",
                                  "max_wall_seconds", "sweeps", "burn_in", "thin",
                                  "block_len_mean", "r_n_rule", "mu_n", "schema_version"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) ok = true;
        if (!ok) throw ConfigError("config: unknown key '" + it.key() + "'");
    }
    ExperimentConfig c;
    detail::read_field(j, "experiment", c.experiment);
    detail::read_field(j, "d", c.d);
    detail::read_field(j, "n_grid", c.n_grid);
    detail::read_field(j, "T_grid", c.T_grid);
    detail::read_field(j, "r_grid", c.r_grid);
    detail::read_field(j, "rho_grid", c.rho_grid);
    detail::read_field(j, "eps_grid", c.eps_grid);
    detail::read_field(j, "beta_grid", c.beta_grid);
    detail::read_field(j, "t_grid", c.t_grid);
    detail::read_field(j, "replicas", c.replicas);
    detail::read_field(j, "seed", c.seed);
    detail::read_field(j, "threads", c.threads);
    detail::read_field(j, "out_dir", c.out_dir);
    detail::read_field(j, "cache_dir", c.cache_dir);
    detail::read_field(j, "level", c.level);
    detail::read_field(j, "max_memory_mb", c.max_memory_mb);
    detail::read_field(j, "max_wall_seconds", c.max_wall_seconds);
    detail::read_field(j, "sweeps", c.sweeps);
    detail::read_field(j, "burn_in", c.burn_in);
    detail::read_field(j, "thin", c.thin);
    detail::read_field(j, "block_len_mean", c.block_len_mean);
    detail::read_field(j, "r_n_rule", c.r_n_rule);
    detail::read_field(j, "mu_n", c.mu_n);
    c.validate();
    return c;
}

inline ExperimentConfig config_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: parse error: ") + e.what());
    }
    return config_from_json(j);
}

struct RunRecord {
    std::string config_hash;
    std::string experiment;
    json config;
    json aggregates = json::object();
    json fitted_constants = json::object();
    std::string started_at, finished_at;
    std::string code_version = "0.1.0";
    bool assertion_failed = false;
    bool resource_cap_hit = false;

    json to_json() const {
        return json{{"config_hash", config_hash},
                    {"experiment", experiment},
                    {"config", config},
                    {"aggregates", aggregates},
                    {"fitted_constants", fitted_constants},
                    {"started_at", started_at},
                    {"finished_at", finished_at},
                    {"code_version", code_version},
                    {"assertion_failed", assertion_failed},
                    {"resource_cap_hit", resource_cap_hit}};
    }
};

inline std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Appends one JSON object per line.
class JsonlWriter {
public:
    explicit JsonlWriter(const std::filesystem::path& path) : out_(path) {
        if (!out_) throw std::runtime_error("JsonlWriter: cannot open " + path.string());
    }
    void row(const json& j) { out_ << j.dump() << '\n'; }

private:
    std::ofstream out_;
};

/// Long-format CSV with a fixed header.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
        : out_(path), cols_(header.size()) {
        if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path.string());
        for (std::size_t i = 0; i < header.size(); ++i) out_ << header[i] << (i + 1 < header.size() ? "," : "\n");
    }
    void row(const std::vector<std::string>& cells) {
        if (cells.size() != cols_) throw std::invalid_argument("CsvWriter: column count mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
    }

private:
    std::ofstream out_;
    std::size_t cols_;
};

struct ResourceGuard {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double max_seconds = 3600;

    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    void check() const {
        if (elapsed() > max_seconds) throw ResourceCapError("wall-time cap exceeded");
    }
};

/// Runs f(i) for i in [0, count) on up to `threads` workers.  Results must be
/// written into pre-sized per-index slots so the merge is order-independent.
inline void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& f) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            f(i);
        }
    };
    const int nw = std::min<int>(threads, static_cast<int>(count));
    pool.reserve(static_cast<std::size_t>(nw));
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace rangelab

#endif
