// walkscan: command-line driver for the lattice-walk range experiments.
//
// Subcommands: identities | mean-boundary | green | capacity | scan |
// slicing | deviation | confinement | cover | polymer | accept-all.
// Every run writes raw rows (JSONL), summary tables (CSV), and a RunRecord
// (JSON) into the output directory.  Exit codes: 0 success, 1 assertion /
// internal-check failure, 2 configuration error, 3 resource cap hit.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "rangelab/acceptance.hpp"
#include "rangelab/capacity.hpp"
#include "rangelab/confinement.hpp"
#include "rangelab/deviation.hpp"
#include "rangelab/experiment.hpp"
#include "rangelab/green.hpp"
#include "rangelab/polymer.hpp"
#include "rangelab/range_geometry.hpp"
#include "rangelab/scan.hpp"
#include "rangelab/slicing.hpp"

namespace fs = std::filesystem;
using namespace rangelab;

namespace {

struct CliOverrides {
    std::string config_path;
    std::string subcommand;
    std::string out_dir;
    std::string cache_dir;
    std::uint64_t seed = 0;
    int threads = 0;
    bool seed_set = false, threads_set = false;
};

/// Environment variables mirror the flags: WALKSCAN_CONFIG, WALKSCAN_SEED,
/// WALKSCAN_THREADS, WALKSCAN_OUT, WALKSCAN_CACHE, WALKSCAN_SUBCOMMAND.
void apply_env(CliOverrides& o) {
    if (const char* v = std::getenv("WALKSCAN_CONFIG"); v && o.config_path.empty()) o.config_path = v;
    if (const char* v = std::getenv("WALKSCAN_OUT"); v && o.out_dir.empty()) o.out_dir = v;
    if (const char* v = std::getenv("WALKSCAN_CACHE"); v && o.cache_dir.empty()) o.cache_dir = v;
    if (const char* v = std::getenv("WALKSCAN_SUBCOMMAND"); v && o.subcommand.empty()) o.subcommand = v;
    if (const char* v = std::getenv("WALKSCAN_SEED"); v && !o.seed_set) {
        o.seed = std::strtoull(v, nullptr, 10);
        o.seed_set = true;
    }
    if (const char* v = std::getenv("WALKSCAN_THREADS"); v && !o.threads_set) {
        o.threads = std::atoi(v);
        o.threads_set = true;
    }
}

ExperimentConfig load_config(const CliOverrides& o, const std::string& experiment,
                             const ExperimentConfig& defaults) {
    ExperimentConfig c = defaults;
    if (!o.config_path.empty()) c = config_from_file(o.config_path);
    c.experiment = experiment;
    if (o.seed_set) c.seed = o.seed;
    if (o.threads_set) c.threads = o.threads;
    if (!o.out_dir.empty()) c.out_dir = o.out_dir;
    if (!o.cache_dir.empty()) c.cache_dir = o.cache_dir;
    c.validate();
    return c;
}

struct RunContext {
    ExperimentConfig config;
    RunRecord record;
    ResourceGuard guard;
    fs::path out;

    explicit RunContext(const ExperimentConfig& c) : config(c) {
        record.config_hash = c.hash();
        record.experiment = c.experiment;
        record.config = c.to_json();
        record.started_at = iso_timestamp();
        guard.max_seconds = c.max_wall_seconds;
        out = fs::path(c.out_dir);
        fs::create_directories(out);
    }

    void finish() {
        record.finished_at = iso_timestamp();
        std::ofstream f(out / (config.experiment + "_run.json"));
        f << record.to_json().dump(2) << '\n';
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// --- subcommand bodies ------------------------------------------------------

int run_identities(RunContext& ctx) {
    const auto& c = ctx.config;
    JsonlWriter rows(ctx.out / "identities_rows.jsonl");
    Rng rng(RngStream{c.seed, 1});
    std::size_t violations = 0, instances = 0;
    for (std::size_t rep = 0; rep < c.replicas; ++rep) {
        ctx.guard.check();
        const PointSet a = random_walk_set(rng, c.d, 40 + static_cast<std::int64_t>(rng.below(80)), 4);
        const PointSet b = random_walk_set(rng, c.d, 40 + static_cast<std::int64_t>(rng.below(80)), 4);
        const auto ie = check_inclusion_exclusion(a, b);
        const auto bb = check_boundary_bounds(a, b);
        const std::size_t lhs = intersection_size(dilate(a), dilate(b));
        const std::size_t rhs = intersection_size(dilate_twice(a), b);
        const bool dil_ok = lhs <= 2 * static_cast<std::size_t>(c.d) * rhs;
        instances += 4;
        if (!ie.holds) ++violations;
        if (!bb.lower_holds) ++violations;
        if (!bb.upper_holds) ++violations;
        if (!dil_ok) ++violations;
        rows.row(json{{"rep", rep},
                      {"sizes", {a.size(), b.size()}},
                      {"inclusion_exclusion", ie.holds},
                      {"boundary_lower", bb.lower_holds},
                      {"boundary_upper", bb.upper_holds},
                      {"dilation_2d", dil_ok}});
    }
    ctx.record.aggregates["instances"] = instances;
    ctx.record.aggregates["violations"] = violations;
    ctx.record.assertion_failed = violations > 0;
    return violations == 0 ? 0 : 1;
}

int run_mean_boundary(RunContext& ctx) {
    const auto& c = ctx.config;
    const auto table = estimate_mean_boundary(c.d, c.n_grid, c.replicas, RngStream{c.seed, 1}, c.level);
    CsvWriter csv(ctx.out / "mean_boundary.csv", {"n", "mean_per_step", "stderr", "half_width"});
    JsonlWriter rows(ctx.out / "mean_boundary_rows.jsonl");
    for (const auto& row : table.rows) {
        csv.row({std::to_string(row.n), fmt(row.per_step.mean), fmt(row.per_step.stderr_),
                 fmt(row.per_step.half_width)});
        rows.row(json{{"n", row.n},
                      {"mean", row.per_step.mean},
                      {"stderr", row.per_step.stderr_},
                      {"half_width", row.per_step.half_width},
                      {"count", row.per_step.count}});
    }
    ctx.record.fitted_constants["nu_hat"] = table.nu_hat;
    ctx.record.fitted_constants["correction_amp"] = table.correction_amp;
    ctx.record.aggregates["residuals"] = table.residuals;
    return 0;
}

int run_green(RunContext& ctx) {
    const auto& c = ctx.config;
    std::vector<std::int64_t> T_grid = c.T_grid.empty() ? std::vector<std::int64_t>{64, 256, 1024} : c.T_grid;
    const auto R = c.r_grid.empty() ? 16 : static_cast<std::int32_t>(c.r_grid.front());
    JsonlWriter rows(ctx.out / "green_rows.jsonl");
    CsvWriter csv(ctx.out / "green.csv", {"T", "R", "mass_defect", "escape_total", "c_hat", "C_hat"});
    bool ok = true;
    for (std::int64_t T : T_grid) {
        ctx.guard.check();
        RestrictedGreenTable table(c.d, T, R, c.max_memory_mb << 20);
        const RestrictedBoundFit fit = check_restricted_bound(table);
        const double defect_rel = table.mass_identity_defect() / static_cast<double>(T + 1);
        if (defect_rel > 1e-9) ok = false;
        rows.row(json{{"T", T},
                      {"R", R},
                      {"mass_defect_rel", defect_rel},
                      {"escape_total", table.escape_total()},
                      {"tail_bound", table.tail_bound()},
                      {"c_hat", fit.c_hat},
                      {"C_hat", fit.C_hat},
                      {"decay_r2", fit.decay.r2}});
        csv.row({std::to_string(T), std::to_string(R), fmt(defect_rel), fmt(table.escape_total()),
                 fmt(fit.c_hat), fmt(fit.C_hat)});
    }
    const GreenEstimate g0 = green_full(c.d, origin(), 5e-3);
    ctx.record.fitted_constants["green_zero_bracket"] = {g0.value, g0.value + g0.tail};
    ctx.record.assertion_failed = !ok;
    return ok ? 0 : 1;
}

int run_capacity(RunContext& ctx) {
    const auto& c = ctx.config;
    JsonlWriter rows(ctx.out / "capacity_rows.jsonl");
    CsvWriter csv(ctx.out / "capacity.csv",
                  {"set", "volume", "dir_lower", "dir_upper", "mc_lower", "mc_upper", "overlap"});
    Rng rng(RngStream{c.seed, 1});
    std::size_t overlaps = 0, total = 0;
    for (std::size_t rep = 0; rep < c.replicas; ++rep) {
        ctx.guard.check();
        const PointSet s = random_walk_set(rng, c.d, 15 + static_cast<std::int64_t>(rng.below(40)), 0);
        const auto R = std::max<std::int32_t>(16, static_cast<std::int32_t>(4 * (set_radius(s) + 1)));
        const CapacityBracket dir = capacity_dirichlet(s, R);
        const CapacityBracket mc =
            capacity_mc(s, capacity_mc_horizon(s), 500, RngStream{c.seed, 1000 * (rep + 1)}, c.level);
        const bool ov = dir.overlaps(mc);
        ++total;
        if (ov) ++overlaps;
        const std::string id = "walk_" + std::to_string(rep);
        rows.row(json{{"set", id},
                      {"volume", s.size()},
                      {"dirichlet", {dir.lower, dir.upper}},
                      {"mc", {mc.lower, mc.upper}},
                      {"iso_index", {iso_index(s, dir).lower, iso_index(s, dir).upper}},
                      {"overlap", ov}});
        csv.row({id, std::to_string(s.size()), fmt(dir.lower), fmt(dir.upper), fmt(mc.lower),
                 fmt(mc.upper), ov ? "1" : "0"});
    }
    ctx.record.aggregates["overlaps"] = overlaps;
    ctx.record.aggregates["sets"] = total;
    ctx.record.assertion_failed = overlaps != total;
    return overlaps == total ? 0 : 1;
}

int run_scan(RunContext& ctx) {
    const auto& c = ctx.config;
    const double r = c.r_grid.empty() ? 2.0 : c.r_grid.front();
    const std::vector<std::int64_t> t_grid = c.t_grid.empty() ? std::vector<std::int64_t>{1, 2, 4} : c.t_grid;
    JsonlWriter rows(ctx.out / "scan_rows.jsonl");
    CsvWriter csv(ctx.out / "scan.csv", {"n", "t", "mean_exceedances", "family_size_mean"});
    bool ok = true;
    for (std::int64_t n : c.n_grid) {
        for (std::int64_t t : t_grid) {
            double count_sum = 0, fam_sum = 0;
            for (std::size_t rep = 0; rep < c.replicas; ++rep) {
                ctx.guard.check();
                Trajectory traj = generate_walk(
                    RngStream{c.seed, 1 + rep + 1000 * static_cast<std::uint64_t>(t)}, c.d, n);
                const ScanResult scan = rolling_scan(traj, origin(), r, t, n);
                const CenterFamily fam = greedy_centers(traj, origin(), r, t, 0, n);
                if (!fam.well_separated()) ok = false;
                count_sum += static_cast<double>(scan.count());
                fam_sum += static_cast<double>(fam.size());
                if (rep < 16)
                    rows.row(json{{"n", n},
                                  {"t", t},
                                  {"rep", rep},
                                  {"exceedances", scan.count()},
                                  {"family_size", fam.size()}});
            }
            csv.row({std::to_string(n), std::to_string(t),
                     fmt(count_sum / static_cast<double>(c.replicas)),
                     fmt(fam_sum / static_cast<double>(c.replicas))});
        }
    }
    ctx.record.assertion_failed = !ok;
    return ok ? 0 : 1;
}

int run_slicing(RunContext& ctx) {
    const auto& c = ctx.config;
    const std::vector<std::int64_t> T_grid = c.T_grid.empty() ? std::vector<std::int64_t>{20, 50} : c.T_grid;
    JsonlWriter rows(ctx.out / "slicing_rows.jsonl");
    CsvWriter csv(ctx.out / "slicing.csv", {"n", "T", "holds_frac", "xi_mean", "xi_err_mean"});
    bool all_hold = true;
    for (std::int64_t n : c.n_grid) {
        for (std::int64_t T : T_grid) {
            if (T > n) continue;
            RestrictedGreenTable table(c.d, T, static_cast<std::int32_t>(std::min<std::int64_t>(T, 24)),
                                       c.max_memory_mb << 20);
            std::size_t holds = 0;
            double xi_sum = 0, err_sum = 0;
            for (std::size_t rep = 0; rep < c.replicas; ++rep) {
                ctx.guard.check();
                Trajectory traj = generate_walk(RngStream{c.seed, 1 + rep}, c.d, n);
                const SlicingTerms s = slicing_terms(traj, -1, T, n);
                const XiValue xi = xi_fold(traj, n, T, table);
                if (s.holds) ++holds;
                else all_hold = false;
                xi_sum += xi.value;
                err_sum += xi.error_bound;
                if (rep < 16)
                    rows.row(json{{"n", n},
                                  {"T", T},
                                  {"rep", rep},
                                  {"boundary", s.boundary_n},
                                  {"sum_U", s.sum_U()},
                                  {"cross", s.X.back()},
                                  {"remainder", s.remainder},
                                  {"holds", s.holds},
                                  {"xi", xi.value},
                                  {"xi_err", xi.error_bound}});
            }
            csv.row({std::to_string(n), std::to_string(T),
                     fmt(static_cast<double>(holds) / static_cast<double>(c.replicas)),
                     fmt(xi_sum / static_cast<double>(c.replicas)),
                     fmt(err_sum / static_cast<double>(c.replicas))});
        }
    }
    ctx.record.assertion_failed = !all_hold;
    return all_hold ? 0 : 1;
}

int run_deviation(RunContext& ctx) {
    const auto& c = ctx.config;
    const std::vector<double> eps = c.eps_grid.empty() ? std::vector<double>{0.05, 0.1, 0.2} : c.eps_grid;
    const DeviationReport rep = deviation_scan_experiment(RngStream{c.seed, 1}, c.d, c.n_grid, eps,
                                                          c.replicas, 1.3, 3.0, c.d >= 5 ? 150.0 : 0.5);
    JsonlWriter rows(ctx.out / "deviation_rows.jsonl");
    CsvWriter csv(ctx.out / "deviation.csv", {"n", "eps", "rho", "m", "x", "cost", "usable"});
    for (const auto& row : rep.rows) {
        rows.row(json{{"n", row.n}, {"eps", row.eps}, {"rho", row.rho}, {"m", row.m},
                      {"x", row.x}, {"cost", row.cost}, {"prob", row.prob.mean}, {"usable", row.usable}});
        csv.row({std::to_string(row.n), fmt(row.eps), fmt(row.rho), std::to_string(row.m), fmt(row.x),
                 fmt(row.cost), row.usable ? "1" : "0"});
    }
    ctx.record.fitted_constants["kappa_hat"] = rep.kappa_hat;
    ctx.record.fitted_constants["fit_r2"] = rep.fit.r2;
    ctx.record.aggregates["dropped_cells"] = rep.dropped;
    return 0;
}

int run_confinement(RunContext& ctx) {
    const auto& c = ctx.config;
    const std::vector<double> rho_grid = c.rho_grid.empty() ? std::vector<double>{20, 30, 45} : c.rho_grid;
    JsonlWriter rows(ctx.out / "confinement_rows.jsonl");
    CsvWriter csv(ctx.out / "confinement.csv", {"n", "rho", "ratio", "prob", "half_width"});
    std::vector<double> xs, ys;
    std::uint64_t idx = 1;
    for (std::int64_t n : c.n_grid) {
        for (double rho : rho_grid) {
            ctx.guard.check();
            const auto est = estimate_confinement_prob(RngStream{c.seed, idx}, c.d, n, rho, c.replicas, c.level);
            idx += c.replicas;
            const double ratio = static_cast<double>(n) / (rho * rho);
            rows.row(json{{"n", n}, {"rho", rho}, {"ratio", ratio},
                          {"survived", est.survived}, {"prob", est.prob.mean},
                          {"half_width", est.prob.half_width}});
            csv.row({std::to_string(n), fmt(rho), fmt(ratio), fmt(est.prob.mean), fmt(est.prob.half_width)});
            if (est.survived > 0 && est.survived < est.replicas) {
                xs.push_back(ratio);
                ys.push_back(std::log(est.prob.mean));
            }
        }
    }
    if (xs.size() >= 2) {
        const LinearFit fit = linear_fit(xs, ys);
        ctx.record.fitted_constants["kappa_hat"] = -fit.slope;
        ctx.record.fitted_constants["fit_r2"] = fit.r2;
    }
    return 0;
}

int run_cover(RunContext& ctx) {
    const auto& c = ctx.config;
    const double eps = c.eps_grid.empty() ? 0.15 : c.eps_grid.front();
    const double ball_r = c.r_grid.empty() ? 6.0 : c.r_grid.front();
    PointSet lambda(c.d, euclidean_ball(origin(), c.d, ball_r));
    JsonlWriter rows(ctx.out / "cover_rows.jsonl");
    CsvWriter csv(ctx.out / "cover.csv",
                  {"n", "eps", "rho", "freq_confined", "freq_free", "mean_cover", "partition_ok"});
    bool ok = true;
    for (std::int64_t n : c.n_grid) {
        ctx.guard.check();
        const CoveringReport rep = covering_experiment(RngStream{c.seed, 1}, 3, n, eps, lambda, c.replicas);
        if (!rep.partition_ok) ok = false;
        rows.row(json{{"n", n}, {"eps", eps}, {"rho", rep.rho},
                      {"freq_confined", rep.freq_confined}, {"freq_free", rep.freq_free},
                      {"mean_cover", rep.mean_cover}, {"partition_ok", rep.partition_ok}});
        csv.row({std::to_string(n), fmt(eps), fmt(rep.rho), fmt(rep.freq_confined), fmt(rep.freq_free),
                 fmt(rep.mean_cover), rep.partition_ok ? "1" : "0"});
    }
    ctx.record.assertion_failed = !ok;
    return ok ? 0 : 1;
}

int run_polymer(RunContext& ctx) {
    const auto& c = ctx.config;
    const std::vector<double> betas = c.beta_grid.empty() ? std::vector<double>{0, 0.5, 1, 2, 4} : c.beta_grid;
    const std::int64_t n = c.n_grid.front();
    // centering constant: measured free-walk mean unless pinned in the config
    double mu = c.mu_n;
    if (mu < 0) {
        std::vector<double> ms;
        for (std::size_t rep = 0; rep < std::max<std::size_t>(c.replicas, 50); ++rep) {
            Rng rng(RngStream{c.seed, 500000 + rep});
            BoundaryTracker tracker(c.d);
            Point p = origin();
            for (std::int64_t k = 0; k < n; ++k) {
                p = apply_step(p, rng.below(static_cast<std::uint32_t>(2 * c.d)));
                tracker.step(p);
            }
            ms.push_back(static_cast<double>(tracker.boundary_size()));
        }
        mu = mean_ci(ms).mean;
    }
    const double diag_r = c.r_n_rule == "n_over_log_n" ? default_diag_radius(c.d, n)
                                                       : std::pow(static_cast<double>(n), 1.0 / c.d);
    JsonlWriter rows(ctx.out / "polymer_rows.jsonl");
    CsvWriter csv(ctx.out / "polymer.csv",
                  {"beta", "mean_boundary", "integrand", "integrand_hw", "acceptance", "free_energy"});
    std::vector<BetaKnot> knots;
    std::vector<PolymerRun> runs;
    std::uint64_t idx = 1;
    for (double beta : betas) {
        ctx.guard.check();
        const std::size_t samples = c.sweeps / std::max<std::size_t>(c.thin, 1);
        PolymerRun run = polymer_mcmc(RngStream{c.seed, idx++}, c.d, n, beta, samples, c.thin,
                                      c.burn_in, mu, c.block_len_mean, 16, diag_r);
        knots.push_back({beta, run.mean_neg_centered(c.d, c.level)});
        for (std::size_t s = 0; s < run.samples.size(); s += 8)
            rows.row(json{{"beta", beta},
                          {"proposal", run.samples[s].proposal},
                          {"boundary", run.samples[s].boundary},
                          {"range", run.samples[s].range},
                          {"gyration", run.samples[s].gyration},
                          {"max_ball", run.samples[s].max_ball}});
        runs.push_back(std::move(run));
    }
    const FreeEnergyCurve curve = free_energy_curve(knots, c.d, n);
    for (std::size_t i = 0; i < knots.size(); ++i)
        csv.row({fmt(knots[i].beta), fmt(runs[i].mean_boundary().mean), fmt(knots[i].integrand.mean),
                 fmt(knots[i].integrand.half_width), fmt(runs[i].acceptance_rate), fmt(curve.value[i])});
    ctx.record.fitted_constants["mu_n"] = mu;
    ctx.record.fitted_constants["diag_radius"] = diag_r;
    ctx.record.aggregates["free_energy"] = curve.value;
    ctx.record.aggregates["free_energy_half_ci"] = curve.half_ci;
    ctx.record.aggregates["beta_depart"] = curve.beta_depart;
    ctx.record.aggregates["nondecreasing"] = curve.nondecreasing;
    ctx.record.assertion_failed = !curve.nondecreasing;
    return curve.nondecreasing ? 0 : 1;
}

int run_accept_all(RunContext& ctx) {
    const auto results = accept::run_all(ctx.config.seed);
    JsonlWriter rows(ctx.out / "acceptance_rows.jsonl");
    std::size_t failed = 0;
    for (const auto& r : results) {
        rows.row(json{{"id", r.id}, {"name", r.name}, {"pass", r.pass},
                      {"detail", r.detail}, {"seconds", r.seconds}});
        if (!r.pass) ++failed;
    }
    ctx.record.aggregates["passed"] = results.size() - failed;
    ctx.record.aggregates["failed"] = failed;
    ctx.record.assertion_failed = failed > 0;
    return failed == 0 ? 0 : 1;
}

struct Subcommand {
    const char* name;
    int (*fn)(RunContext&);
    ExperimentConfig defaults;
};

ExperimentConfig defaults_for(const std::string& name) {
    ExperimentConfig c;
    if (name == "identities") {
        c.replicas = 500;
    } else if (name == "mean-boundary") {
        c.n_grid = {1000, 3000, 10000, 30000};
        c.replicas = 200;
    } else if (name == "green") {
        c.T_grid = {64, 256, 1024};
        c.replicas = 1;
    } else if (name == "capacity") {
        c.replicas = 10;
    } else if (name == "scan") {
        c.n_grid = {2000};
        c.replicas = 50;
    } else if (name == "slicing") {
        c.n_grid = {500};
        c.T_grid = {20, 50};
        c.replicas = 50;
    } else if (name == "deviation") {
        c.n_grid = {2000, 6000};
        c.eps_grid = {0.05, 0.1, 0.2};
        c.replicas = 30000;
    } else if (name == "confinement") {
        c.n_grid = {2000, 5000, 10000};
        c.rho_grid = {25, 40, 60};
        c.replicas = 10000;
    } else if (name == "cover") {
        c.n_grid = {400};
        c.eps_grid = {0.15};
        c.r_grid = {6.0};
        c.replicas = 20;
    } else if (name == "polymer") {
        c.n_grid = {400};
        c.beta_grid = {0, 0.5, 1, 2, 4};
        c.sweeps = 8000;
        c.burn_in = 2000;
        c.thin = 20;
        c.replicas = 50;
    }
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lattice-walk range geometry experiments"};
    app.require_subcommand(0, 1);

    CliOverrides o;
    app.add_option("--config", o.config_path, "JSON config file");
    app.add_option("--seed", o.seed, "root RNG seed")->each([&](const std::string&) { o.seed_set = true; });
    app.add_option("--threads", o.threads, "worker thread count")->each([&](const std::string&) {
        o.threads_set = true;
    });
    app.add_option("--out", o.out_dir, "output directory");
    app.add_option("--cache", o.cache_dir, "cache directory");
    app.add_option("--subcommand", o.subcommand, "experiment name (alternative to the subcommand)");

    const Subcommand subs[] = {
        {"identities", run_identities, {}},   {"mean-boundary", run_mean_boundary, {}},
        {"green", run_green, {}},             {"capacity", run_capacity, {}},
        {"scan", run_scan, {}},               {"slicing", run_slicing, {}},
        {"deviation", run_deviation, {}},     {"confinement", run_confinement, {}},
        {"cover", run_cover, {}},             {"polymer", run_polymer, {}},
        {"accept-all", run_accept_all, {}},
    };
    for (const auto& s : subs) app.add_subcommand(s.name, "")->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // bad usage is a configuration error
    }
    apply_env(o);

    std::string chosen = o.subcommand;
    for (const auto& s : subs)
        if (app.get_subcommand(s.name)->parsed()) chosen = s.name;
    if (chosen.empty()) {
        std::cerr << "error: no subcommand given (use --subcommand NAME or a positional subcommand)\n";
        return 2;
    }

    int (*fn)(RunContext&) = nullptr;
    for (const auto& s : subs)
        if (chosen == s.name) fn = s.fn;
    if (!fn) {
        std::cerr << "error: unknown subcommand '" << chosen << "'\n";
        return 2;
    }

    try {
        const ExperimentConfig config = load_config(o, chosen, defaults_for(chosen));
        RunContext ctx(config);
        int rc = 0;
        try {
            rc = fn(ctx);
        } catch (const ResourceCapError& e) {
            ctx.record.resource_cap_hit = true;
            ctx.finish();
            std::cerr << "resource cap: " << e.what() << '\n';
            return 3;
        } catch (const std::bad_alloc&) {
            ctx.record.resource_cap_hit = true;
            ctx.finish();
            std::cerr << "resource cap: allocation failed\n";
            return 3;
        } catch (const std::logic_error& e) {
            ctx.record.assertion_failed = true;
            ctx.finish();
            std::cerr << "assertion failed: " << e.what() << '\n';
            return 1;
        }
        ctx.finish();
        return rc;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
