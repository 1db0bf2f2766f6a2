// Command-line front end: config parsing, command dispatch, ensemble
// orchestration, CSV/JSON output with reproduction manifests.
#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "znsim/config_io.h"
#include "znsim/errors.h"
#include "znsim/noise.h"
#include "znsim/parallel.h"
#include "znsim/scaling.h"
#include "znsim/sde.h"
#include "znsim/selection.h"
#include "znsim/stats.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace znsim;

namespace {

std::string fmt(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string now_iso8601() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const fs::path& file, const std::string& content) {
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write '" + file.string() + "'");
    out << content;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const json& config_echo, const json& parameters,
                    std::uint64_t seed, const std::vector<std::string>& outputs,
                    const std::string& started) {
    json manifest{{"command", command},
                  {"tool_version", ZNSIM_VERSION},
                  {"seed", seed},
                  {"config", config_echo},
                  {"parameters", parameters},
                  {"started", started},
                  {"finished", now_iso8601()},
                  {"outputs", outputs}};
    write_text(dir / (command + ".manifest.json"), manifest.dump(2) + "\n");
}

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    unsigned jobs = 0; // 0 = hardware concurrency
    bool force = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_config = true) {
    if (with_config)
        cmd->add_option("--config", opts.config_path, "JSON configuration file")
            ->required();
    cmd->add_option("--out", opts.out_dir, "output directory")->required();
    cmd->add_option("--seed", opts.seed, "override the config seed");
    cmd->add_option("--jobs", opts.jobs, "worker threads (0 = all cores)");
    cmd->add_flag("--force", opts.force, "proceed despite a regime violation");
}

RunConfig load_config(const CommonOpts& opts) {
    RunConfig run = load_run_config(opts.config_path);
    if (opts.seed) run.sim.seed = *opts.seed;
    return run;
}

fs::path ensure_out_dir(const CommonOpts& opts) {
    fs::path dir(opts.out_dir);
    fs::create_directories(dir);
    return dir;
}

// Exit code 3 unless the regime condition holds or --force was given.
bool regime_gate(const RunConfig& run, bool force) {
    RegimeReport report = check_regime(run.sim.drift.alpha,
                                       self_similarity_index(run.sim.noise),
                                       run.sim.noise.kind);
    if (report.regime_ok || force) return true;
    std::cerr << "error: regime condition alpha + 1/beta > 1 fails (value "
              << report.condition_value << "); " << report.uniqueness_note
              << " Use --force to run anyway.\n";
    return false;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

json estimate_to_json(const SelectionEstimate& est) {
    json doc{{"n_total", est.n_total},
             {"n_plus", est.n_plus},
             {"n_minus", est.n_minus},
             {"n_undecided", est.n_undecided},
             {"any_decided", est.any_decided}};
    if (est.any_decided) {
        doc["p_plus_hat"] = est.p_plus_hat;
        doc["ci_low"] = est.ci_low;
        doc["ci_high"] = est.ci_high;
    } else {
        doc["p_plus_hat"] = nullptr;
        doc["ci_low"] = nullptr;
        doc["ci_high"] = nullptr;
    }
    return doc;
}

int cmd_simulate(const CommonOpts& opts) {
    const std::string started = now_iso8601();
    RunConfig run = load_config(opts);
    if (!regime_gate(run, opts.force)) return 3;
    fs::path dir = ensure_out_dir(opts);

    auto [noise, solution] = simulate_path(run.sim, 0);

    std::string csv = "t,x,noise\n";
    for (std::size_t k = 0; k < solution.values.size(); ++k) {
        csv += fmt(solution.time_at(k));
        csv += ',';
        csv += fmt(solution.values[k]);
        csv += ',';
        csv += fmt(noise.values[k]);
        csv += '\n';
    }
    write_text(dir / "path.csv", csv);
    write_manifest(dir, "simulate", to_json(run), json::object(), run.sim.seed,
                   {"path.csv"}, started);
    return 0;
}

int cmd_estimate_p(const CommonOpts& opts, std::size_t n_paths) {
    const std::string started = now_iso8601();
    RunConfig run = load_config(opts);
    if (n_paths == 0) {
        std::cerr << "error: --n-paths must be at least 1\n";
        return 2;
    }
    if (!regime_gate(run, opts.force)) return 3;
    fs::path dir = ensure_out_dir(opts);

    SelectionEstimate est =
        estimate_selection(run.sim, n_paths, run.classify, opts.jobs, true);

    write_text(dir / "estimate.json", estimate_to_json(est).dump(2) + "\n");
    write_manifest(dir, "estimate-p", to_json(run), json{{"n_paths", n_paths}},
                   run.sim.seed, {"estimate.json"}, started);
    return 0;
}

int cmd_verify_scaling(const CommonOpts& opts, const std::vector<double>& epsilons,
                       const std::vector<double>& checkpoints, std::size_t n_samples,
                       double significance) {
    const std::string started = now_iso8601();
    RunConfig run = load_config(opts);
    if (!regime_gate(run, opts.force)) return 3;
    fs::path dir = ensure_out_dir(opts);

    auto cells = verify_scaling_invariance(run.sim, epsilons, checkpoints, n_samples,
                                           significance, opts.jobs);

    std::string csv = "epsilon,t,ks_statistic,p_value,passed\n";
    for (const auto& cell : cells) {
        csv += fmt(cell.epsilon);
        csv += ',';
        csv += fmt(cell.t);
        csv += ',';
        csv += fmt(cell.report.statistic);
        csv += ',';
        csv += fmt(cell.report.p_value);
        csv += ',';
        csv += cell.report.passed ? '1' : '0';
        csv += '\n';
    }
    write_text(dir / "scaling.csv", csv);
    write_manifest(dir, "verify-scaling", to_json(run),
                   json{{"epsilons", epsilons},
                        {"checkpoints", checkpoints},
                        {"n_samples", n_samples},
                        {"significance", significance}},
                   run.sim.seed, {"scaling.csv"}, started);
    return 0;
}

int cmd_growth_rate(const CommonOpts& opts, std::size_t n_paths,
                    const std::vector<double>& window, bool self_test) {
    const std::string started = now_iso8601();
    RunConfig run = load_config(opts);
    if (window.size() != 2 || !(window[0] > 0.0) || !(window[0] < window[1])) {
        std::cerr << "error: --window needs t_lo,t_hi with 0 < t_lo < t_hi\n";
        return 2;
    }
    if (window[1] > run.sim.horizon) {
        std::cerr << "error: window end exceeds the horizon\n";
        return 2;
    }
    if (!regime_gate(run, opts.force)) return 3;
    fs::path dir = ensure_out_dir(opts);

    const double t_lo = window[0], t_hi = window[1];
    const DriftParams& drift = run.sim.drift;

    std::string csv = "path,classification,slope,intercept,r_squared,ratio_mean\n";
    json summary;

    if (self_test) {
        // Fit the exact extremal solution; the slope must reproduce the
        // theoretical exponent.
        GridPath exact;
        exact.dt = run.sim.dt;
        exact.values.resize(step_count(run.sim) + 1);
        for (std::size_t k = 0; k < exact.values.size(); ++k)
            exact.values[k] =
                exact_extremal_solution(exact.time_at(k), drift.c_plus, drift.alpha, +1);
        GrowthFit fit = growth_rate_fit(exact, t_lo, t_hi, drift, EscapeClass::Plus);
        RatioStats ratio = asymptotic_ratio(exact, drift.c_plus, drift.alpha, t_lo, t_hi);
        csv += "exact,plus," + fmt(fit.slope) + ',' + fmt(fit.intercept) + ',' +
               fmt(fit.r_squared) + ',' + fmt(ratio.mean) + '\n';
        summary = json{{"self_test", true},
                       {"slope", fit.slope},
                       {"theory_exponent", fit.theory_exponent},
                       {"theory_coefficient", fit.theory_coefficient},
                       {"ratio_mean", ratio.mean}};
    } else {
        if (n_paths == 0) {
            std::cerr << "error: --n-paths must be at least 1\n";
            return 2;
        }
        const double threshold =
            run.classify.threshold
                ? *run.classify.threshold
                : default_escape_threshold(
                      drift, (1.0 - run.classify.tail_fraction) * run.sim.horizon);

        struct Row {
            EscapeClass cls = EscapeClass::Undecided;
            GrowthFit fit;
            double ratio_mean = 0.0;
        };
        std::vector<Row> rows(n_paths);
        parallel_for_blocks(n_paths, opts.jobs, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                auto [noise_path, solution] = simulate_path(run.sim, i);
                Row row;
                row.cls = classify_escape(solution, threshold, run.classify.tail_fraction);
                if (row.cls != EscapeClass::Undecided) {
                    row.fit = growth_rate_fit(solution, t_lo, t_hi, drift, row.cls);
                    double c = row.cls == EscapeClass::Plus ? drift.c_plus : drift.c_minus;
                    RatioStats ratio =
                        asymptotic_ratio(solution, c, drift.alpha, t_lo, t_hi);
                    row.ratio_mean =
                        row.cls == EscapeClass::Plus ? ratio.mean : -ratio.mean;
                }
                rows[i] = row;
            }
        });

        std::vector<double> slopes_plus, ratios_plus;
        std::size_t n_plus = 0, n_minus = 0, n_undecided = 0;
        for (std::size_t i = 0; i < n_paths; ++i) {
            const Row& row = rows[i];
            const char* cls = row.cls == EscapeClass::Plus     ? "plus"
                              : row.cls == EscapeClass::Minus  ? "minus"
                                                               : "undecided";
            csv += std::to_string(i);
            csv += ',';
            csv += cls;
            if (row.cls == EscapeClass::Undecided) {
                csv += ",,,,\n";
                ++n_undecided;
                continue;
            }
            csv += ',' + fmt(row.fit.slope) + ',' + fmt(row.fit.intercept) + ',' +
                   fmt(row.fit.r_squared) + ',' + fmt(row.ratio_mean) + '\n';
            if (row.cls == EscapeClass::Plus) {
                ++n_plus;
                slopes_plus.push_back(row.fit.slope);
                ratios_plus.push_back(row.ratio_mean);
            } else {
                ++n_minus;
            }
        }

        summary = json{{"n_paths", n_paths},
                       {"n_plus", n_plus},
                       {"n_minus", n_minus},
                       {"n_undecided", n_undecided},
                       {"theory_exponent", 1.0 / (1.0 - drift.alpha)},
                       {"window", {t_lo, t_hi}}};
        if (!slopes_plus.empty()) {
            summary["median_slope_plus"] = median(slopes_plus);
            summary["median_ratio_mean_plus"] = median(ratios_plus);
        } else {
            summary["median_slope_plus"] = nullptr;
            summary["median_ratio_mean_plus"] = nullptr;
        }
    }

    write_text(dir / "growth.csv", csv);
    write_text(dir / "growth_summary.json", summary.dump(2) + "\n");
    write_manifest(dir, "growth-rate", to_json(run),
                   json{{"n_paths", n_paths},
                        {"window", window},
                        {"self_test", self_test}},
                   run.sim.seed, {"growth.csv", "growth_summary.json"}, started);
    return 0;
}

NoiseModel parse_model_spec(const std::string& spec) {
    auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    std::optional<double> param;
    if (colon != std::string::npos) {
        const std::string text = spec.substr(colon + 1);
        double value = 0.0;
        auto res = std::from_chars(text.data(), text.data() + text.size(), value);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size())
            throw ConfigError("invalid model parameter '" + text + "'");
        param = value;
    }
    if (kind == "brownian") {
        if (param) throw ConfigError("brownian takes no parameter");
        return NoiseModel::brownian();
    }
    if (kind == "stable") {
        if (!param) throw ConfigError("stable needs a stability index, e.g. stable:1.5");
        return NoiseModel::symmetric_stable(*param);
    }
    if (kind == "fbm") {
        if (!param) throw ConfigError("fbm needs a Hurst index, e.g. fbm:0.75");
        return NoiseModel::fractional_brownian(*param);
    }
    throw ConfigError("unknown model '" + kind + "' (use brownian, stable:<s>, fbm:<H>)");
}

int cmd_verify_noise(const CommonOpts& opts, const std::string& model_spec,
                     std::vector<std::string> checks, const std::vector<double>& scales,
                     double t, std::size_t n_samples, double significance) {
    const std::string started = now_iso8601();
    NoiseModel model = parse_model_spec(model_spec);
    const std::uint64_t seed = opts.seed.value_or(0);
    fs::path dir = ensure_out_dir(opts);

    if (checks.empty()) {
        checks = {"self-similarity", "envelope"};
        if (model.kind == NoiseModel::Kind::SymmetricStable) checks.push_back("cf");
        if (model.kind == NoiseModel::Kind::FractionalBrownian) checks.push_back("covariance");
    }

    std::string csv = "check,param1,param2,statistic,reference,p_value,passed\n";
    std::uint64_t stream_counter = 0;

    for (const std::string& check : checks) {
        if (check == "self-similarity") {
            for (double a : scales) {
                RngStream rng(seed, stream_counter++);
                TestReport report =
                    verify_self_similarity(model, a, t, n_samples, rng, significance);
                csv += "self-similarity," + fmt(a) + ',' + fmt(t) + ',' +
                       fmt(report.statistic) + ",," + fmt(report.p_value) + ',' +
                       (report.passed ? '1' : '0') + '\n';
            }
        } else if (check == "cf") {
            if (model.kind != NoiseModel::Kind::SymmetricStable)
                throw ConfigError("check 'cf' applies to stable noise only");
            const std::vector<double> lambdas{0.5, 1.0, 2.0};
            RngStream rng(seed, stream_counter++);
            auto cf_rows =
                verify_stable_cf(model.stability_index, lambdas, n_samples * 50, rng);
            for (const auto& row : cf_rows) {
                csv += "cf," + fmt(row.lambda) + ',' + fmt(model.stability_index) +
                       ',' + fmt(row.estimated) + ',' + fmt(row.expected) + ",," +
                       (row.within_3se ? '1' : '0') + '\n';
            }
        } else if (check == "covariance") {
            if (model.kind != NoiseModel::Kind::FractionalBrownian)
                throw ConfigError("check 'covariance' applies to fbm noise only");
            const std::vector<std::pair<std::size_t, std::size_t>> pairs{
                {1, 1}, {1, 2}, {2, 2}, {1, 4}, {3, 4}};
            RngStream rng(seed, stream_counter++);
            auto cov_rows =
                verify_fbm_covariance(model.hurst, 1.0, 4, pairs, n_samples, rng);
            for (const auto& row : cov_rows) {
                csv += "covariance," + fmt(row.s) + ',' + fmt(row.t) + ',' +
                       fmt(row.estimated) + ',' + fmt(row.expected) + ",," +
                       (row.within_3se ? '1' : '0') + '\n';
            }
        } else if (check == "envelope") {
            RngStream rng(seed, stream_counter++);
            GridPath path = sample_noise_path(model, t, 1000, rng);
            std::size_t count =
                envelope_violations(path, self_similarity_index(model), 1.0, 0.1);
            csv += "envelope,1,0.1," + std::to_string(count) + ",,,\n";
        } else {
            throw ConfigError("unknown check '" + check +
                              "' (use self-similarity, cf, covariance, envelope)");
        }
    }

    write_text(dir / "noise_checks.csv", csv);
    write_manifest(dir, "verify-noise",
                   json{{"model", model_spec},
                        {"t", t},
                        {"scales", scales},
                        {"n_samples", n_samples},
                        {"significance", significance}},
                   json{{"checks", checks}}, seed, {"noise_checks.csv"}, started);
    return 0;
}

int cmd_zero_noise_sweep(const CommonOpts& opts, const std::vector<double>& epsilons,
                         std::size_t n_paths) {
    const std::string started = now_iso8601();
    RunConfig run = load_config(opts);
    if (n_paths == 0) {
        std::cerr << "error: --n-paths must be at least 1\n";
        return 2;
    }
    if (!regime_gate(run, opts.force)) return 3;
    fs::path dir = ensure_out_dir(opts);

    auto table = zero_noise_sweep(run.sim, epsilons, n_paths, run.classify,
                                  opts.jobs, true);

    std::string csv =
        "epsilon,n_total,n_plus,n_minus,n_undecided,p_plus_hat,ci_low,ci_high\n";
    for (const auto& [eps, est] : table) {
        csv += fmt(eps) + ',' + std::to_string(est.n_total) + ',' +
               std::to_string(est.n_plus) + ',' + std::to_string(est.n_minus) + ',' +
               std::to_string(est.n_undecided) + ',';
        if (est.any_decided)
            csv += fmt(est.p_plus_hat) + ',' + fmt(est.ci_low) + ',' + fmt(est.ci_high);
        else
            csv += ",,";
        csv += '\n';
    }
    write_text(dir / "sweep.csv", csv);
    write_manifest(dir, "zero-noise-sweep", to_json(run),
                   json{{"epsilons", epsilons}, {"n_paths", n_paths}},
                   run.sim.seed, {"sweep.csv"}, started);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"zero-noise selection laboratory for singular-drift SDEs"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* simulate = app.add_subcommand("simulate", "simulate one path, write CSV");
    add_common(simulate, opts);

    auto* estimate = app.add_subcommand("estimate-p", "estimate selection probabilities");
    add_common(estimate, opts);
    std::size_t n_paths = 0;
    estimate->add_option("--n-paths", n_paths, "ensemble size")->required();

    auto* scaling = app.add_subcommand("verify-scaling",
                                       "KS-test the space-time rescaling identity");
    add_common(scaling, opts);
    std::vector<double> epsilons, checkpoints;
    std::size_t n_samples = 2000;
    double significance = 0.01;
    scaling->add_option("--epsilons", epsilons, "noise amplitudes")
        ->required()
        ->delimiter(',');
    scaling->add_option("--checkpoints", checkpoints, "comparison times")
        ->required()
        ->delimiter(',');
    scaling->add_option("--n-samples", n_samples, "samples per cell");
    scaling->add_option("--significance", significance, "KS significance level");

    auto* growth = app.add_subcommand("growth-rate", "fit the escape growth law");
    add_common(growth, opts);
    std::size_t growth_paths = 0;
    std::vector<double> window;
    bool self_test = false;
    growth->add_option("--n-paths", growth_paths, "ensemble size");
    growth->add_option("--window", window, "fit window t_lo,t_hi")
        ->required()
        ->delimiter(',');
    growth->add_flag("--self-test", self_test,
                     "fit the exact extremal solution instead of simulations");

    auto* noise_cmd = app.add_subcommand("verify-noise", "statistical noise checks");
    add_common(noise_cmd, opts, /*with_config=*/false);
    std::string model_spec;
    std::vector<std::string> check_names;
    std::vector<double> scales{0.5, 2.0, 10.0};
    double ss_t = 1.0;
    std::size_t noise_samples = 2000;
    double noise_significance = 0.01;
    noise_cmd->add_option("--model", model_spec, "brownian | stable:<s> | fbm:<H>")
        ->required();
    noise_cmd->add_option("--checks", check_names,
                          "subset of self-similarity,cf,covariance,envelope")
        ->delimiter(',');
    noise_cmd->add_option("--scales", scales, "self-similarity scale factors")
        ->delimiter(',');
    noise_cmd->add_option("--t", ss_t, "base time for the self-similarity check");
    noise_cmd->add_option("--n-samples", noise_samples, "samples per check");
    noise_cmd->add_option("--significance", noise_significance, "KS significance level");

    auto* sweep = app.add_subcommand("zero-noise-sweep",
                                     "selection estimates across amplitudes");
    add_common(sweep, opts);
    std::vector<double> sweep_epsilons;
    std::size_t sweep_paths = 0;
    sweep->add_option("--epsilons", sweep_epsilons, "noise amplitudes")
        ->required()
        ->delimiter(',');
    sweep->add_option("--n-paths", sweep_paths, "ensemble size per amplitude")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(opts);
        if (estimate->parsed()) return cmd_estimate_p(opts, n_paths);
        if (scaling->parsed())
            return cmd_verify_scaling(opts, epsilons, checkpoints, n_samples,
                                      significance);
        if (growth->parsed())
            return cmd_growth_rate(opts, growth_paths, window, self_test);
        if (noise_cmd->parsed())
            return cmd_verify_noise(opts, model_spec, check_names, scales, ss_t,
                                    noise_samples, noise_significance);
        if (sweep->parsed())
            return cmd_zero_noise_sweep(opts, sweep_epsilons, sweep_paths);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const RegimeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const DivergedError& e) {
        std::cerr << "error: " << e.what() << " (step " << e.step_index << ")\n";
        return 4;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
    return 2;
}
