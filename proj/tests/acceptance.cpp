// Acceptance gate: one pass/fail line per criterion, exit nonzero when any
// criterion fails. Each block states its configuration and tolerance inline;
// ensemble sizes and tolerances are fixed by the project contract and must
// not be loosened to make a run pass.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

#include "znsim/noise.h"
#include "znsim/scaling.h"
#include "znsim/sde.h"
#include "znsim/selection.h"
#include "znsim/stats.h"

using namespace znsim;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int number, const std::string& tag, bool pass, const std::string& detail) {
    std::printf("CRITERION %d %s: %s (%s)\n", number, tag.c_str(),
                pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

SimConfig brownian_base(double alpha, double c_plus, double c_minus,
                        std::uint64_t seed) {
    SimConfig config;
    config.drift = DriftParams{c_plus, c_minus, alpha};
    config.noise = NoiseModel::brownian();
    config.epsilon = 1.0;
    config.horizon = 1000.0;
    config.dt = 0.01;
    config.seed = seed;
    return config;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// 1. Symmetric Brownian selection: the Wilson CI of p_plus over 2000 paths
//    contains 1/2 and fewer than 2% of paths stay undecided.
void criterion_1() {
    SimConfig config = brownian_base(0.5, 1.0, 1.0, 2026);
    auto est = estimate_selection(config, 2000);
    double undecided = static_cast<double>(est.n_undecided) /
                       static_cast<double>(est.n_total);
    bool pass = est.any_decided && est.ci_low < 0.5 && 0.5 < est.ci_high &&
                undecided < 0.02;
    report(1, "selection-symmetry", pass,
           "p_hat=" + fmt(est.p_plus_hat) + " ci=[" + fmt(est.ci_low) + "," +
               fmt(est.ci_high) + "] undecided=" + fmt(100.0 * undecided) + "%");
}

// 2. Asymmetric Brownian selection against the scale-function oracle, at
//    alpha = 0 (closed form 2/3) and alpha = 0.5 (quadrature).
void criterion_2() {
    struct Case {
        double alpha, c_plus, c_minus;
        std::uint64_t seed;
    };
    const Case cases[] = {{0.0, 2.0, 1.0, 2027}, {0.5, 3.0, 1.0, 2028}};
    bool pass = true;
    std::string detail;
    for (const Case& c : cases) {
        SimConfig config = brownian_base(c.alpha, c.c_plus, c.c_minus, c.seed);
        auto est = estimate_selection(config, 2000);
        double oracle = scale_function_oracle(config.drift);
        bool ok = est.any_decided && est.ci_low <= oracle && oracle <= est.ci_high;
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += "alpha=" + fmt(c.alpha) + ": p_hat=" + fmt(est.p_plus_hat) +
                  " ci=[" + fmt(est.ci_low) + "," + fmt(est.ci_high) +
                  "] oracle=" + fmt(oracle);
    }
    report(2, "selection-oracle", pass, detail);
}

// 3. Stable-noise growth law: median log-log slope of Plus paths on [1e3,1e5]
//    within 5% of 2, median asymptotic ratio within [0.85, 1.15].
void criterion_3() {
    SimConfig config;
    config.drift = DriftParams{1.0, 1.0, 0.5};
    config.noise = NoiseModel::symmetric_stable(4.0 / 3.0);
    config.epsilon = 1.0;
    config.horizon = 1e5;
    config.dt = 0.1;
    config.seed = 2029;

    const std::size_t n_paths = 200;
    const double threshold = default_escape_threshold(config.drift, 0.8 * config.horizon);
    std::vector<double> slopes, ratios;
    std::size_t n_minus = 0, n_undecided = 0;
    for (std::size_t i = 0; i < n_paths; ++i) {
        const GridPath solution = simulate_path(config, i).second;
        EscapeClass cls = classify_escape(solution, threshold, 0.2);
        if (cls == EscapeClass::Plus) {
            auto fit = growth_rate_fit(solution, 1e3, 1e5, config.drift, cls);
            slopes.push_back(fit.slope);
            ratios.push_back(asymptotic_ratio(solution, 1.0, 0.5, 1e3, 1e5).mean);
        } else if (cls == EscapeClass::Minus) {
            ++n_minus;
        } else {
            ++n_undecided;
        }
    }
    bool pass = false;
    std::string detail;
    if (slopes.empty()) {
        detail = "no path classified Plus";
    } else {
        double slope = median(slopes);
        double ratio = median(ratios);
        pass = std::abs(slope - 2.0) <= 0.1 && ratio >= 0.85 && ratio <= 1.15;
        detail = "n_plus=" + std::to_string(slopes.size()) + " n_minus=" +
                 std::to_string(n_minus) + " n_undecided=" + std::to_string(n_undecided) +
                 " median_slope=" + fmt(slope) + " median_ratio=" + fmt(ratio);
    }
    report(3, "growth-law", pass, detail);
}

// 4. Scaling invariance: rescaled marginals at eps in {0.5, 0.1} KS-match the
//    amplitude-1 marginals at t in {0.5, 1, 2}; at most one failing cell.
void criterion_4() {
    SimConfig config = brownian_base(0.5, 1.0, 1.0, 2030);
    config.horizon = 2.0;
    config.dt = 0.01;
    auto cells = verify_scaling_invariance(config, {0.5, 0.1}, {0.5, 1.0, 2.0}, 2000,
                                           0.01);
    int failures = 0;
    std::string detail;
    for (const auto& cell : cells) {
        if (!cell.report.passed) ++failures;
        if (!detail.empty()) detail += " ";
        detail += "eps=" + fmt(cell.epsilon) + ",t=" + fmt(cell.t) + ",p=" +
                  fmt(cell.report.p_value);
    }
    report(4, "scaling-invariance", failures <= 1,
           detail + " failures=" + std::to_string(failures) + "/6");
}

// Integrate with the step halved until the window ratio stabilizes to 1e-4.
double stable_ratio(double alpha, const std::function<double(double)>& g) {
    double dt = 1.0;
    double previous = 0.0;
    bool have_previous = false;
    for (int halving = 0; halving < 8; ++halving) {
        GridPath path = integrate_perturbed_ode(1.0, 1.0, alpha, g, 1e6, dt,
                                                default_drift_floor(alpha, dt));
        double ratio = asymptotic_ratio(path, 1.0, alpha, 1e5, 1e6).mean;
        if (have_previous && std::abs(ratio - previous) < 1e-4) return ratio;
        previous = ratio;
        have_previous = true;
        dt *= 0.5;
    }
    return previous;
}

// 5. Deterministic asymptotics under sub-extremal forcing: the solution tracks
//    the extremal branch to within 2% in ratio, for alpha = 0.5 and -0.5.
void criterion_5() {
    double r1 = stable_ratio(0.5, [](double t) { return std::pow(t, 0.4); });
    double r2 = stable_ratio(-0.5, [](double t) { return std::pow(t, 0.3); });
    bool pass = std::abs(r1 - 1.0) <= 0.02 && std::abs(r2 - 1.0) <= 0.02;
    report(5, "ode-asymptotics", pass,
           "ratio(alpha=0.5)=" + fmt(r1) + " ratio(alpha=-0.5)=" + fmt(r2));
}

// 6. Forced non-extremal solution: g(t) = -t^{3/2}/1.5 + t makes y(t) = t an
//    exact solution; the integrator must reproduce it to 1e-3 in sup norm.
//    The increment-form Euler scheme carries an amplified first-order error
//    of about (dt/4) e^{sqrt(T)} 2(1 - e^{-sqrt(T)}) for this forcing, which
//    exceeds the bound at dt = 1e-4 on [0, 10]; the halved-step error is
//    reported alongside to document the clean first-order constant.
void criterion_6() {
    auto g = [](double t) { return -std::pow(t, 1.5) / 1.5 + t; };
    auto exact = [](double t) { return t; };
    GridPath path = integrate_perturbed_ode(0.0, 1.0, 0.5, g, 10.0, 1e-4);
    double sup = sup_distance(path, exact);
    GridPath half = integrate_perturbed_ode(0.0, 1.0, 0.5, g, 10.0, 5e-5);
    double sup_half = sup_distance(half, exact);
    report(6, "ode-counterexample", sup <= 1e-3,
           "sup_error=" + fmt(sup) + " bound=0.001 half_step_error=" + fmt(sup_half) +
               " ratio=" + fmt(sup / sup_half));
}

// 7. Zoom rescaling of f(t) = t^2 + 10t: distance to t^2 on [0,1] decreases in
//    n and matches 10/sqrt(n) at t = 1 within 1%.
void criterion_7() {
    GridPath src;
    src.dt = 1e-3;
    src.values.resize(100001);
    for (std::size_t k = 0; k < src.values.size(); ++k) {
        double t = src.time_at(k);
        src.values[k] = t * t + 10.0 * t;
    }
    bool monotone = true, matches = true;
    double previous = 1e300;
    std::string detail;
    for (double n : {100.0, 1000.0, 10000.0}) {
        GridPath zoomed = zoom_rescale(src, n, 2.0, 1.0);
        double d = sup_distance(zoomed, [](double t) { return t * t; });
        double at_one = std::abs(value_near(zoomed, 1.0) - 1.0);
        double closed_form = 10.0 / std::sqrt(n);
        monotone = monotone && d < previous;
        matches = matches && std::abs(at_one - closed_form) <= 0.01 * closed_form;
        previous = d;
        if (!detail.empty()) detail += " ";
        detail += "n=" + fmt(n) + ":d=" + fmt(d);
    }
    report(7, "zoom-rescaling", monotone && matches, detail);
}

// 8. Noise validity: fBm covariance within 3 SE, stable characteristic
//    function within 3 SE, self-similarity KS checks for all three models.
void criterion_8() {
    bool pass = true;
    std::string detail;

    const std::vector<std::pair<std::size_t, std::size_t>> pairs{
        {1, 1}, {1, 2}, {2, 2}, {1, 4}, {3, 4}};
    int cov_fail = 0;
    std::uint64_t stream = 0;
    for (double hurst : {0.3, 0.75}) {
        RngStream rng(2031, stream++);
        for (const auto& row : verify_fbm_covariance(hurst, 1.0, 4, pairs, 40000, rng))
            cov_fail += !row.within_3se;
    }
    pass = pass && cov_fail == 0;
    detail += "fbm_cov_fail=" + std::to_string(cov_fail) + "/10";

    int cf_fail = 0;
    const std::vector<double> lambdas{0.5, 1.0, 2.0};
    for (double s : {1.0, 4.0 / 3.0, 1.8}) {
        RngStream rng(2032, stream++);
        for (const auto& row : verify_stable_cf(s, lambdas, 100000, rng))
            cf_fail += !row.within_3se;
    }
    pass = pass && cf_fail == 0;
    detail += " stable_cf_fail=" + std::to_string(cf_fail) + "/9";

    int ss_fail = 0;
    NoiseModel models[] = {NoiseModel::brownian(), NoiseModel::symmetric_stable(4.0 / 3.0),
                           NoiseModel::fractional_brownian(0.75)};
    for (const auto& model : models) {
        for (double a : {0.5, 2.0, 10.0}) {
            RngStream rng(2033, stream++);
            ss_fail += !verify_self_similarity(model, a, 1.0, 2000, rng, 0.01).passed;
        }
    }
    pass = pass && ss_fail == 0;
    detail += " self_similarity_fail=" + std::to_string(ss_fail) + "/9";

    report(8, "noise-validity", pass, detail);
}

// 9. Determinism across parallelism: the estimate-p command must produce
//    byte-identical JSON for --jobs 1 and --jobs 8.
void criterion_9() {
    fs::path base = fs::temp_directory_path() / "znsim-acceptance-determinism";
    fs::remove_all(base);
    fs::create_directories(base);
    fs::path config_file = base / "config.json";
    {
        std::ofstream out(config_file);
        out << R"({
  "drift": {"c_plus": 2.0, "c_minus": 1.0, "alpha": 0.5},
  "noise": {"kind": "brownian"},
  "epsilon": 1.0,
  "x0": 0.0,
  "horizon": 50.0,
  "dt": 0.01,
  "seed": 123
})";
    }

    auto run = [&](const std::string& jobs, const fs::path& out_dir) {
        std::string cmd = std::string(ZNSIM_CLI_PATH) + " estimate-p --config " +
                          config_file.string() + " --out " + out_dir.string() +
                          " --n-paths 200 --jobs " + jobs + " >/dev/null 2>&1";
        int status = std::system(cmd.c_str());
        return status != -1 && WIFEXITED(status) && WEXITSTATUS(status) == 0;
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };

    bool ok1 = run("1", base / "j1");
    bool ok8 = run("8", base / "j8");
    std::string a = slurp(base / "j1" / "estimate.json");
    std::string b = slurp(base / "j8" / "estimate.json");
    bool pass = ok1 && ok8 && !a.empty() && a == b;
    report(9, "determinism", pass,
           std::string("exit_ok=") + (ok1 && ok8 ? "yes" : "no") + " bytes_equal=" +
               (a == b && !a.empty() ? "yes" : "no"));
}

} // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    auto seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
    std::printf("%s: %d of 9 criteria passed in %.1f s\n",
                g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL", 9 - g_failures,
                seconds.count());
    return g_failures == 0 ? 0 : 1;
}
