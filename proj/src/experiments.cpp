#include "graphonflow/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "graphonflow/metrics.hpp"
#include "graphonflow/ops.hpp"
#include "graphonflow/rng.hpp"

namespace gf {

namespace {

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void ensure_dir(const std::string& dir) {
    if (!dir.empty()) std::filesystem::create_directories(dir);
}

Verdict make_verdict(const std::string& name, double value, double threshold,
                     const std::string& cmp) {
    Verdict v{name, value, threshold, cmp, false};
    v.pass = (cmp == "<=") ? value <= threshold : value >= threshold;
    return v;
}

}  // namespace

bool ExperimentReport::all_pass() const {
    for (const auto& v : verdicts)
        if (!v.pass) return false;
    return true;
}

nlohmann::json ExperimentReport::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["config"] = config;
    j["metrics"] = metrics;
    j["verdicts"] = nlohmann::json::array();
    for (const auto& v : verdicts)
        j["verdicts"].push_back({{"name", v.name},
                                 {"value", v.value},
                                 {"threshold", v.threshold},
                                 {"comparison", v.comparison},
                                 {"pass", v.pass}});
    j["wall_time_s"] = wall_time_s;
    return j;
}

void ExperimentReport::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write report '" + path + "'");
    out << to_json().dump(2) << "\n";
}

std::string format_trajectory_csv(const FlowTrajectory& traj) {
    std::string s = "t,f,slope,residual\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        s += num(traj.times[i]) + "," + num(traj.f_values[i]) + "," + num(traj.slopes[i]) + "," +
             num(traj.step_residuals[i]) + "\n";
    }
    return s;
}

void write_trajectory_csv(const FlowTrajectory& traj, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write trajectory '" + path + "'");
    out << format_trajectory_csv(traj);
}

bool fit_exponential_rate(const std::vector<double>& ts, const std::vector<double>& ds,
                          double& rate) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!(ds[i] > 1e-300)) return false;
        const double y = std::log(ds[i]);
        sx += ts[i];
        sy += y;
        sxx += ts[i] * ts[i];
        sxy += ts[i] * y;
        ++n;
    }
    if (n < 2) return false;
    const double denom = n * sxx - sx * sx;
    if (std::fabs(denom) < 1e-300) return false;
    rate = -(n * sxy - sx * sy) / denom;
    return true;
}

StepKernel mantel_initial_kernel(int k, std::uint64_t seed) {
    Rng rng(seed);
    const double a = rng.uniform(0.2, 0.4);
    std::vector<double> v(static_cast<std::size_t>(k) * k);
    std::vector<double> c(k);
    for (int i = 0; i < k; ++i) c[i] = std::cos(M_PI * (i + 0.5) / k);
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
            const double noise = rng.uniform(-0.1, 0.1);
            double x = 0.5 - a * c[i] * c[j] + noise;
            x = std::min(1.0, std::max(0.0, x));
            v[static_cast<std::size_t>(i) * k + j] = x;
            v[static_cast<std::size_t>(j) * k + i] = x;
        }
    return StepKernel(k, std::move(v), Box{0.0, 1.0});
}

StepKernel bipartite_half_kernel(int k) {
    const int h = k / 2;
    std::vector<double> v(static_cast<std::size_t>(k) * k, 0.0);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if ((i < h) != (j < h)) v[static_cast<std::size_t>(i) * k + j] = 1.0;
    return StepKernel(k, std::move(v), Box{0.0, 1.0});
}

ExperimentReport cmd_mantel(const MantelConfig& cfg) {
    const double t0 = now_s();
    ensure_dir(cfg.out_dir);
    const FunctionalSpec spec = FunctionalSpec::mantel(Box{0.0, 1.0});
    const StepKernel bip = bipartite_half_kernel(cfg.k);
    const SimpleGraph tri = triangle_graph(), edge = edge_graph();

    ExperimentReport rep;
    rep.command = "mantel";
    rep.config = {{"k", cfg.k},
                  {"tau", cfg.tau},
                  {"steps", cfg.steps},
                  {"panel_steps", cfg.panel_steps},
                  {"seeds", cfg.seeds},
                  {"scheme", "forward"},
                  {"objective", "t_triangle - t_edge/10"},
                  {"box", {0.0, 1.0}},
                  {"t_triangle_max", cfg.t_triangle_max},
                  {"dcut_max", cfg.dcut_max}};
    rep.metrics["per_seed"] = nlohmann::json::array();

    int n_pass = 0;
    for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
        const std::uint64_t seed = cfg.seeds[si];
        StepKernel w = mantel_initial_kernel(cfg.k, seed);
        const std::string tag = cfg.out_dir.empty()
                                    ? ""
                                    : cfg.out_dir + "/seed" + std::to_string(seed) + "_";
        if (!tag.empty()) write_kernel_pgm(w, tag + "step0.pgm");

        FlowTrajectory traj;
        traj.scheme = FlowScheme::Forward;
        traj.tau = cfg.tau;
        auto record = [&](int step) {
            traj.times.push_back(step * cfg.tau);
            traj.f_values.push_back(evaluate(spec, w));
            traj.slopes.push_back(local_slope(spec, w));
            traj.step_residuals.push_back(0.0);
        };
        record(0);
        std::size_t next_panel = 0;
        for (int step = 1; step <= cfg.steps; ++step) {
            w = forward_step(spec, w, cfg.tau).kernel;
            if (step % 100 == 0 || step == cfg.steps) record(step);
            if (next_panel < cfg.panel_steps.size() && step == cfg.panel_steps[next_panel]) {
                if (!tag.empty())
                    write_kernel_pgm(w, tag + "step" + std::to_string(step) + ".pgm");
                ++next_panel;
            }
        }
        if (!tag.empty()) {
            write_trajectory_csv(traj, tag + "trajectory.csv");
            write_kernel_csv(w, tag + "final.csv");
        }

        const double t_tri = hom_density(tri, w);
        const double t_edge = hom_density(edge, w);
        MetricSearchConfig mcfg;
        mcfg.seed = seed;
        mcfg.restarts = cfg.metric_restarts;
        const auto dcut = delta_cut_heuristic(w, bip, mcfg);
        const bool ok = t_tri <= cfg.t_triangle_max && dcut.upper_bound <= cfg.dcut_max;
        n_pass += ok ? 1 : 0;
        rep.metrics["per_seed"].push_back({{"seed", seed},
                                           {"t_triangle", t_tri},
                                           {"t_edge", t_edge},
                                           {"dcut_to_bipartite", dcut.upper_bound},
                                           {"pass", ok}});
    }
    rep.metrics["panel_steps"] = cfg.panel_steps;
    rep.verdicts.push_back(make_verdict("seeds_passing", n_pass, cfg.min_passing_seeds, ">="));
    rep.wall_time_s = now_s() - t0;
    if (!cfg.out_dir.empty()) rep.write(cfg.out_dir + "/report.json");
    return rep;
}

ExperimentReport cmd_entropy_rate(const EntropyRateConfig& cfg) {
    const double t0 = now_s();
    ensure_dir(cfg.out_dir);
    const FunctionalSpec spec = FunctionalSpec::entropy(cfg.box);
    const StepKernel w0 = StepKernel::constant(cfg.k, cfg.w0, cfg.box);
    FlowConfig fc;
    fc.scheme = FlowScheme::Forward;
    fc.tau = cfg.tau;
    fc.n_steps = cfg.steps;
    fc.record_every = cfg.record_every;
    const FlowTrajectory traj = run_flow(spec, w0, fc);

    const StepKernel half = StepKernel::constant(cfg.k, 0.5, cfg.box);
    std::vector<double> dists(traj.kernels.size());
    for (std::size_t i = 0; i < traj.kernels.size(); ++i)
        dists[i] = std::sqrt(l2_sq_identity(traj.kernels[i], half));

    ExperimentReport rep;
    rep.command = "entropy-rate";
    rep.config = {{"k", cfg.k},          {"w0", cfg.w0},
                  {"tau", cfg.tau},      {"steps", cfg.steps},
                  {"record_every", cfg.record_every},
                  {"box", {cfg.box.lo, cfg.box.hi}}};

    double rate = 0.0;
    const bool fitted = fit_exponential_rate(traj.times, dists, rate);
    if (!fitted) {
        rep.metrics["rate"] = "not-applicable";
        rep.metrics["d0"] = dists.empty() ? 0.0 : dists.front();
    } else {
        double worst_ratio = 0.0;  // d(t) / (slack * e^{-4t} d0)
        for (std::size_t i = 0; i < dists.size(); ++i) {
            const double bound = cfg.bound_slack * std::exp(-4.0 * traj.times[i]) * dists[0];
            worst_ratio = std::max(worst_ratio, dists[i] / bound);
        }
        rep.metrics["rate"] = rate;
        rep.metrics["bound_worst_ratio"] = worst_ratio;
        rep.verdicts.push_back(make_verdict("fitted_rate", rate, cfg.rate_min, ">="));
        rep.verdicts.push_back(make_verdict("contraction_bound_ratio", worst_ratio, 1.0, "<="));
    }
    rep.wall_time_s = now_s() - t0;
    if (!cfg.out_dir.empty()) {
        write_trajectory_csv(traj, cfg.out_dir + "/trajectory.csv");
        rep.write(cfg.out_dir + "/report.json");
    }
    return rep;
}

StepKernel convergence_reference_kernel(int k_ref, Box box) {
    std::vector<double> v(static_cast<std::size_t>(k_ref) * k_ref);
    for (int i = 0; i < k_ref; ++i)
        for (int j = 0; j < k_ref; ++j) {
            const double x = (i + 0.5) / k_ref, y = (j + 0.5) / k_ref;
            v[static_cast<std::size_t>(i) * k_ref + j] = 0.25 + 0.5 * x * y;
        }
    return StepKernel(k_ref, std::move(v), box);
}

ExperimentReport cmd_convergence(const ConvergenceConfig& cfg) {
    const double t0 = now_s();
    ensure_dir(cfg.out_dir);
    const FunctionalSpec spec = FunctionalSpec::entropy(cfg.box);
    const StepKernel w_ref = convergence_reference_kernel(cfg.k_ref, cfg.box);

    ConvergenceStudyConfig scfg;
    scfg.flow.scheme = FlowScheme::Forward;
    scfg.flow.tau = cfg.tau;
    scfg.metric.seed = cfg.seed;
    const auto rows = convergence_study(spec, w_ref, cfg.ks, cfg.t_checks, scfg);

    ExperimentReport rep;
    rep.command = "convergence";
    rep.config = {{"k_ref", cfg.k_ref}, {"ks", cfg.ks},   {"t_checks", cfg.t_checks},
                  {"tau", cfg.tau},     {"seed", cfg.seed}, {"box", {cfg.box.lo, cfg.box.hi}},
                  {"spec", "entropy"},  {"w_ref", "0.25+0.5xy"}};
    rep.metrics["table"] = nlohmann::json::array();
    for (const auto& r : rows)
        rep.metrics["table"].push_back({{"k", r.k}, {"t", r.t}, {"distance", r.distance}});

    // distances should shrink as k refines, at each fixed t
    int inversions = 0;
    for (double t : cfg.t_checks) {
        double prev = -1.0;
        for (int k : cfg.ks) {
            for (const auto& r : rows)
                if (r.k == k && r.t == t) {
                    if (prev >= 0.0 && r.distance > prev + 1e-12) ++inversions;
                    prev = r.distance;
                }
        }
    }
    rep.metrics["inversions"] = inversions;
    rep.verdicts.push_back(make_verdict("monotone_inversions", inversions, cfg.max_inversions, "<="));
    rep.wall_time_s = now_s() - t0;
    if (!cfg.out_dir.empty()) rep.write(cfg.out_dir + "/report.json");
    return rep;
}

}  // namespace gf
