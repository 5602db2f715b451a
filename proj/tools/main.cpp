// graphonflow command line: gradient flows of invariant functionals on
// step-kernel graphons, metric estimation, sampling, and the bundled
// experiment recipes.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "graphonflow/experiments.hpp"
#include "graphonflow/flow.hpp"
#include "graphonflow/functionals.hpp"
#include "graphonflow/metrics.hpp"
#include "graphonflow/sampling.hpp"

using nlohmann::json;
using namespace gf;

namespace {

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// Optional JSON config file; a flag that was given on the command line wins
// over the file value (logged).
struct Overlay {
    json values;
    bool loaded = false;

    void load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        try {
            in >> values;
        } catch (const std::exception& e) {
            throw ConfigError("config file parse error: " + std::string(e.what()));
        }
        loaded = true;
    }

    template <typename T>
    void apply(const CLI::App& cmd, const std::string& flag, T& var) const {
        if (!loaded || !values.contains(flag)) return;
        const auto* opt = cmd.get_option_no_throw("--" + flag);
        if (opt && opt->count() > 0) {
            std::cerr << "config value for --" << flag << " overridden by flag\n";
            return;
        }
        var = values[flag].get<T>();
    }
};

std::vector<std::uint64_t> parse_u64_list(const std::string& s) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

json alignment_json(double lower, double upper, const Permutation& perm, double wall) {
    json p = json::array();
    for (int x : perm.map) p.push_back(x + 1);
    return json{{"lower_bound", lower}, {"upper_bound", upper}, {"permutation", p},
                {"wall_time", wall}};
}

void print_verdicts(const ExperimentReport& rep) {
    for (const auto& v : rep.verdicts)
        std::printf("[%s] %s: %.6g %s %.6g\n", v.pass ? "PASS" : "FAIL", v.name.c_str(),
                    v.value, v.comparison.c_str(), v.threshold);
}

int run(int argc, char** argv) {
    CLI::App app{"gradient flows on graphons: simulation, metrics, sampling"};
    app.require_subcommand(1);

    // ---- metric ----
    auto* metric = app.add_subcommand("metric", "cut/L2 metric between two kernels");
    std::string m_kind = "l2", m_a, m_b, m_config;
    bool m_exact = false, m_heur = false;
    std::uint64_t m_seed = 0;
    int m_restarts = 20;
    metric->add_option("--kind", m_kind, "cut|l2")->check(CLI::IsMember({"cut", "l2"}));
    metric->add_flag("--exact", m_exact, "brute-force permutation oracle (small sizes)");
    metric->add_flag("--heuristic", m_heur, "heuristic search (default)");
    metric->add_option("a", m_a, "first kernel csv")->required();
    metric->add_option("b", m_b, "second kernel csv")->required();
    metric->add_option("--seed", m_seed, "search seed");
    metric->add_option("--restarts", m_restarts, "annealing restarts");
    metric->add_option("--config", m_config, "json config file");
    metric->callback([&] {
        Overlay ov;
        if (!m_config.empty()) ov.load(m_config);
        ov.apply(*metric, "seed", m_seed);
        ov.apply(*metric, "restarts", m_restarts);
        if (m_exact && m_heur) throw ConfigError("choose one of --exact/--heuristic");
        const auto a = read_kernel_csv(m_a);
        const auto b = read_kernel_csv(m_b);
        const double t0 = now_s();
        json out;
        if (m_exact) {
            const Alignment al = m_kind == "cut" ? delta_cut_bruteforce(a, b)
                                                 : delta2_bruteforce(a, b);
            out = alignment_json(al.achieved_value, al.achieved_value, al.perm, now_s() - t0);
        } else {
            MetricSearchConfig cfg;
            cfg.seed = m_seed;
            cfg.restarts = m_restarts;
            const MetricEstimate est = m_kind == "cut" ? delta_cut_heuristic(a, b, cfg)
                                                       : delta2_heuristic(a, b, cfg);
            out = alignment_json(est.lower_bound, est.upper_bound, est.alignment.perm,
                                 now_s() - t0);
        }
        std::cout << out.dump(2) << "\n";
    });

    // ---- functional ----
    auto* fun = app.add_subcommand("functional", "evaluate F, its derivative, slope or lambda");
    std::string f_spec, f_kernel, f_what = "value";
    fun->add_option("--spec", f_spec, "spec.json")->required();
    fun->add_option("--kernel", f_kernel, "kernel csv")->required();
    fun->add_option("--what", f_what, "value|derivative|slope|lambda")
        ->check(CLI::IsMember({"value", "derivative", "slope", "lambda"}));
    fun->callback([&] {
        const auto spec = load_functional_spec(f_spec);
        const auto w = read_kernel_csv(f_kernel);
        json out;
        if (f_what == "value") {
            out = {{"value", evaluate(spec, w)}};
        } else if (f_what == "slope") {
            out = {{"slope", local_slope(spec, w)}};
        } else if (f_what == "lambda") {
            const auto r = semiconvexity_constant(spec);
            out = {{"lambda", r.lambda},
                   {"lambda_crude", r.lambda_crude},
                   {"known", r.known},
                   {"notes", r.notes}};
        } else {
            const auto phi = derivative(spec, w);
            json rows = json::array();
            for (int i = 0; i < phi.k; ++i) {
                json row = json::array();
                for (int j = 0; j < phi.k; ++j) row.push_back(phi.at(i, j));
                rows.push_back(row);
            }
            out = {{"k", phi.k}, {"values", rows}};
        }
        std::cout << out.dump(2) << "\n";
    });

    // ---- flow ----
    auto* flow = app.add_subcommand("flow", "run a gradient flow and write artifacts");
    std::string fl_spec, fl_init, fl_scheme = "forward", fl_out, fl_config;
    double fl_tau = 1e-3;
    int fl_steps = 1000, fl_record = 100;
    flow->add_option("--spec", fl_spec, "spec.json")->required();
    flow->add_option("--init", fl_init, "initial kernel csv")->required();
    flow->add_option("--scheme", fl_scheme, "forward|implicit")
        ->check(CLI::IsMember({"forward", "implicit"}));
    flow->add_option("--tau", fl_tau, "step size (graphon time)");
    flow->add_option("--steps", fl_steps, "number of steps");
    flow->add_option("--record-every", fl_record, "recording stride");
    flow->add_option("--out", fl_out, "output directory")->required();
    flow->add_option("--config", fl_config, "json config file");
    flow->callback([&] {
        Overlay ov;
        if (!fl_config.empty()) ov.load(fl_config);
        ov.apply(*flow, "tau", fl_tau);
        ov.apply(*flow, "steps", fl_steps);
        ov.apply(*flow, "record-every", fl_record);
        const auto spec = load_functional_spec(fl_spec);
        const auto w0 = read_kernel_csv(fl_init);
        FlowConfig cfg;
        cfg.scheme = fl_scheme == "implicit" ? FlowScheme::Implicit : FlowScheme::Forward;
        cfg.tau = fl_tau;
        cfg.n_steps = fl_steps;
        cfg.record_every = fl_record;
        const auto traj = run_flow(spec, w0, cfg);
        std::filesystem::create_directories(fl_out);
        write_trajectory_csv(traj, fl_out + "/trajectory.csv");
        for (std::size_t i = 0; i < traj.kernels.size(); ++i) {
            const long step = std::lround(traj.times[i] / cfg.tau);
            const std::string base = fl_out + "/snapshot_" + std::to_string(step);
            write_kernel_csv(traj.kernels[i], base + ".csv");
            write_kernel_pgm(traj.kernels[i], base + ".pgm");
        }
        if (traj.failed) throw NonConvergenceError(traj.error);
        std::cout << "wrote " << traj.kernels.size() << " snapshots to " << fl_out << "\n";
    });

    // ---- sample ----
    auto* sample = app.add_subcommand("sample", "sample random weighted graphs G_k[W]");
    std::string s_kernel, s_out;
    int s_k = 4;
    std::int64_t s_n = 1;
    std::uint64_t s_seed = 0;
    sample->add_option("--kernel", s_kernel)->required();
    sample->add_option("--k", s_k, "vertices per sample");
    sample->add_option("--n", s_n, "number of samples");
    sample->add_option("--seed", s_seed);
    sample->add_option("--out", s_out, "output csv")->required();
    sample->callback([&] {
        const auto w = read_kernel_csv(s_kernel);
        std::ofstream out(s_out, std::ios::binary);
        if (!out) throw ConfigError("cannot write '" + s_out + "'");
        out << "sample";
        for (int i = 0; i < s_k; ++i) out << ",latent_" << (i + 1);
        for (int i = 0; i < s_k; ++i)
            for (int j = 0; j < s_k; ++j) out << ",w_" << (i + 1) << "_" << (j + 1);
        out << "\n";
        char buf[40];
        for (std::int64_t s = 0; s < s_n; ++s) {
            const auto g = sample_graph(w, s_k, derive_seed(s_seed, s));
            out << s;
            for (double u : g.latents) {
                std::snprintf(buf, sizeof buf, "%.17g", u);
                out << "," << buf;
            }
            for (double x : g.weights) {
                std::snprintf(buf, sizeof buf, "%.17g", x);
                out << "," << buf;
            }
            out << "\n";
        }
        std::cout << "wrote " << s_n << " samples to " << s_out << "\n";
    });

    // ---- mc-density ----
    auto* mc = app.add_subcommand("mc-density", "Monte-Carlo homomorphism density");
    std::string mc_graph, mc_kernel;
    std::int64_t mc_n = 100000;
    std::uint64_t mc_seed = 0;
    mc->add_option("--graph", mc_graph, "motif file or builtin name")->required();
    mc->add_option("--kernel", mc_kernel)->required();
    mc->add_option("--n", mc_n);
    mc->add_option("--seed", mc_seed);
    mc->callback([&] {
        const auto h = read_graph_file(mc_graph);
        const auto w = read_kernel_csv(mc_kernel);
        const auto est = mc_hom_density(h, w, mc_n, mc_seed);
        std::cout << json{{"mean", est.mean}, {"stderr", est.stderr_}, {"n", est.n_samples}}
                         .dump(2)
                  << "\n";
    });

    // ---- mantel ----
    auto* mantel = app.add_subcommand("mantel", "triangle-vs-edge flow (figure protocol)");
    MantelConfig mconf;
    std::string ma_seeds = "1,2,3,4,5", ma_config;
    mantel->add_option("--k", mconf.k);
    mantel->add_option("--tau", mconf.tau);
    mantel->add_option("--steps", mconf.steps);
    mantel->add_option("--seeds", ma_seeds, "comma-separated seed list");
    mantel->add_option("--out", mconf.out_dir)->required();
    mantel->add_option("--restarts", mconf.metric_restarts);
    mantel->add_option("--config", ma_config, "json config file");
    mantel->callback([&] {
        Overlay ov;
        if (!ma_config.empty()) ov.load(ma_config);
        ov.apply(*mantel, "k", mconf.k);
        ov.apply(*mantel, "tau", mconf.tau);
        ov.apply(*mantel, "steps", mconf.steps);
        ov.apply(*mantel, "seeds", ma_seeds);
        mconf.seeds = parse_u64_list(ma_seeds);
        const auto rep = cmd_mantel(mconf);
        print_verdicts(rep);
        std::cout << "report: " << mconf.out_dir << "/report.json\n";
    });

    // ---- entropy-rate ----
    auto* er = app.add_subcommand("entropy-rate", "fit the entropy-flow contraction rate");
    EntropyRateConfig econf;
    er->add_option("--k", econf.k);
    er->add_option("--w0", econf.w0);
    er->add_option("--tau", econf.tau);
    er->add_option("--steps", econf.steps);
    er->add_option("--record-every", econf.record_every);
    er->add_option("--out", econf.out_dir)->required();
    er->callback([&] {
        const auto rep = cmd_entropy_rate(econf);
        print_verdicts(rep);
        if (rep.metrics.contains("rate") && rep.metrics["rate"].is_string())
            std::cout << "rate: not-applicable (start at the minimizer)\n";
        std::cout << "report: " << econf.out_dir << "/report.json\n";
    });

    // ---- convergence ----
    auto* conv = app.add_subcommand("convergence", "discrete-to-continuum distance table");
    ConvergenceConfig cconf;
    std::string c_ks = "8,16,32,64", c_ts = "0.1,0.5,1.0";
    conv->add_option("--k-ref", cconf.k_ref);
    conv->add_option("--ks", c_ks, "comma-separated sizes");
    conv->add_option("--times", c_ts, "comma-separated check times");
    conv->add_option("--tau", cconf.tau);
    conv->add_option("--seed", cconf.seed);
    conv->add_option("--out", cconf.out_dir)->required();
    conv->callback([&] {
        cconf.ks.clear();
        for (auto s : parse_u64_list(c_ks)) cconf.ks.push_back(static_cast<int>(s));
        cconf.t_checks.clear();
        {
            std::stringstream ss(c_ts);
            std::string item;
            while (std::getline(ss, item, ',')) cconf.t_checks.push_back(std::stod(item));
        }
        const auto rep = cmd_convergence(cconf);
        print_verdicts(rep);
        for (const auto& row : rep.metrics["table"])
            std::printf("k=%3d t=%.3f dcut=%.6f\n", row["k"].get<int>(), row["t"].get<double>(),
                        row["distance"].get<double>());
        std::cout << "report: " << cconf.out_dir << "/report.json\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // bad flags are config errors
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NonConvergenceError& e) {
        std::cerr << "non-convergence: " << e.what() << "\n";
        return 4;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
