#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphonflow/flow.hpp"
#include "graphonflow/kernel.hpp"

namespace gf {

// Aggregated experiment output; serialized as report.json (see
// docs/report.schema.json). Every verdict carries the threshold it was
// checked against.
struct Verdict {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    std::string comparison;  // "<=" or ">="
    bool pass = false;
};

struct ExperimentReport {
    std::string command;
    nlohmann::json config;
    nlohmann::json metrics;
    std::vector<Verdict> verdicts;
    double wall_time_s = 0.0;

    bool all_pass() const;
    nlohmann::json to_json() const;
    void write(const std::string& path) const;
};

struct MantelConfig {
    int k = 128;
    double tau = 1e-3;
    int steps = 10000;
    std::vector<int> panel_steps = {1000, 1500, 2500, 5000, 10000};
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::string out_dir;  // empty = no artifacts
    int metric_restarts = 20;
    double t_triangle_max = 0.01;
    double dcut_max = 0.05;
    int min_passing_seeds = 4;
};

// Default initial kernel for the Mantel experiment: a smooth random
// two-level graphon, clip(1/2 - a cos(pi x) cos(pi y) + noise) with
// a ~ U[0.2, 0.4] and i.i.d. symmetric noise in [-0.1, 0.1].
StepKernel mantel_initial_kernel(int k, std::uint64_t seed);

// Half/half complete-bipartite step kernel: 1 across the split, 0 within.
StepKernel bipartite_half_kernel(int k);

ExperimentReport cmd_mantel(const MantelConfig& cfg);

struct EntropyRateConfig {
    int k = 32;
    double w0 = 0.3;
    double tau = 1e-4;
    int steps = 10000;
    int record_every = 10;
    Box box{0.05, 0.95};
    std::string out_dir;
    double rate_min = 3.95;
    double bound_slack = 1.05;
};

ExperimentReport cmd_entropy_rate(const EntropyRateConfig& cfg);

struct ConvergenceConfig {
    int k_ref = 128;
    std::vector<int> ks = {8, 16, 32, 64};
    std::vector<double> t_checks = {0.1, 0.5, 1.0};
    double tau = 1e-3;
    Box box{0.05, 0.95};
    std::uint64_t seed = 0;
    std::string out_dir;
    int max_inversions = 1;
};

// Reference kernel W_ref(x,y) = 0.25 + 0.5xy discretized at k_ref.
StepKernel convergence_reference_kernel(int k_ref, Box box);

ExperimentReport cmd_convergence(const ConvergenceConfig& cfg);

// trajectory.csv: one `t,f,slope,residual` row per recorded time.
std::string format_trajectory_csv(const FlowTrajectory& traj);
void write_trajectory_csv(const FlowTrajectory& traj, const std::string& path);

// Least-squares slope of log(d(t)); returns false when d is degenerate.
bool fit_exponential_rate(const std::vector<double>& ts, const std::vector<double>& ds,
                          double& rate);

}  // namespace gf
