#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphonflow/functionals.hpp"
#include "graphonflow/kernel.hpp"
#include "graphonflow/metrics.hpp"

namespace gf {

enum class FlowScheme { Forward, Implicit };

struct ProximalConfig {
    int max_iters = 10000;
    double tol = 1e-10;  // on the projected-gradient kernel norm
};

struct FlowConfig {
    FlowScheme scheme = FlowScheme::Forward;
    double tau = 1e-3;  // graphon time units
    int n_steps = 1;
    int record_every = 1;
    ProximalConfig inner;
    std::uint64_t seed = 0;
};

struct FlowTrajectory {
    FlowScheme scheme = FlowScheme::Forward;
    double tau = 0.0;
    std::vector<double> times;
    std::vector<StepKernel> kernels;
    std::vector<double> f_values;
    std::vector<double> slopes;
    std::vector<double> step_residuals;  // implicit: optimality norm; forward: max clip
    bool failed = false;
    std::string error;
};

struct StepResult {
    StepKernel kernel;
    double residual = 0.0;
    bool converged = true;
    int iterations = 0;
};

// One explicit step: clip_box(W - tau * phi * boundary_mask).
StepResult forward_step(const FunctionalSpec& spec, const StepKernel& w, double tau);

// One proximal step: approximate argmin over the box of
// f(X) + (1/2 tau) * ||X - W||_2^2 (kernel L2), projected gradient with
// Barzilai-Borwein steps from X0 = W, coupling fixed to identity.
StepResult implicit_step(const FunctionalSpec& spec, const StepKernel& w, double tau,
                         const ProximalConfig& inner = {});

FlowTrajectory run_flow(const FunctionalSpec& spec, const StepKernel& w0, const FlowConfig& cfg);

// EVI residuals between consecutive recorded snapshots against probe V:
// (d2(W_{i+1},V)^2 - d2(W_i,V)^2)/(2 dt) + (lambda/2)||W_i - V||^2 + f(W_i) - f(V),
// identity-coupled distances throughout.
std::vector<double> evi_residual(const FunctionalSpec& spec, const FlowTrajectory& traj,
                                 const StepKernel& v, double lambda);

struct ConvergenceRow {
    int k = 0;
    double t = 0.0;
    double distance = 0.0;  // heuristic delta_cut upper bound vs the reference flow
};

struct ConvergenceStudyConfig {
    FlowConfig flow;
    MetricSearchConfig metric;
};

// Block-average W_ref to each size k, run the flow at each resolution, and
// report heuristic cut distances to the reference-resolution snapshot at the
// requested times.
std::vector<ConvergenceRow> convergence_study(const FunctionalSpec& spec,
                                              const StepKernel& w_ref,
                                              const std::vector<int>& ks,
                                              const std::vector<double>& t_checks,
                                              const ConvergenceStudyConfig& cfg);

// Identity-coupled squared L2 distance (1/k^2)||A - B||_F^2.
double l2_sq_identity(const StepKernel& a, const StepKernel& b);

}  // namespace gf
