#pragma once

#include <cstdint>
#include <utility>

#include "graphonflow/kernel.hpp"

namespace gf {

// A block permutation realizing an (approximate) optimal coupling at the
// common blown-up size: achieved_value = metric value of U vs permute(V, perm).
struct Alignment {
    Permutation perm;
    double achieved_value = 0.0;
    bool is_exact = false;

    Alignment() : perm(Permutation::identity(1)) {}
    Alignment(Permutation p, double value, bool exact)
        : perm(std::move(p)), achieved_value(value), is_exact(exact) {}
};

struct MetricEstimate {
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    Alignment alignment;
    bool approximate = false;  // set when inputs were resampled past the size cap
};

struct MetricSearchConfig {
    int restarts = 20;          // annealing restarts (2-opt neighborhood)
    double cooling = 0.995;     // geometric cooling factor
    int anneal_iters = 0;       // 0 = auto (scales with n)
    std::uint64_t seed = 0;
    int cut_restarts = 20;      // random starts for the cut-norm inner search
    int cut_exact_cap = 20;     // exact cut-norm enumeration cap
    int brute_cap = 8;          // permutation brute-force cap
    int dcut_exact_cap = 6;     // exhaustive delta_cut oracle cap (lower bounds)
    int dcut_anneal_cap = 24;   // direct cut-objective annealing only below this size
    int fallback_grid = 0;      // 0 = refuse oversized common blow-up
};

// Exact block cut norm: max over S of the optimal-T closed form, enumerated
// over all 2^k subsets. Refuses above cfg cap (default 20).
double cut_norm_exact(const StepKernel& w, int exact_cap = 20);

// Alternating maximization (S fixed -> optimal T by column-sum signs, then
// T fixed -> optimal S) from deterministic and random starts.
MetricEstimate cut_norm_heuristic(const StepKernel& w, int restarts, std::uint64_t seed,
                                  int exact_cap = 20);

// Exact minimum of the block L2 distance over all permutations of the common
// blow-up (size <= brute_cap).
Alignment delta2_bruteforce(const StepKernel& u, const StepKernel& v, int brute_cap = 8);

// Exact minimum of the exact cut norm over all permutations (size <= cap).
Alignment delta_cut_bruteforce(const StepKernel& u, const StepKernel& v, int brute_cap = 8);

// Degree-sorted initial alignment + pairwise-swap local search with
// simulated-annealing restarts. lower_bound = |  ||U|| - ||V|| |.
MetricEstimate delta2_heuristic(const StepKernel& u, const StepKernel& v,
                                const MetricSearchConfig& cfg = {});

// Permutation search with the cut norm of the difference as objective.
MetricEstimate delta_cut_heuristic(const StepKernel& u, const StepKernel& v,
                                   const MetricSearchConfig& cfg = {});

// W_t = (1-t)*U + t*permute(V, a.perm), t in [0,1].
StepKernel geodesic(const StepKernel& u, const StepKernel& v, const Alignment& a, double t);

// Both kernels blown up to lcm(u.k, v.k). Above the size limit, resamples to
// fallback_grid by block averaging (approximate) or refuses if it is 0.
struct CommonPair {
    StepKernel u;
    StepKernel v;
    bool approximate = false;
};
CommonPair common_blowup(const StepKernel& u, const StepKernel& v, int fallback_grid = 0);

// Exact overlap-weighted block average onto an arbitrary grid.
StepKernel resample(const StepKernel& w, int grid);

}  // namespace gf
