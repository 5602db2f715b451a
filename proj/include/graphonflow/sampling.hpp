#pragma once

#include <cstdint>
#include <vector>

#include "graphonflow/functionals.hpp"
#include "graphonflow/kernel.hpp"

namespace gf {

// Random weighted graph G_k[W]: k i.i.d. uniform latents mapped to their
// blocks, weights read off the kernel. Latents are recorded so every sample
// is auditable.
struct SampledGraph {
    int k = 0;
    std::vector<double> weights;  // k*k, symmetric
    std::vector<double> latents;  // k uniforms in [0,1)

    double at(int i, int j) const { return weights[static_cast<std::size_t>(i) * k + j]; }
};

SampledGraph sample_graph(const StepKernel& w, int k, std::uint64_t seed);

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::int64_t n_samples = 0;
};

// Monte-Carlo homomorphism density: mean of prod_{e in E(H)} W(Z-blocks)
// over independent vertex-coordinate draws.
McEstimate mc_hom_density(const SimpleGraph& h, const StepKernel& w, std::int64_t n_samples,
                          std::uint64_t seed);

// Conditional-mean velocity estimate for one observed pattern X_k = z.
struct VelocityGroup {
    std::vector<double> pattern;   // k*k observed weights
    std::vector<double> velocity;  // k*k conditional mean of -phi_masked
    std::vector<double> m2;        // running sum of squared deviations (for stderr)
    std::vector<std::int64_t> counts;
};

struct VelocityEstimate {
    int k = 0;
    std::vector<VelocityGroup> groups;  // sorted by pattern, lexicographic
};

// Teacher-forced estimator of the continuity-equation velocity
// v_k(z)(i,j) = E[v(U_i,U_j) | X_k = z] with v = -phi_masked; tuples whose
// patterns match entrywise within tol are grouped and averaged.
VelocityEstimate estimate_velocity(const StepKernel& w, const DerivativeKernel& phi_masked,
                                   int k, std::int64_t n_samples, double tol,
                                   std::uint64_t seed);

}  // namespace gf
