#include "graphonflow/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "graphonflow/parallel.hpp"
#include "graphonflow/rng.hpp"

namespace gf {

namespace {
int block_of(double latent, int k) {
    int b = static_cast<int>(latent * k);
    return std::min(b, k - 1);
}
}  // namespace

SampledGraph sample_graph(const StepKernel& w, int k, std::uint64_t seed) {
    if (k < 1) throw ConfigError("sample_graph: k must be >= 1");
    Rng rng(seed);
    SampledGraph g;
    g.k = k;
    g.latents.resize(k);
    for (int i = 0; i < k; ++i) g.latents[i] = rng.uniform();
    g.weights.resize(static_cast<std::size_t>(k) * k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            g.weights[static_cast<std::size_t>(i) * k + j] =
                w.at(block_of(g.latents[i], w.k()), block_of(g.latents[j], w.k()));
    return g;
}

McEstimate mc_hom_density(const SimpleGraph& h, const StepKernel& w, std::int64_t n_samples,
                          std::uint64_t seed) {
    if (n_samples < 100) throw ConfigError("mc_hom_density: need at least 100 samples");
    const int nv = h.n_vertices;
    const int nchunks = std::max(1, thread_count());
    // per-chunk Welford accumulators, merged deterministically in chunk order
    struct Acc {
        std::int64_t n = 0;
        double mean = 0.0;
        double m2 = 0.0;
    };
    std::vector<Acc> accs(nchunks);
    parallel_for(static_cast<std::size_t>(nchunks), [&](std::size_t c) {
        Rng rng(derive_seed(seed, c));
        const std::int64_t begin = n_samples * static_cast<std::int64_t>(c) / nchunks;
        const std::int64_t end = n_samples * (static_cast<std::int64_t>(c) + 1) / nchunks;
        std::vector<int> block(nv);
        Acc a;
        for (std::int64_t it = begin; it < end; ++it) {
            for (int v = 0; v < nv; ++v) block[v] = block_of(rng.uniform(), w.k());
            double prod = 1.0;
            for (auto [u, v] : h.edges) prod *= w.at(block[u], block[v]);
            ++a.n;
            const double delta = prod - a.mean;
            a.mean += delta / static_cast<double>(a.n);
            a.m2 += delta * (prod - a.mean);
        }
        accs[c] = a;
    });
    Acc total;
    for (const Acc& a : accs) {
        if (a.n == 0) continue;
        if (total.n == 0) {
            total = a;
            continue;
        }
        const double delta = a.mean - total.mean;
        const std::int64_t n = total.n + a.n;
        total.m2 += a.m2 + delta * delta * static_cast<double>(total.n) *
                               static_cast<double>(a.n) / static_cast<double>(n);
        total.mean += delta * static_cast<double>(a.n) / static_cast<double>(n);
        total.n = n;
    }
    const double var = total.n > 1 ? std::max(0.0, total.m2 / static_cast<double>(total.n - 1))
                                   : 0.0;
    return McEstimate{total.mean, std::sqrt(var / static_cast<double>(total.n)), total.n};
}

VelocityEstimate estimate_velocity(const StepKernel& w, const DerivativeKernel& phi_masked,
                                   int k, std::int64_t n_samples, double tol,
                                   std::uint64_t seed) {
    if (phi_masked.k != w.k()) throw ConfigError("estimate_velocity: derivative size mismatch");
    if (k < 1) throw ConfigError("estimate_velocity: k must be >= 1");
    if (n_samples < 1) throw ConfigError("estimate_velocity: need samples");
    const std::size_t cells = static_cast<std::size_t>(k) * k;

    VelocityEstimate est;
    est.k = k;
    Rng rng(seed);
    std::vector<int> block(k);
    std::vector<double> pattern(cells), vel(cells);

    auto matches = [&](const VelocityGroup& g) {
        for (std::size_t c = 0; c < cells; ++c)
            if (std::fabs(g.pattern[c] - pattern[c]) > tol) return false;
        return true;
    };

    for (std::int64_t it = 0; it < n_samples; ++it) {
        for (int v = 0; v < k; ++v) block[v] = block_of(rng.uniform(), w.k());
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                pattern[static_cast<std::size_t>(i) * k + j] = w.at(block[i], block[j]);
                vel[static_cast<std::size_t>(i) * k + j] = -phi_masked.at(block[i], block[j]);
            }
        VelocityGroup* grp = nullptr;
        for (auto& g : est.groups)
            if (matches(g)) {
                grp = &g;
                break;
            }
        if (!grp) {
            est.groups.push_back(VelocityGroup{pattern, std::vector<double>(cells, 0.0),
                                               std::vector<double>(cells, 0.0),
                                               std::vector<std::int64_t>(cells, 0)});
            grp = &est.groups.back();
        }
        for (std::size_t c = 0; c < cells; ++c) {
            // Welford update
            const std::int64_t n = ++grp->counts[c];
            const double delta = vel[c] - grp->velocity[c];
            grp->velocity[c] += delta / static_cast<double>(n);
            grp->m2[c] += delta * (vel[c] - grp->velocity[c]);
        }
    }
    std::sort(est.groups.begin(), est.groups.end(),
              [](const VelocityGroup& a, const VelocityGroup& b) {
                  return std::lexicographical_compare(a.pattern.begin(), a.pattern.end(),
                                                      b.pattern.begin(), b.pattern.end());
              });
    return est;
}

}  // namespace gf
