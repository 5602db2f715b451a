#pragma once

// Independent oracles for tests and the acceptance suite. Everything here is
// deliberately written against the math directly, not via the library's own
// computation paths.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "graphonflow/functionals.hpp"
#include "graphonflow/kernel.hpp"

namespace oracle {

// High-accuracy RK4 integration of the scalar entropy flow
// w' = -log(w/(1-w)) up to time t.
inline double entropy_ode_rk4(double w0, double t, double h = 1e-6) {
    auto g = [](double w) { return -std::log(w / (1.0 - w)); };
    const long long n = std::llround(t / h);
    double w = w0;
    for (long long i = 0; i < n; ++i) {
        const double k1 = g(w);
        const double k2 = g(w + 0.5 * h * k1);
        const double k3 = g(w + 0.5 * h * k2);
        const double k4 = g(w + h * k3);
        w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return w;
}

// Scalar proximal optimality condition for entropy at constant kernels:
// solves q + tau*log(q/(1-q)) = p by bisection on (0,1).
inline double entropy_prox_bisect(double p, double tau) {
    auto f = [&](double q) { return q + tau * std::log(q / (1.0 - q)) - p; };
    double lo = 1e-15, hi = 1.0 - 1e-15;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

// Central finite difference of F along symmetric direction D.
inline double directional_fd(const std::function<double(const gf::StepKernel&)>& f,
                             const gf::StepKernel& w, const std::vector<double>& dir,
                             double delta) {
    auto shifted = [&](double sign) {
        std::vector<double> v = w.values();
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += sign * delta * dir[i];
        return gf::StepKernel(w.k(), std::move(v), gf::Box{-1.0, 1.0});
    };
    return (f(shifted(1.0)) - f(shifted(-1.0))) / (2.0 * delta);
}

// <phi, D> in kernel L2: (1/k^2) sum phi_ij D_ij.
inline double pairing(const gf::DerivativeKernel& phi, const std::vector<double>& dir) {
    double s = 0.0;
    for (std::size_t i = 0; i < phi.values.size(); ++i) s += phi.values[i] * dir[i];
    return s / (static_cast<double>(phi.k) * phi.k);
}

// Random symmetric direction with entries in [-1,1].
inline std::vector<double> random_symmetric_direction(int k, gf::Rng& rng) {
    std::vector<double> d(static_cast<std::size_t>(k) * k);
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
            const double x = rng.uniform(-1.0, 1.0);
            d[static_cast<std::size_t>(i) * k + j] = x;
            d[static_cast<std::size_t>(j) * k + i] = x;
        }
    return d;
}

// Brute-force homomorphism density: k^{-|V|} sum over all vertex->block maps.
inline double hom_density_brute(const gf::SimpleGraph& h, const gf::StepKernel& w) {
    const int n = h.n_vertices, k = w.k();
    std::vector<int> a(n, 0);
    double total = 0.0;
    while (true) {
        double prod = 1.0;
        for (auto [u, v] : h.edges) prod *= w.at(a[u], a[v]);
        total += prod;
        int p = n - 1;
        while (p >= 0 && ++a[p] == k) a[p--] = 0;
        if (p < 0) break;
    }
    return total / std::pow(static_cast<double>(k), n);
}

// Exhaustive conditional-mean velocity over all block tuples: the exact value
// of E[-phi(U_i,U_j) | pattern] for sample size k over kernel blocks.
struct ExactVelocityGroup {
    std::vector<double> pattern;
    std::vector<double> velocity;
    double probability = 0.0;
};

inline std::vector<ExactVelocityGroup> enumerate_velocity(const gf::StepKernel& w,
                                                          const gf::DerivativeKernel& phi,
                                                          int k) {
    const int nb = w.k();
    const std::size_t cells = static_cast<std::size_t>(k) * k;
    std::vector<ExactVelocityGroup> groups;
    std::vector<int> b(k, 0);
    std::vector<double> pattern(cells), vel(cells);
    const double p_tuple = std::pow(static_cast<double>(nb), -k);
    while (true) {
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                pattern[static_cast<std::size_t>(i) * k + j] = w.at(b[i], b[j]);
                vel[static_cast<std::size_t>(i) * k + j] = -phi.at(b[i], b[j]);
            }
        ExactVelocityGroup* grp = nullptr;
        for (auto& g : groups) {
            bool same = true;
            for (std::size_t c = 0; c < cells && same; ++c)
                if (g.pattern[c] != pattern[c]) same = false;
            if (same) {
                grp = &g;
                break;
            }
        }
        if (!grp) {
            groups.push_back(ExactVelocityGroup{pattern, std::vector<double>(cells, 0.0), 0.0});
            grp = &groups.back();
        }
        for (std::size_t c = 0; c < cells; ++c) grp->velocity[c] += vel[c] * p_tuple;
        grp->probability += p_tuple;
        int p = k - 1;
        while (p >= 0 && ++b[p] == nb) b[p--] = 0;
        if (p < 0) break;
    }
    for (auto& g : groups)
        for (auto& v : g.velocity) v /= g.probability;
    return groups;
}

}  // namespace oracle
