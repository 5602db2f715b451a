#include "graphonflow/flow.hpp"

#include <algorithm>
#include <cmath>

#include "graphonflow/ops.hpp"
#include "graphonflow/parallel.hpp"

namespace gf {

namespace {

double masked_norm(const std::vector<double>& g, const BoundaryMask& m, int k) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (m.active[i]) s += g[i] * g[i];
    return std::sqrt(s) / k;
}

}  // namespace

double l2_sq_identity(const StepKernel& a, const StepKernel& b) {
    if (a.k() != b.k()) throw ConfigError("size mismatch");
    return ops::sumsq_diff(a.data(), b.data(), a.size()) /
           (static_cast<double>(a.k()) * a.k());
}

StepResult forward_step(const FunctionalSpec& spec, const StepKernel& w, double tau) {
    if (!(tau > 0.0)) throw ConfigError("forward_step: tau must be positive");
    const auto phi = derivative(spec, w);
    const auto mask = boundary_mask(w, phi, spec.domain_box);
    std::vector<double> out(w.size());
    const double clip = ops::masked_step_clip(w.data(), phi.values.data(), mask.active.data(),
                                              out.data(), w.size(), tau, spec.domain_box.lo,
                                              spec.domain_box.hi);
    return StepResult{StepKernel(w.k(), std::move(out), spec.domain_box), clip, true, 1};
}

StepResult implicit_step(const FunctionalSpec& spec, const StepKernel& w, double tau,
                         const ProximalConfig& inner) {
    if (!(tau > 0.0)) throw ConfigError("implicit_step: tau must be positive");
    const auto lam = semiconvexity_constant(spec);
    if (lam.known && lam.lambda < 0.0 && tau >= -1.0 / lam.lambda)
        throw ConfigError("implicit_step: tau outside the well-posedness window (1+lambda*tau>0)");
    const Box box = spec.domain_box;
    const int k = w.k();
    const std::size_t n = w.size();

    auto objective = [&](const StepKernel& x) {
        return evaluate(spec, x) + l2_sq_identity(x, w) / (2.0 * tau);
    };
    auto gradient = [&](const StepKernel& x) {
        auto g = derivative(spec, x).values;
        for (std::size_t i = 0; i < n; ++i) g[i] += (x.values()[i] - w.values()[i]) / tau;
        return g;
    };
    auto project = [&](std::vector<double> v) {
        for (auto& x : v) x = std::min(box.hi, std::max(box.lo, x));
        return StepKernel(k, std::move(v), box);
    };
    auto pg_residual = [&](const StepKernel& x, const std::vector<double>& g) {
        const DerivativeKernel gk{k, g, x};
        return masked_norm(g, boundary_mask(x, gk, box), k);
    };

    StepKernel x = w;
    double fx = objective(x);
    std::vector<double> g = gradient(x);
    double res = pg_residual(x, g);
    StepKernel best_x = x;
    double best_f = fx, best_res = res;

    double step = tau;  // safe scale: the penalty term alone has curvature 1/tau
    std::vector<double> prev_x, prev_g;
    int it = 0;
    for (; it < inner.max_iters && res > inner.tol; ++it) {
        if (!prev_x.empty()) {
            // Barzilai-Borwein step from the last accepted move
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double dx = x.values()[i] - prev_x[i];
                const double dg = g[i] - prev_g[i];
                num += dx * dx;
                den += dx * dg;
            }
            if (den > 1e-300) step = std::min(std::max(num / den, 1e-12), 1e6);
        }
        bool accepted = false;
        double s = step;
        for (int bt = 0; bt < 60; ++bt) {
            std::vector<double> cand(n);
            for (std::size_t i = 0; i < n; ++i) cand[i] = x.values()[i] - s * g[i];
            StepKernel xc = project(std::move(cand));
            const double fc = objective(xc);
            if (fc <= fx + 1e-15) {
                prev_x = x.values();
                prev_g = g;
                x = std::move(xc);
                fx = fc;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) break;  // no descent direction left at float resolution
        g = gradient(x);
        res = pg_residual(x, g);
        if (fx < best_f || (fx == best_f && res < best_res)) {
            best_x = x;
            best_f = fx;
            best_res = res;
        }
    }
    const bool converged = best_res <= inner.tol || res <= inner.tol;
    if (res <= best_res) {
        best_x = x;
        best_res = res;
    }
    return StepResult{std::move(best_x), best_res, converged, it};
}

FlowTrajectory run_flow(const FunctionalSpec& spec, const StepKernel& w0, const FlowConfig& cfg) {
    if (cfg.n_steps < 1) throw ConfigError("run_flow: n_steps must be >= 1");
    if (cfg.record_every < 1) throw ConfigError("run_flow: record_every must be >= 1");
    FlowTrajectory traj;
    traj.scheme = cfg.scheme;
    traj.tau = cfg.tau;

    auto record = [&](int step, const StepKernel& w, double residual) {
        traj.times.push_back(step * cfg.tau);
        traj.kernels.push_back(w);
        traj.f_values.push_back(evaluate(spec, w));
        traj.slopes.push_back(local_slope(spec, w));
        traj.step_residuals.push_back(residual);
    };

    StepKernel w = w0;
    record(0, w, 0.0);
    for (int step = 1; step <= cfg.n_steps; ++step) {
        StepResult r = cfg.scheme == FlowScheme::Forward
                           ? forward_step(spec, w, cfg.tau)
                           : implicit_step(spec, w, cfg.tau, cfg.inner);
        if (cfg.scheme == FlowScheme::Implicit && !r.converged) {
            traj.failed = true;
            traj.error = "proximal solver failed to reach tolerance at step " +
                         std::to_string(step) + " (residual " + std::to_string(r.residual) + ")";
        }
        w = std::move(r.kernel);
        if (step % cfg.record_every == 0 || step == cfg.n_steps) record(step, w, r.residual);
        if (traj.failed) return traj;
    }
    return traj;
}

std::vector<double> evi_residual(const FunctionalSpec& spec, const FlowTrajectory& traj,
                                 const StepKernel& v, double lambda) {
    if (traj.kernels.size() < 2) throw ConfigError("evi_residual: need at least two snapshots");
    for (const auto& w : traj.kernels)
        if (w.k() != v.k()) throw ConfigError("evi_residual: probe size mismatch");
    const double f_v = evaluate(spec, v);
    std::vector<double> out(traj.kernels.size() - 1);
    for (std::size_t i = 0; i + 1 < traj.kernels.size(); ++i) {
        const double d_now = l2_sq_identity(traj.kernels[i], v);
        const double d_next = l2_sq_identity(traj.kernels[i + 1], v);
        const double dt = traj.times[i + 1] - traj.times[i];
        out[i] = (d_next - d_now) / (2.0 * dt) + 0.5 * lambda * d_now +
                 evaluate(spec, traj.kernels[i]) - f_v;
    }
    return out;
}

std::vector<ConvergenceRow> convergence_study(const FunctionalSpec& spec,
                                              const StepKernel& w_ref,
                                              const std::vector<int>& ks,
                                              const std::vector<double>& t_checks,
                                              const ConvergenceStudyConfig& cfg) {
    for (int k : ks)
        if (k < 1 || w_ref.k() % k != 0)
            throw ConfigError("convergence_study: each k must divide the reference size");
    for (double t : t_checks) {
        const int s = static_cast<int>(std::llround(t / cfg.flow.tau));
        if (std::fabs(s * cfg.flow.tau - t) > 1e-9)
            throw ConfigError("convergence_study: t_checks must be multiples of tau");
    }

    auto snapshots_for = [&](const StepKernel& w0) {
        std::vector<StepKernel> snaps;
        StepKernel w = w0;
        int step = 0;
        for (double t : t_checks) {
            const int target = static_cast<int>(std::llround(t / cfg.flow.tau));
            while (step < target) {
                StepResult r = cfg.flow.scheme == FlowScheme::Forward
                                   ? forward_step(spec, w, cfg.flow.tau)
                                   : implicit_step(spec, w, cfg.flow.tau, cfg.flow.inner);
                w = std::move(r.kernel);
                ++step;
            }
            snaps.push_back(w);
        }
        return snaps;
    };

    const auto ref_snaps = snapshots_for(w_ref);
    std::vector<std::vector<StepKernel>> coarse(ks.size());
    parallel_for(ks.size(), [&](std::size_t i) {
        coarse[i] = snapshots_for(block_average(w_ref, ks[i]));
    });

    std::vector<ConvergenceRow> rows;
    for (std::size_t i = 0; i < ks.size(); ++i)
        for (std::size_t ti = 0; ti < t_checks.size(); ++ti) {
            const auto est = delta_cut_heuristic(coarse[i][ti], ref_snaps[ti], cfg.metric);
            rows.push_back(ConvergenceRow{ks[i], t_checks[ti], est.upper_bound});
        }
    return rows;
}

}  // namespace gf
