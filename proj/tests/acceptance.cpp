// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit code = number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "graphonflow/experiments.hpp"
#include "graphonflow/flow.hpp"
#include "graphonflow/functionals.hpp"
#include "graphonflow/metrics.hpp"
#include "graphonflow/sampling.hpp"
#include "oracles.hpp"

using namespace gf;

namespace {

int g_failures = 0;

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct Criterion {
    std::string name;
    bool pass = true;
    std::string detail;
    double t0 = 0.0;

    explicit Criterion(std::string n) : name(std::move(n)), t0(now_s()) {}

    void require(bool ok, const std::string& why) {
        if (!ok && pass) {
            pass = false;
            detail = why;
        }
    }

    void note(const std::string& d) {
        if (pass) detail = d;
    }

    ~Criterion() {
        std::printf("[%s] %s%s%s [%.1fs]\n", pass ? "PASS" : "FAIL", name.c_str(),
                    detail.empty() ? "" : ": ", detail.c_str(), now_s() - t0);
        std::fflush(stdout);
        if (!pass) ++g_failures;
    }
};

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

const Box kEps{0.05, 0.95};

StepKernel random_interior(int k, Rng& rng) {
    return StepKernel::random_uniform(k, Box{0.2, 0.8}, rng);
}

struct Kind {
    std::string name;
    std::function<double(const StepKernel&)> value;
    std::function<DerivativeKernel(const StepKernel&)> deriv;
};

std::vector<Kind> functional_kinds() {
    std::vector<Kind> kinds;
    kinds.push_back({"entropy", [](const StepKernel& w) { return entropy_value(w); },
                     [](const StepKernel& w) { return entropy_derivative(w); }});
    for (const auto& h : {edge_graph(), path_graph(3), triangle_graph(), cycle_graph(4),
                          star_graph(4)}) {
        kinds.push_back({"hom", [h](const StepKernel& w) { return hom_density(h, w); },
                         [h](const StepKernel& w) { return hom_derivative(h, w); }});
    }
    // linear combination: entropy + 0.2 T_triangle - 0.05 T_edge
    {
        Term te;
        te.kind = TermKind::Entropy;
        Term t1;
        t1.kind = TermKind::Hom;
        t1.coef = 0.2;
        t1.h = triangle_graph();
        Term t2;
        t2.kind = TermKind::Hom;
        t2.coef = -0.05;
        t2.h = edge_graph();
        auto spec = std::make_shared<FunctionalSpec>(std::vector<Term>{te, t1, t2}, kEps);
        kinds.push_back({"combo", [spec](const StepKernel& w) { return evaluate(*spec, w); },
                         [spec](const StepKernel& w) { return derivative(*spec, w); }});
    }
    // interaction: H = path3, H1/H2 = its two edges
    {
        auto h = std::make_shared<SimpleGraph>(path_graph(3));
        auto h1 = std::make_shared<SimpleGraph>(3, std::vector<std::pair<int, int>>{{0, 1}});
        auto h2 = std::make_shared<SimpleGraph>(3, std::vector<std::pair<int, int>>{{1, 2}});
        kinds.push_back({"interaction",
                         [=](const StepKernel& w) { return interaction_value(*h1, *h2, *h, w); },
                         [=](const StepKernel& w) {
                             return interaction_derivative(*h1, *h2, *h, w);
                         }});
    }
    return kinds;
}

// 1. directional finite differences vs <phi, D>/k^2
void criterion_01() {
    Criterion c("criterion 01 derivative-correctness");
    const auto kinds = functional_kinds();
    const double delta = 1e-6;
    double worst = 0.0;
    Rng rng(101);
    for (int k : {4, 16, 64}) {
        for (int trial = 0; trial < 50; ++trial) {
            const auto w = random_interior(k, rng);
            const auto dir = oracle::random_symmetric_direction(k, rng);
            for (const auto& kind : kinds) {
                const double fd = oracle::directional_fd(kind.value, w, dir, delta);
                const double an = oracle::pairing(kind.deriv(w), dir);
                const double rel = std::fabs(fd - an) / std::max(std::fabs(an), 1e-8);
                worst = std::max(worst, rel);
            }
        }
    }
    c.require(worst <= 1e-5, fmt("worst rel err %.3g > 1e-5", worst));
    c.note(fmt("worst rel err %.3g <= 1e-5", worst));
}

// 2. permutation invariance of values, equivariance of derivatives
void criterion_02() {
    Criterion c("criterion 02 invariance-equivariance");
    const auto kinds = functional_kinds();
    Rng rng(202);
    double worst_val = 0.0, worst_der = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 4 + static_cast<int>(rng.below(9));
        const auto w = random_interior(k, rng);
        const auto p = Permutation::random(k, rng);
        const auto wp = permute(w, p);
        const auto& kind = kinds[trial % kinds.size()];
        worst_val = std::max(worst_val, std::fabs(kind.value(wp) - kind.value(w)));
        const auto phi = kind.deriv(w);
        const auto phi_p = kind.deriv(wp);
        const auto expected = permute_matrix(phi.values, k, p);
        for (std::size_t i = 0; i < expected.size(); ++i)
            worst_der = std::max(worst_der, std::fabs(phi_p.values[i] - expected[i]));
    }
    c.require(worst_val <= 1e-12, fmt("value drift %.3g > 1e-12", worst_val));
    c.require(worst_der <= 1e-11, fmt("derivative drift %.3g", worst_der));
    c.note(fmt("value drift %.3g, derivative drift %.3g", worst_val, worst_der));
}

// 3. heuristics vs exact/brute-force oracles
void criterion_03() {
    Criterion c("criterion 03 metric-oracles");
    Rng rng(303);
    int cut_mismatch = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 2 + static_cast<int>(rng.below(13));
        const auto w = StepKernel::random_uniform(k, Box{-1, 1}, rng);
        const auto est = cut_norm_heuristic(w, 20, 4000 + trial);
        if (est.lower_bound != cut_norm_exact(w)) ++cut_mismatch;
    }
    c.require(cut_mismatch == 0,
              fmt("cut-norm heuristic != exact on %.0f/100 kernels", cut_mismatch));

    double worst2 = 0.0, worstc = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(6));
        const auto u = StepKernel::random_uniform(n, Box{0, 1}, rng);
        const auto v = StepKernel::random_uniform(n, Box{0, 1}, rng);
        MetricSearchConfig cfg;
        cfg.seed = 5000 + trial;
        worst2 = std::max(worst2, std::fabs(delta2_heuristic(u, v, cfg).upper_bound -
                                            delta2_bruteforce(u, v).achieved_value));
        worstc = std::max(worstc, std::fabs(delta_cut_heuristic(u, v, cfg).upper_bound -
                                            delta_cut_bruteforce(u, v).achieved_value));
    }
    c.require(worst2 <= 1e-9, fmt("delta2 heuristic off by %.3g", worst2));
    c.require(worstc <= 1e-9, fmt("delta_cut heuristic off by %.3g", worstc));
    c.note(fmt("cut-norm equal 100/100; delta2 gap %.2g, delta_cut gap %.2g", worst2, worstc));
}

// 4. entropy flow contraction rate + scalar-ODE oracle match
void criterion_04() {
    Criterion c("criterion 04 entropy-flow-rate");
    const int k = 32;
    const auto spec = FunctionalSpec::entropy(kEps);
    const auto w0 = StepKernel::constant(k, 0.3, kEps);
    FlowConfig cfg;
    cfg.tau = 1e-4;
    cfg.n_steps = 10000;
    cfg.record_every = 10;
    const auto traj = run_flow(spec, w0, cfg);
    const auto half = StepKernel::constant(k, 0.5, kEps);

    std::vector<double> dists(traj.kernels.size());
    for (std::size_t i = 0; i < traj.kernels.size(); ++i)
        dists[i] = std::sqrt(l2_sq_identity(traj.kernels[i], half));

    double rate = 0.0;
    fit_exponential_rate(traj.times, dists, rate);
    c.require(rate >= 3.95 && rate <= 4.3, fmt("fitted rate %.4f outside [3.95, 4.3]", rate));

    bool bound_ok = true;
    for (std::size_t i = 0; i < dists.size(); ++i)
        if (dists[i] > 1.05 * std::exp(-4.0 * traj.times[i]) * dists[0]) bound_ok = false;
    c.require(bound_ok, "contraction bound violated");

    // independent scalar-ODE RK oracle, per entry, t <= 1
    double worst = 0.0;
    double w_ref = 0.3, t_ref = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        if (traj.times[i] > 1.0 + 1e-12) break;
        const double span = traj.times[i] - t_ref;
        if (span > 0) {
            w_ref = oracle::entropy_ode_rk4(w_ref, span, 1e-5);
            t_ref = traj.times[i];
        }
        worst = std::max(worst, std::fabs(traj.kernels[i].at(0, 0) - w_ref));
    }
    c.require(worst <= 1e-6, fmt("max |euler - rk| %.3g > 1e-6 (rate %.4f ok)", worst, rate));
    c.note(fmt("rate %.4f, bound ok, rk gap %.3g", rate, worst));
}

// 5. stationary point of the entropy flow
void criterion_05() {
    Criterion c("criterion 05 stationary-point");
    const auto spec = FunctionalSpec::entropy(kEps);
    const auto w0 = StepKernel::constant(16, 0.5, kEps);
    FlowConfig cfg;
    cfg.tau = 1e-3;
    cfg.n_steps = 1000;
    cfg.record_every = 100;
    const auto traj = run_flow(spec, w0, cfg);
    double moved = 0.0;
    for (const auto& w : traj.kernels)
        for (double x : w.values()) moved = std::max(moved, std::fabs(x - 0.5));
    c.require(moved <= 1e-14, fmt("moved %.3g > 1e-14", moved));
    c.note(fmt("max per-entry movement %.3g", moved));
}

// 6. EVI residuals along the entropy flow
void criterion_06() {
    Criterion c("criterion 06 evi-property");
    const int k = 16;
    const auto spec = FunctionalSpec::entropy(kEps);
    Rng rng(606);
    const auto w0 = StepKernel::random_uniform(k, Box{0.15, 0.85}, rng);
    FlowConfig cfg;
    cfg.tau = 1e-4;
    cfg.n_steps = 5000;
    cfg.record_every = 10;
    const auto traj = run_flow(spec, w0, cfg);
    double worst = -1e300;
    for (int probe = 0; probe < 20; ++probe) {
        const auto v = StepKernel::random_uniform(k, kEps, rng);
        for (double r : evi_residual(spec, traj, v, 4.0)) worst = std::max(worst, r);
    }
    c.require(worst <= 1e-3, fmt("max residual %.3g > 1e-3", worst));
    c.note(fmt("max residual over 20 probes %.3g", worst));
}

// 7. implicit Euler: identity, bisection oracle, descent, order
void criterion_07() {
    Criterion c("criterion 07 implicit-euler");
    FunctionalSpec zero({}, kEps);
    Rng rng(707);
    const auto wz = StepKernel::random_uniform(6, kEps, rng);
    const auto rz = implicit_step(zero, wz, 0.25);
    double ident = 0.0;
    for (std::size_t i = 0; i < wz.size(); ++i)
        ident = std::max(ident, std::fabs(rz.kernel.values()[i] - wz.values()[i]));
    c.require(ident <= 1e-12, fmt("zero-spec step moved %.3g", ident));

    const auto spec = FunctionalSpec::entropy(kEps);
    double worst_prox = 0.0;
    for (double p : {0.2, 0.35, 0.6, 0.9})
        for (double tau : {0.01, 0.1, 0.5}) {
            const auto w = StepKernel::constant(4, p, kEps);
            const auto r = implicit_step(spec, w, tau);
            const double q = oracle::entropy_prox_bisect(p, tau);
            for (double x : r.kernel.values())
                worst_prox = std::max(worst_prox, std::fabs(x - q));
        }
    c.require(worst_prox <= 1e-8, fmt("prox vs bisection gap %.3g > 1e-8", worst_prox));

    // Phi decreases at every accepted step along an implicit flow
    const auto w0 = StepKernel::random_uniform(5, Box{0.15, 0.85}, rng);
    bool phi_monotone = true;
    {
        StepKernel w = w0;
        for (int s = 0; s < 30; ++s) {
            const double f_before = evaluate(spec, w);
            const auto r = implicit_step(spec, w, 0.05);
            const double phi_after =
                evaluate(spec, r.kernel) + l2_sq_identity(r.kernel, w) / (2 * 0.05);
            if (phi_after > f_before + 1e-12) phi_monotone = false;
            w = r.kernel;
        }
    }
    c.require(phi_monotone, "penalized objective increased across a step");

    // order of agreement between implicit and forward trajectories
    std::vector<double> taus = {1e-2, 5e-3, 2.5e-3}, diffs;
    for (double tau : taus) {
        StepKernel wf = w0, wi = w0;
        const int steps = static_cast<int>(std::llround(0.1 / tau));
        for (int s = 0; s < steps; ++s) {
            wf = forward_step(spec, wf, tau).kernel;
            wi = implicit_step(spec, wi, tau).kernel;
        }
        double d = 0.0;
        for (std::size_t i = 0; i < wf.size(); ++i)
            d = std::max(d, std::fabs(wf.values()[i] - wi.values()[i]));
        diffs.push_back(d);
    }
    double order = 1e9;
    for (std::size_t i = 0; i + 1 < taus.size(); ++i)
        order = std::min(order, std::log(diffs[i] / diffs[i + 1]) /
                                    std::log(taus[i] / taus[i + 1]));
    c.require(order >= 0.9, fmt("observed order %.3f < 0.9", order));
    c.note(fmt("prox gap %.2g, order %.2f", worst_prox, order));
}

// 8. Mantel experiment
void criterion_08() {
    Criterion c("criterion 08 mantel-reproduction");
    MantelConfig cfg;  // k=128, tau=1e-3, 1e4 steps, seeds 1..5
    const auto rep = cmd_mantel(cfg);
    int n_pass = 0;
    std::string detail;
    for (const auto& s : rep.metrics["per_seed"]) {
        if (s["pass"].get<bool>()) ++n_pass;
        detail += fmt("(T3=%.4f,dcut=%.3f)", s["t_triangle"].get<double>(),
                      s["dcut_to_bipartite"].get<double>());
    }
    c.require(n_pass >= 4, fmt("only %.0f/5 seeds passed ", n_pass) + detail);
    c.note(fmt("%.0f/5 seeds ", n_pass) + detail);
}

// 9. desk-scale convergence table
void criterion_09() {
    Criterion c("criterion 09 convergence-table");
    ConvergenceConfig cfg;  // entropy, ref 128, ks {8,16,32,64}, ts {0.1,0.5,1.0}
    const auto rep = cmd_convergence(cfg);
    const int inversions = rep.metrics["inversions"].get<int>();
    c.require(inversions <= 1, fmt("%.0f inversions > 1", inversions));
    std::string d = fmt("%.0f inversions; t=0.5 row: ", inversions);
    for (const auto& row : rep.metrics["table"])
        if (row["t"].get<double>() == 0.5) d += fmt("%.4g ", row["distance"].get<double>());
    c.note(d);
}

// 10. Monte-Carlo consistency
void criterion_10() {
    Criterion c("criterion 10 monte-carlo");
    Rng rng(1010);
    const auto w = StepKernel::random_uniform(6, kEps, rng);
    const double exact = hom_density(triangle_graph(), w);
    int covered = 0;
    for (int s = 0; s < 50; ++s) {
        const auto est = mc_hom_density(triangle_graph(), w, 100000, 7000 + s);
        if (std::fabs(est.mean - exact) <= 3.0 * est.stderr_) ++covered;
    }
    c.require(covered >= 45, fmt("3-sigma coverage %.0f/50 < 45", covered));

    const auto w2 = StepKernel(2, {0.2, 0.7, 0.7, 0.4}, kEps);
    const auto phi = entropy_derivative(w2);
    const auto mask = boundary_mask(w2, phi, kEps);
    DerivativeKernel masked = phi;
    for (std::size_t i = 0; i < masked.values.size(); ++i)
        if (!mask.active[i]) masked.values[i] = 0.0;
    const auto est = estimate_velocity(w2, masked, 2, 50000, 0.0, 77);
    const auto ex = oracle::enumerate_velocity(w2, masked, 2);
    bool vel_ok = est.groups.size() == ex.size();
    for (const auto& g : est.groups) {
        const oracle::ExactVelocityGroup* match = nullptr;
        for (const auto& e : ex) {
            bool same = true;
            for (std::size_t t = 0; t < g.pattern.size() && same; ++t)
                if (e.pattern[t] != g.pattern[t]) same = false;
            if (same) match = &e;
        }
        if (!match) {
            vel_ok = false;
            continue;
        }
        for (std::size_t t = 0; t < g.pattern.size(); ++t) {
            const double n = static_cast<double>(g.counts[t]);
            const double sd = n > 1 ? std::sqrt(g.m2[t] / (n - 1) / n) : 0.0;
            if (std::fabs(g.velocity[t] - match->velocity[t]) > 3.0 * sd + 1e-12) vel_ok = false;
        }
    }
    c.require(vel_ok, "velocity estimator disagrees with exhaustive enumeration");
    c.note(fmt("coverage %.0f/50, velocity groups ok", covered));
}

// 11. semiconvexity witnesses
void criterion_11() {
    Criterion c("criterion 11 semiconvexity-witnesses");
    Rng rng(1111);
    const int k = 6;
    struct Case {
        std::string name;
        FunctionalSpec spec;
        double lambda;
        Box box;
    };
    Term te;
    te.kind = TermKind::Entropy;
    Term tt;
    tt.kind = TermKind::Hom;
    tt.coef = 0.2;
    tt.h = triangle_graph();
    std::vector<Case> cases;
    cases.push_back({"entropy", FunctionalSpec::entropy(kEps), 4.0, kEps});
    cases.push_back({"triangle", FunctionalSpec::hom(triangle_graph(), Box{0, 1}), -18.0,
                     Box{0.0, 1.0}});
    cases.push_back({"combo", FunctionalSpec({te, tt}, kEps), 0.4, kEps});
    double worst = -1e300;
    for (const auto& cs : cases) {
        const double lambda = semiconvexity_constant(cs.spec).lambda;
        if (std::fabs(lambda - cs.lambda) > 1e-12) {
            c.require(false, "semiconvexity constant mismatch for " + cs.name);
            return;
        }
        for (int trial = 0; trial < 200; ++trial) {
            const auto w0 = StepKernel::random_uniform(k, cs.box, rng);
            const auto w1 = StepKernel::random_uniform(k, cs.box, rng);
            const double d2 = l2_sq_identity(w0, w1);
            const double f0 = evaluate(cs.spec, w0), f1 = evaluate(cs.spec, w1);
            for (double t : {0.25, 0.5, 0.75}) {
                std::vector<double> v(w0.size());
                for (std::size_t i = 0; i < v.size(); ++i)
                    v[i] = (1 - t) * w0.values()[i] + t * w1.values()[i];
                const double ft = evaluate(cs.spec, StepKernel(k, v, cs.box));
                const double slack =
                    ft - ((1 - t) * f0 + t * f1 - 0.5 * lambda * t * (1 - t) * d2);
                worst = std::max(worst, slack);
            }
        }
    }
    c.require(worst <= 1e-9, fmt("worst violation %.3g > 1e-9", worst));
    c.note(fmt("worst slack %.3g", worst));
}

// 12. interaction energy
void criterion_12() {
    Criterion c("criterion 12 interaction-energy");
    Rng rng(1212);
    const SimpleGraph h = path_graph(3);
    const SimpleGraph h1(3, {{0, 1}});
    const SimpleGraph h2(3, {{1, 2}});
    const SimpleGraph htri = triangle_graph();
    const SimpleGraph t1(3, {{0, 1}, {1, 2}});
    const SimpleGraph t2(3, {{0, 2}, {1, 2}});
    double worst_neg = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto w = StepKernel::random_uniform(5, kEps, rng);
        worst_neg = std::min(worst_neg, interaction_value(h1, h2, h, w));
        worst_neg = std::min(worst_neg, interaction_value(t1, t2, htri, w));
    }
    c.require(worst_neg >= -1e-12, fmt("interaction energy %.3g < -1e-12", worst_neg));

    // vertex-disjoint covering subgraphs: H = two disjoint edges
    const SimpleGraph hd(4, {{0, 1}, {2, 3}});
    const SimpleGraph g1(4, {{0, 1}});
    const SimpleGraph g2(4, {{2, 3}});
    double worst_zero = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const auto w = StepKernel::random_uniform(4, kEps, rng);
        worst_zero = std::max(worst_zero, std::fabs(interaction_value(g1, g2, hd, w)));
    }
    c.require(worst_zero <= 1e-12,
              fmt("vertex-disjoint |I| up to %.3g != 0 (nonnegativity min %.3g holds)",
                  worst_zero, worst_neg));
    c.note(fmt("min I %.3g, disjoint |I| %.3g", worst_neg, worst_zero));
}

}  // namespace

int main() {
    const double t0 = now_s();
    criterion_01();
    criterion_02();
    criterion_03();
    criterion_04();
    criterion_05();
    criterion_06();
    criterion_07();
    criterion_08();
    criterion_09();
    criterion_10();
    criterion_11();
    criterion_12();
    std::printf("%d/12 criteria passed in %.1fs\n", 12 - g_failures, now_s() - t0);
    return g_failures == 0 ? 0 : 1;
}
