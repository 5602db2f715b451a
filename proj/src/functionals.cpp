#include "graphonflow/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "graphonflow/ops.hpp"

namespace gf {

namespace {

// ================= motif engine =================
// Exact block sums by variable elimination: factors start as one k*k table
// per edge; eliminating a vertex contracts (1/k)*sum_z over the product of
// the factors containing it. Intermediate tables are capped at arity 3.

constexpr int kMaxFactorArity = 3;

struct Factor {
    std::vector<int> vars;  // sorted ascending
    std::vector<double> table;
};

std::size_t ipow(std::size_t base, int e) {
    std::size_t r = 1;
    while (e-- > 0) r *= base;
    return r;
}

class Eliminator {
public:
    Eliminator(const SimpleGraph& h, const StepKernel& w, int pin_u, int pin_v)
        : k_(w.k()), pin_u_(pin_u), pin_v_(pin_v) {
        for (auto [a, b] : h.edges) {
            Factor f;
            f.vars = {std::min(a, b), std::max(a, b)};
            f.table = w.values();
            factors_.push_back(std::move(f));
        }
    }

    // Eliminates every non-pinned vertex; returns the product of what is left
    // as a table over the (still free) pins, or a scalar if there are none.
    Factor run() {
        while (true) {
            const int z = pick_vertex();
            if (z < 0) break;
            eliminate(z);
        }
        return combine_rest();
    }

private:
    bool pinned(int v) const { return v == pin_u_ || v == pin_v_; }

    int pick_vertex() const {
        int best = -1, best_arity = 1 << 20;
        std::vector<int> seen;
        for (const auto& f : factors_)
            for (int v : f.vars) {
                if (pinned(v) || std::count(seen.begin(), seen.end(), v)) continue;
                seen.push_back(v);
                const int a = out_arity(v);
                if (a < best_arity || (a == best_arity && v < best)) {
                    best = v;
                    best_arity = a;
                }
            }
        return best;
    }

    int out_arity(int z) const {
        std::vector<int> out;
        for (const auto& f : factors_)
            if (std::count(f.vars.begin(), f.vars.end(), z))
                for (int v : f.vars)
                    if (v != z && !std::count(out.begin(), out.end(), v)) out.push_back(v);
        return static_cast<int>(out.size());
    }

    void eliminate(int z) {
        std::vector<Factor> related, rest;
        for (auto& f : factors_) {
            if (std::count(f.vars.begin(), f.vars.end(), z))
                related.push_back(std::move(f));
            else
                rest.push_back(std::move(f));
        }
        std::vector<int> out;
        for (const auto& f : related)
            for (int v : f.vars)
                if (v != z && !std::count(out.begin(), out.end(), v)) out.push_back(v);
        std::sort(out.begin(), out.end());
        if (static_cast<int>(out.size()) > kMaxFactorArity)
            throw ComplexityError(
                "motif too dense for exact enumeration (needs an intermediate table of arity " +
                std::to_string(out.size()) + ")");

        // per factor: stride of z and of each out variable in its table
        struct Access {
            const Factor* f;
            std::size_t z_stride = 0;
            std::vector<std::size_t> out_strides;  // aligned with `out`
        };
        std::vector<Access> acc;
        for (const auto& f : related) {
            Access a;
            a.f = &f;
            a.out_strides.assign(out.size(), 0);
            const int arity = static_cast<int>(f.vars.size());
            for (int p = 0; p < arity; ++p) {
                const std::size_t stride = ipow(static_cast<std::size_t>(k_), arity - 1 - p);
                if (f.vars[p] == z) {
                    a.z_stride = stride;
                } else {
                    const auto it = std::find(out.begin(), out.end(), f.vars[p]);
                    a.out_strides[static_cast<std::size_t>(it - out.begin())] = stride;
                }
            }
            acc.push_back(std::move(a));
        }

        Factor result;
        result.vars = out;
        result.table.assign(ipow(static_cast<std::size_t>(k_), static_cast<int>(out.size())), 0.0);
        const double inv_k = 1.0 / static_cast<double>(k_);
        std::vector<int> xs(out.size(), 0);
        std::vector<std::size_t> base(acc.size());
        for (std::size_t cell = 0; cell < result.table.size(); ++cell) {
            for (std::size_t fi = 0; fi < acc.size(); ++fi) {
                std::size_t b = 0;
                for (std::size_t p = 0; p < out.size(); ++p)
                    b += acc[fi].out_strides[p] * static_cast<std::size_t>(xs[p]);
                base[fi] = b;
            }
            double s = 0.0;
            for (int zv = 0; zv < k_; ++zv) {
                double prod = 1.0;
                for (std::size_t fi = 0; fi < acc.size(); ++fi)
                    prod *= acc[fi].f->table[base[fi] +
                                             acc[fi].z_stride * static_cast<std::size_t>(zv)];
                s += prod;
            }
            result.table[cell] = s * inv_k;
            // odometer over out assignments (last var fastest)
            for (int p = static_cast<int>(out.size()) - 1; p >= 0; --p) {
                if (++xs[p] < k_) break;
                xs[p] = 0;
            }
        }
        factors_ = std::move(rest);
        factors_.push_back(std::move(result));
    }

    // Product of the remaining factors as a table over the sorted pins
    // (x0 runs over the lower pin's blocks, x1 over the higher pin's).
    Factor combine_rest() {
        Factor out;
        if (pin_u_ >= 0) {
            out.vars = {std::min(pin_u_, pin_v_), std::max(pin_u_, pin_v_)};
            out.table.assign(static_cast<std::size_t>(k_) * k_, 1.0);
            for (const auto& f : factors_) {
                for (int x0 = 0; x0 < k_; ++x0)
                    for (int x1 = 0; x1 < k_; ++x1) {
                        double val;
                        if (f.vars.empty())
                            val = f.table[0];
                        else if (f.vars.size() == 1)
                            val = f.table[static_cast<std::size_t>(f.vars[0] == out.vars[0] ? x0
                                                                                           : x1)];
                        else
                            val = f.table[static_cast<std::size_t>(x0) * k_ + x1];
                        out.table[static_cast<std::size_t>(x0) * k_ + x1] *= val;
                    }
            }
        } else {
            out.table.assign(1, 1.0);
            for (const auto& f : factors_) {
                if (!f.vars.empty())
                    throw ComplexityError("motif elimination left a non-scalar factor");
                out.table[0] *= f.table[0];
            }
        }
        return out;
    }

    int k_;
    int pin_u_, pin_v_;
    std::vector<Factor> factors_;
};

// ================= motif shapes =================

enum class Shape { Empty, Edge, Path, Cycle, Star, Other };

struct Core {
    Shape shape = Shape::Other;
    int n = 0;  // non-isolated vertex count
    int m = 0;
};

bool connected_core(const SimpleGraph& h, const std::vector<int>& core) {
    if (core.empty()) return true;
    std::vector<std::vector<int>> adj(h.n_vertices);
    for (auto [a, b] : h.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<char> vis(h.n_vertices, 0);
    std::queue<int> q;
    q.push(core[0]);
    vis[core[0]] = 1;
    int cnt = 0;
    while (!q.empty()) {
        const int v = q.front();
        q.pop();
        ++cnt;
        for (int w : adj[v])
            if (!vis[w]) {
                vis[w] = 1;
                q.push(w);
            }
    }
    return cnt == static_cast<int>(core.size());
}

Core classify(const SimpleGraph& h) {
    Core c;
    c.m = h.n_edges();
    const auto deg = h.degrees();
    std::vector<int> core;
    for (int v = 0; v < h.n_vertices; ++v)
        if (deg[v] > 0) core.push_back(v);
    c.n = static_cast<int>(core.size());
    if (c.m == 0) {
        c.shape = Shape::Empty;
        return c;
    }
    if (!connected_core(h, core)) {
        c.shape = Shape::Other;
        return c;
    }
    int d1 = 0, d2 = 0, dmax = 0;
    for (int v : core) {
        if (deg[v] == 1) ++d1;
        if (deg[v] == 2) ++d2;
        dmax = std::max(dmax, deg[v]);
    }
    if (c.n == 2 && c.m == 1)
        c.shape = Shape::Edge;
    else if (d1 == 2 && d2 == c.n - 2 && c.m == c.n - 1)
        c.shape = Shape::Path;
    else if (d2 == c.n && c.m == c.n)
        c.shape = Shape::Cycle;
    else if (dmax == c.n - 1 && d1 == c.n - 1 && c.m == c.n - 1)
        c.shape = Shape::Star;
    else
        c.shape = Shape::Other;
    return c;
}

void check_motif_cap(int cap, const Core& core) {
    if (core.n <= cap) return;
    if (core.shape == Shape::Path || core.shape == Shape::Cycle || core.shape == Shape::Star)
        return;
    throw ComplexityError("motif with " + std::to_string(core.n) +
                          " non-isolated vertices exceeds the exact-enumeration cap " +
                          std::to_string(cap) + " and has no fast path");
}

// degree vector deg(a) = (1/k) sum_z W[a][z]
std::vector<double> degree_vector(const StepKernel& w) {
    const int k = w.k();
    std::vector<double> d(k);
    for (int i = 0; i < k; ++i)
        d[i] = ops::sum(w.data() + static_cast<std::size_t>(i) * k, k) / k;
    return d;
}

// g_0 = 1, g_{t+1}(a) = (1/k) sum_z W[a][z] g_t(z): pinned path densities
std::vector<std::vector<double>> path_vectors(const StepKernel& w, int t_max) {
    const int k = w.k();
    std::vector<std::vector<double>> g(static_cast<std::size_t>(t_max) + 1);
    g[0].assign(k, 1.0);
    for (int t = 1; t <= t_max; ++t) {
        g[t].assign(k, 0.0);
        for (int i = 0; i < k; ++i)
            g[t][i] = ops::dot(w.data() + static_cast<std::size_t>(i) * k, g[t - 1].data(), k) / k;
    }
    return g;
}

// W^p / k^(p-1) via repeated operator products
std::vector<double> operator_power(const StepKernel& w, int p) {
    const int k = w.k();
    std::vector<double> cur = w.values(), next(cur.size());
    for (int i = 1; i < p; ++i) {
        ops::opprod(cur.data(), w.data(), next.data(), k);
        std::swap(cur, next);
    }
    return cur;
}

double density_fast(const Core& core, const StepKernel& w, bool& handled) {
    const int k = w.k();
    handled = true;
    switch (core.shape) {
        case Shape::Empty:
            return 1.0;
        case Shape::Edge:
            return ops::sum(w.data(), w.size()) / (static_cast<double>(k) * k);
        case Shape::Path: {
            const auto g = path_vectors(w, core.n - 1);
            return ops::sum(g[core.n - 1].data(), g[core.n - 1].size()) / k;
        }
        case Shape::Cycle: {
            const auto p = operator_power(w, core.n - 1);
            return ops::dot(p.data(), w.data(), p.size()) / (static_cast<double>(k) * k);
        }
        case Shape::Star: {
            const auto deg = degree_vector(w);
            double s = 0.0;
            for (double d : deg) s += std::pow(d, core.n - 1);
            return s / k;
        }
        case Shape::Other:
            handled = false;
            return 0.0;
    }
    handled = false;
    return 0.0;
}

std::vector<double> derivative_fast(const Core& core, const StepKernel& w, bool& handled) {
    const int k = w.k();
    const std::size_t kk = static_cast<std::size_t>(k) * k;
    handled = true;
    switch (core.shape) {
        case Shape::Empty:
            return std::vector<double>(kk, 0.0);
        case Shape::Edge:
            return std::vector<double>(kk, 1.0);
        case Shape::Path: {
            const int n = core.n;
            const auto g = path_vectors(w, n - 2);
            std::vector<double> phi(kk, 0.0);
            for (int j = 1; j <= n - 1; ++j) {
                const auto& gl = g[j - 1];
                const auto& gr = g[n - 1 - j];
                for (int a = 0; a < k; ++a)
                    for (int b = 0; b < k; ++b)
                        phi[static_cast<std::size_t>(a) * k + b] +=
                            0.5 * (gl[a] * gr[b] + gl[b] * gr[a]);
            }
            return phi;
        }
        case Shape::Cycle: {
            auto p = operator_power(w, core.n - 1);
            for (auto& x : p) x *= core.n;
            return p;
        }
        case Shape::Star: {
            const int n = core.n;
            const auto deg = degree_vector(w);
            std::vector<double> pw(k);
            for (int a = 0; a < k; ++a) pw[a] = std::pow(deg[a], n - 2);
            std::vector<double> phi(kk);
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < k; ++b)
                    phi[static_cast<std::size_t>(a) * k + b] =
                        0.5 * (n - 1) * (pw[a] + pw[b]);
            return phi;
        }
        case Shape::Other:
            handled = false;
            return {};
    }
    handled = false;
    return {};
}

void require_inside_spec_box(const StepKernel& w, const Box& box) {
    for (int i = 0; i < w.k(); ++i)
        for (int j = i; j < w.k(); ++j) {
            const double x = w.at(i, j);
            if (x < box.lo || x > box.hi)
                throw DomainError("kernel entry (" + std::to_string(i + 1) + "," +
                                  std::to_string(j + 1) + ")=" + std::to_string(x) +
                                  " outside the functional domain box");
        }
}

}  // namespace

// ================= spec =================

FunctionalSpec::FunctionalSpec(std::vector<Term> t, Box box, int cap)
    : terms(std::move(t)), domain_box(box), motif_cap(cap) {
    if (!(box.lo >= -1.0 && box.lo < box.hi && box.hi <= 1.0))
        throw ConfigError("domain box must satisfy -1 <= lo < hi <= 1");
    for (const auto& term : terms) {
        if (!std::isfinite(term.coef)) throw ConfigError("term coefficient must be finite");
        if (term.kind == TermKind::Hom && !term.h)
            throw ConfigError("hom term needs a motif graph");
        if (term.kind == TermKind::Interaction) {
            if (!term.h || !term.h1 || !term.h2)
                throw ConfigError("interaction term needs graphs H1, H2 and H");
            const auto &h = *term.h, &h1 = *term.h1, &h2 = *term.h2;
            if (h1.n_vertices != h.n_vertices || h2.n_vertices != h.n_vertices)
                throw ConfigError("interaction subgraphs must use H's vertex numbering");
            for (auto e : h1.edges)
                if (!std::count(h.edges.begin(), h.edges.end(), e))
                    throw ConfigError("H1 has an edge not present in H");
            for (auto e : h2.edges)
                if (!std::count(h.edges.begin(), h.edges.end(), e))
                    throw ConfigError("H2 has an edge not present in H");
            for (auto e : h.edges) {
                const bool in1 = std::count(h1.edges.begin(), h1.edges.end(), e) > 0;
                const bool in2 = std::count(h2.edges.begin(), h2.edges.end(), e) > 0;
                if (!in1 && !in2)
                    throw ConfigError("every edge of H must be covered by H1 or H2");
            }
        }
    }
    if (needs_strict_unit_interval()) {
        if (!(box.lo > 0.0 && box.hi < 1.0 && box.lo < 0.5 &&
              std::fabs((1.0 - box.hi) - box.lo) <= 1e-12))
            throw ConfigError(
                "entropy/interaction terms need a domain box of the form (eps, 1-eps)");
    }
}

bool FunctionalSpec::needs_strict_unit_interval() const {
    for (const auto& t : terms)
        if (t.kind == TermKind::Entropy || t.kind == TermKind::Interaction) return true;
    return false;
}

FunctionalSpec FunctionalSpec::entropy(Box box) {
    Term t;
    t.kind = TermKind::Entropy;
    return FunctionalSpec({t}, box);
}

FunctionalSpec FunctionalSpec::hom(SimpleGraph h, Box box, double coef) {
    Term t;
    t.kind = TermKind::Hom;
    t.coef = coef;
    t.h = std::move(h);
    return FunctionalSpec({t}, box);
}

FunctionalSpec FunctionalSpec::mantel(Box box) {
    Term tri;
    tri.kind = TermKind::Hom;
    tri.coef = 1.0;
    tri.h = triangle_graph();
    Term edge;
    edge.kind = TermKind::Hom;
    edge.coef = -0.1;
    edge.h = edge_graph();
    return FunctionalSpec({tri, edge}, box);
}

bool BoundaryMask::all_active() const {
    for (auto a : active)
        if (!a) return false;
    return true;
}

// ================= entropy =================

double entropy_value(const StepKernel& w) {
    const int k = w.k();
    double s = 0.0, comp = 0.0;  // Kahan
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            const double p = w.at(i, j);
            if (p <= 0.0 || p >= 1.0)
                throw DomainError("entropy undefined: entry (" + std::to_string(i + 1) + "," +
                                  std::to_string(j + 1) + ")=" + std::to_string(p) +
                                  " not strictly inside (0,1)");
            const double h = p * std::log(p) + (1.0 - p) * std::log(1.0 - p);
            const double y = h - comp;
            const double t = s + y;
            comp = (t - s) - y;
            s = t;
        }
    return s / (static_cast<double>(k) * k);
}

DerivativeKernel entropy_derivative(const StepKernel& w) {
    const int k = w.k();
    std::vector<double> phi(w.size());
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            const double p = w.at(i, j);
            if (p <= 0.0 || p >= 1.0)
                throw DomainError("entropy derivative undefined: entry (" + std::to_string(i + 1) +
                                  "," + std::to_string(j + 1) + ")=" + std::to_string(p) +
                                  " not strictly inside (0,1)");
            phi[static_cast<std::size_t>(i) * k + j] = std::log(p / (1.0 - p));
        }
    return DerivativeKernel{k, std::move(phi), w};
}

// ================= homomorphism densities =================

double hom_density(const SimpleGraph& h, const StepKernel& w, int motif_cap) {
    const Core core = classify(h);
    check_motif_cap(motif_cap, core);
    bool handled = false;
    const double fast = density_fast(core, w, handled);
    if (handled) return fast;
    Eliminator e(h, w, -1, -1);
    return e.run().table[0];
}

std::vector<double> hom_density_pinned(const SimpleGraph& h, int pin_u, int pin_v,
                                       const StepKernel& w) {
    if (pin_u == pin_v) throw ConfigError("pinned vertices must differ");
    Eliminator e(h, w, pin_u, pin_v);
    Factor f = e.run();
    // table is ordered by sorted pins with row = lower pin; reorder so row = pin_u
    const int k = w.k();
    std::vector<double> out(static_cast<std::size_t>(k) * k);
    const bool row_is_u = std::min(pin_u, pin_v) == pin_u;
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            out[static_cast<std::size_t>(a) * k + b] =
                row_is_u ? f.table[static_cast<std::size_t>(a) * k + b]
                         : f.table[static_cast<std::size_t>(b) * k + a];
    return out;
}

DerivativeKernel hom_derivative(const SimpleGraph& h, const StepKernel& w, int motif_cap) {
    const Core core = classify(h);
    check_motif_cap(motif_cap, core);
    const int k = w.k();
    const std::size_t kk = static_cast<std::size_t>(k) * k;
    bool handled = false;
    std::vector<double> phi = derivative_fast(core, w, handled);
    if (!handled) {
        phi.assign(kk, 0.0);
        for (auto e : h.edges) {
            const SimpleGraph he = edge_deleted(h, e);
            const auto m = hom_density_pinned(he, e.first, e.second, w);
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < k; ++b)
                    phi[static_cast<std::size_t>(a) * k + b] +=
                        0.5 * (m[static_cast<std::size_t>(a) * k + b] +
                               m[static_cast<std::size_t>(b) * k + a]);
        }
    }
    return DerivativeKernel{k, std::move(phi), w};
}

// ================= interaction energy =================

namespace {
double positive_density(const SimpleGraph& h, const StepKernel& w, int cap, const char* name) {
    const double t = hom_density(h, w, cap);
    if (!(t > 0.0))
        throw DomainError(std::string("interaction energy: density of ") + name +
                          " is not strictly positive (" + std::to_string(t) + ")");
    return t;
}
}  // namespace

double interaction_value(const SimpleGraph& h1, const SimpleGraph& h2, const SimpleGraph& h,
                         const StepKernel& w, int motif_cap) {
    const double t1 = positive_density(h1, w, motif_cap, "H1");
    const double t2 = positive_density(h2, w, motif_cap, "H2");
    const double th = positive_density(h, w, motif_cap, "H");
    return std::log(t1) + std::log(t2) - 2.0 * std::log(th);
}

DerivativeKernel interaction_derivative(const SimpleGraph& h1, const SimpleGraph& h2,
                                        const SimpleGraph& h, const StepKernel& w,
                                        int motif_cap) {
    const double t1 = positive_density(h1, w, motif_cap, "H1");
    const double t2 = positive_density(h2, w, motif_cap, "H2");
    const double th = positive_density(h, w, motif_cap, "H");
    const auto p1 = hom_derivative(h1, w, motif_cap);
    const auto p2 = hom_derivative(h2, w, motif_cap);
    const auto ph = hom_derivative(h, w, motif_cap);
    std::vector<double> phi(w.size());
    for (std::size_t i = 0; i < phi.size(); ++i)
        phi[i] = p1.values[i] / t1 + p2.values[i] / t2 - 2.0 * ph.values[i] / th;
    return DerivativeKernel{w.k(), std::move(phi), w};
}

// ================= assembled functional =================

double evaluate(const FunctionalSpec& spec, const StepKernel& w) {
    require_inside_spec_box(w, spec.domain_box);
    double s = 0.0;
    for (const auto& t : spec.terms) {
        switch (t.kind) {
            case TermKind::Entropy: s += t.coef * entropy_value(w); break;
            case TermKind::Hom: s += t.coef * hom_density(*t.h, w, spec.motif_cap); break;
            case TermKind::Interaction:
                s += t.coef * interaction_value(*t.h1, *t.h2, *t.h, w, spec.motif_cap);
                break;
        }
    }
    return s;
}

DerivativeKernel derivative(const FunctionalSpec& spec, const StepKernel& w) {
    require_inside_spec_box(w, spec.domain_box);
    std::vector<double> phi(w.size(), 0.0);
    for (const auto& t : spec.terms) {
        DerivativeKernel d{w.k(), {}, w};
        switch (t.kind) {
            case TermKind::Entropy: d = entropy_derivative(w); break;
            case TermKind::Hom: d = hom_derivative(*t.h, w, spec.motif_cap); break;
            case TermKind::Interaction:
                d = interaction_derivative(*t.h1, *t.h2, *t.h, w, spec.motif_cap);
                break;
        }
        for (std::size_t i = 0; i < phi.size(); ++i) phi[i] += t.coef * d.values[i];
    }
    return DerivativeKernel{w.k(), std::move(phi), w};
}

BoundaryMask boundary_mask(const StepKernel& w, const DerivativeKernel& phi, Box box,
                           double boundary_tol) {
    if (phi.k != w.k()) throw ConfigError("boundary_mask: derivative size mismatch");
    const int k = w.k();
    BoundaryMask m;
    m.k = k;
    m.active.assign(w.size(), 0);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            const double x = w.at(i, j);
            const double p = phi.at(i, j);
            const bool at_hi = x >= box.hi - boundary_tol;
            const bool at_lo = x <= box.lo + boundary_tol;
            bool active;
            if (at_hi)
                active = p > 0.0;
            else if (at_lo)
                active = p < 0.0;
            else
                active = true;
            m.active[static_cast<std::size_t>(i) * k + j] = active ? 1 : 0;
        }
    return m;
}

double local_slope(const FunctionalSpec& spec, const StepKernel& w) {
    const auto phi = derivative(spec, w);
    const auto mask = boundary_mask(w, phi, spec.domain_box);
    double s = 0.0;
    for (std::size_t i = 0; i < phi.values.size(); ++i)
        if (mask.active[i]) s += phi.values[i] * phi.values[i];
    return std::sqrt(s) / w.k();
}

SemiconvexityReport semiconvexity_constant(const FunctionalSpec& spec) {
    SemiconvexityReport r;
    for (const auto& t : spec.terms) {
        switch (t.kind) {
            case TermKind::Entropy:
                if (t.coef >= 0.0) {
                    r.lambda += 4.0 * t.coef;
                    r.lambda_crude += 4.0 * t.coef;
                } else {
                    r.known = false;
                    r.notes.push_back("negative entropy coefficient has no semiconvexity bound");
                }
                break;
            case TermKind::Hom: {
                const Core core = classify(*t.h);
                const double n = core.n, m = core.m;
                r.lambda += -std::fabs(t.coef) * m * n * (n - 1);
                r.lambda_crude += -std::fabs(t.coef) * n * n * (n - 1) * (n - 1) / 2.0;
                break;
            }
            case TermKind::Interaction:
                if (t.lambda_bound) {
                    r.lambda += *t.lambda_bound;
                    r.lambda_crude += *t.lambda_bound;
                    r.notes.push_back("interaction term uses the user-supplied bound");
                } else {
                    r.known = false;
                    r.notes.push_back("interaction term semiconvexity unknown");
                }
                break;
        }
    }
    return r;
}

// ================= spec.json =================

namespace {
SimpleGraph graph_from_field(const std::string& value, const std::string& base_dir) {
    if (is_builtin_graph_name(value)) return builtin_graph(value);
    std::filesystem::path p(value);
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    return read_graph_file(p.string());
}
}  // namespace

FunctionalSpec parse_functional_spec(const std::string& json_text, const std::string& base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("spec json parse error: ") + e.what());
    }
    try {
        std::vector<Term> terms;
        for (const auto& jt : j.value("terms", nlohmann::json::array())) {
            Term t;
            t.coef = jt.value("coef", 1.0);
            const std::string kind = jt.at("kind").get<std::string>();
            if (kind == "entropy") {
                t.kind = TermKind::Entropy;
            } else if (kind == "hom") {
                t.kind = TermKind::Hom;
                t.h = graph_from_field(jt.at("graph").get<std::string>(), base_dir);
            } else if (kind == "interaction") {
                t.kind = TermKind::Interaction;
                t.h1 = graph_from_field(jt.at("graph1").get<std::string>(), base_dir);
                t.h2 = graph_from_field(jt.at("graph2").get<std::string>(), base_dir);
                t.h = graph_from_field(jt.at("graph").get<std::string>(), base_dir);
                if (jt.contains("lambda")) t.lambda_bound = jt["lambda"].get<double>();
            } else {
                throw ConfigError("unknown term kind '" + kind + "'");
            }
            terms.push_back(std::move(t));
        }
        Box box{0.0, 1.0};
        if (j.contains("box")) {
            box.lo = j["box"].at(0).get<double>();
            box.hi = j["box"].at(1).get<double>();
        }
        const int cap = j.value("motif_cap", kDefaultMotifCap);
        return FunctionalSpec(std::move(terms), box, cap);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid functional spec: ") + e.what());
    }
}

FunctionalSpec load_functional_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open spec file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_functional_spec(ss.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace gf
