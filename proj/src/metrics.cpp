#include "graphonflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "graphonflow/ops.hpp"
#include "graphonflow/parallel.hpp"

namespace gf {

namespace {

// ---- cut norm on raw symmetric matrices ----

// Canonical evaluation of the inner closed form for a fixed row subset S:
// column sums accumulated in ascending row order, then positive and negative
// parts summed in ascending column order. Both the exact oracle and the
// alternating heuristic report through this evaluator so that agreeing
// argmax subsets produce bit-identical values.
double cut_value_of_subset(const double* v, int k, const std::vector<char>& s) {
    std::vector<double> cs(k, 0.0);
    for (int i = 0; i < k; ++i)
        if (s[i]) {
            const double* row = v + static_cast<std::size_t>(i) * k;
            for (int j = 0; j < k; ++j) cs[j] += row[j];
        }
    double pos = 0.0, neg = 0.0;
    for (int j = 0; j < k; ++j) {
        if (cs[j] > 0)
            pos += cs[j];
        else
            neg -= cs[j];
    }
    return std::max(pos, neg);
}

// Exact: max over subsets S of the closed form above; Gray-code enumeration
// keeps column sums incremental, the argmax is re-evaluated canonically.
// Returns the unnormalized max; caller divides by k^2.
double cut_norm_exact_raw(const double* v, int k) {
    std::vector<double> cs(k, 0.0);
    std::vector<char> in_s(k, 0);
    double best = 0.0;
    std::uint64_t best_mask = 0;
    const std::uint64_t total = 1ull << k;
    for (std::uint64_t idx = 1; idx < total; ++idx) {
        const int bit = __builtin_ctzll(idx);  // bit flipped by the Gray step
        const double sgn = in_s[bit] ? -1.0 : 1.0;
        in_s[bit] = !in_s[bit];
        const double* row = v + static_cast<std::size_t>(bit) * k;
        double pos = 0.0, neg = 0.0;
        for (int j = 0; j < k; ++j) {
            cs[j] += sgn * row[j];
            if (cs[j] > 0)
                pos += cs[j];
            else
                neg -= cs[j];
        }
        if (std::max(pos, neg) > best) {
            best = std::max(pos, neg);
            std::uint64_t mask = 0;
            for (int i = 0; i < k; ++i)
                if (in_s[i]) mask |= 1ull << i;
            best_mask = mask;
        }
    }
    if (best_mask == 0) return 0.0;
    std::vector<char> s(k, 0);
    for (int i = 0; i < k; ++i) s[i] = (best_mask >> i) & 1;
    return cut_value_of_subset(v, k, s);
}

// One alternating-maximization pass from a given start subset, for one sign.
double alt_max_from(const double* v, int k, std::vector<char>& s, double sign) {
    std::vector<char> t(k, 0);
    std::vector<double> cs(k);
    double val = -1.0;
    for (int iter = 0; iter < 200; ++iter) {
        // T = argmax given S
        std::fill(cs.begin(), cs.end(), 0.0);
        for (int i = 0; i < k; ++i)
            if (s[i]) {
                const double* row = v + static_cast<std::size_t>(i) * k;
                for (int j = 0; j < k; ++j) cs[j] += sign * row[j];
            }
        for (int j = 0; j < k; ++j) t[j] = cs[j] > 0.0;
        // S = argmax given T
        std::fill(cs.begin(), cs.end(), 0.0);
        for (int j = 0; j < k; ++j)
            if (t[j]) {
                for (int i = 0; i < k; ++i) cs[i] += sign * v[static_cast<std::size_t>(i) * k + j];
            }
        bool changed = false;
        double nv = 0.0;
        for (int i = 0; i < k; ++i) {
            const char ns = cs[i] > 0.0;
            if (ns != s[i]) changed = true;
            s[i] = ns;
            if (ns) nv += cs[i];
        }
        if (!changed || nv <= val) {
            val = std::max(val, nv);
            break;
        }
        val = nv;
    }
    return std::max(val, 0.0);
}

double cut_norm_alt_raw(const double* v, int k, int restarts, std::uint64_t seed) {
    // deterministic starts: singletons, their complements, column-sign sets,
    // the full set, pairs at small sizes; then seeded random subsets
    const std::size_t uk = static_cast<std::size_t>(k);
    std::vector<std::pair<int, int>> pair_starts;
    if (k <= 24)
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) pair_starts.emplace_back(i, j);
    const std::size_t det = 3 * uk + 1 + pair_starts.size();
    const std::size_t n_starts = det + static_cast<std::size_t>(std::max(restarts, 0));
    std::vector<double> results(n_starts, 0.0);
    std::vector<std::vector<char>> starts(n_starts);
    parallel_for(n_starts, [&](std::size_t s_idx) {
        std::vector<char> s(k, 0);
        if (s_idx < uk) {
            s[s_idx] = 1;
        } else if (s_idx < 2 * uk) {
            std::fill(s.begin(), s.end(), 1);
            s[s_idx - uk] = 0;
        } else if (s_idx < 3 * uk) {
            const std::size_t j = s_idx - 2 * uk;
            for (int i = 0; i < k; ++i) s[i] = v[static_cast<std::size_t>(i) * k + j] > 0;
        } else if (s_idx == 3 * uk) {
            std::fill(s.begin(), s.end(), 1);
        } else if (s_idx < det) {
            const auto [a, b] = pair_starts[s_idx - 3 * uk - 1];
            s[a] = s[b] = 1;
        } else {
            Rng rng(derive_seed(seed, s_idx));
            for (int i = 0; i < k; ++i) s[i] = rng.coin();
        }
        double best = -1.0;
        std::vector<char> best_fix;
        for (double sign : {1.0, -1.0}) {
            std::vector<char> sc = s;
            alt_max_from(v, k, sc, sign);
            const double val = cut_value_of_subset(v, k, sc);
            if (val > best) {
                best = val;
                best_fix = sc;
            }
        }
        results[s_idx] = best;
        starts[s_idx] = std::move(best_fix);
    });
    double best = 0.0;
    std::size_t best_idx = 0;
    for (std::size_t r = 0; r < n_starts; ++r)
        if (results[r] > best) {
            best = results[r];
            best_idx = r;
        }
    // single-flip polish around the winning fixpoint: flip one element,
    // re-alternate, keep improvements; escapes weak fixpoints
    std::vector<char> s_best = starts[best_idx];
    for (int pass = 0; pass < 40; ++pass) {
        bool improved = false;
        for (int i = 0; i < k; ++i) {
            std::vector<char> s = s_best;
            s[i] = !s[i];
            for (double sign : {1.0, -1.0}) {
                std::vector<char> sc = s;
                alt_max_from(v, k, sc, sign);
                const double val = cut_value_of_subset(v, k, sc);
                if (val > best) {
                    best = val;
                    s_best = sc;
                    improved = true;
                }
            }
        }
        if (!improved) break;
    }
    return best;
}

std::vector<double> diff_under_assignment(const StepKernel& u, const StepKernel& v,
                                          const std::vector<int>& a) {
    const int n = u.k();
    std::vector<double> d(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            d[static_cast<std::size_t>(i) * n + j] = u.at(i, j) - v.at(a[i], a[j]);
    return d;
}

// ---- L2 assignment search ----

double l2_cost(const StepKernel& u, const StepKernel& v, const std::vector<int>& a) {
    const int n = u.k();
    double c = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double d = u.at(i, j) - v.at(a[i], a[j]);
            c += d * d;
        }
    return c;
}

// Cost change of swapping a[p] and a[q].
double l2_swap_delta(const StepKernel& u, const StepKernel& v, const std::vector<int>& a,
                     int p, int q) {
    const int n = u.k();
    const int ap = a[p], aq = a[q];
    auto sq = [](double x) { return x * x; };
    double delta = 0.0;
    for (int t = 0; t < n; ++t) {
        if (t == p || t == q) continue;
        const int at = a[t];
        delta += 2.0 * (sq(u.at(p, t) - v.at(aq, at)) - sq(u.at(p, t) - v.at(ap, at)));
        delta += 2.0 * (sq(u.at(q, t) - v.at(ap, at)) - sq(u.at(q, t) - v.at(aq, at)));
    }
    delta += sq(u.at(p, p) - v.at(aq, aq)) - sq(u.at(p, p) - v.at(ap, ap));
    delta += sq(u.at(q, q) - v.at(ap, ap)) - sq(u.at(q, q) - v.at(aq, aq));
    delta += 2.0 * (sq(u.at(p, q) - v.at(aq, ap)) - sq(u.at(p, q) - v.at(ap, aq)));
    return delta;
}

// Greedy 2-opt sweeps to a local minimum; ties broken by lowest index pair.
void l2_descend(const StepKernel& u, const StepKernel& v, std::vector<int>& a, double& cost) {
    const int n = u.k();
    bool improved = true;
    while (improved) {
        improved = false;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double delta = l2_swap_delta(u, v, a, p, q);
                if (delta < -1e-15) {
                    std::swap(a[p], a[q]);
                    cost += delta;
                    improved = true;
                }
            }
        cost = l2_cost(u, v, a);  // flush incremental drift once per sweep
    }
}

std::vector<int> sorted_by_rowmean(const StepKernel& w) {
    const int n = w.k();
    std::vector<double> mean(n, 0.0);
    for (int i = 0; i < n; ++i)
        mean[i] = ops::sum(w.data() + static_cast<std::size_t>(i) * n, n);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return mean[x] < mean[y]; });
    return order;
}

// Leading eigenvector of the centered matrix by power iteration; sign fixed
// so the first nonzero coordinate is positive.
std::vector<double> leading_mode(const StepKernel& w) {
    const int n = w.k();
    const double mean = ops::sum(w.data(), w.size()) / (static_cast<double>(n) * n);
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) x[i] = (i % 2 == 0) ? 1.0 : -1.0;
    for (int it = 0; it < 80; ++it) {
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            const double* row = w.data() + static_cast<std::size_t>(i) * n;
            for (int j = 0; j < n; ++j) s += (row[j] - mean) * x[j];
            y[i] = s;
        }
        double nrm = std::sqrt(ops::dot(y.data(), y.data(), y.size()));
        if (nrm < 1e-300) break;
        for (int i = 0; i < n; ++i) x[i] = y[i] / nrm;
    }
    for (int i = 0; i < n; ++i)
        if (std::fabs(x[i]) > 1e-12) {
            if (x[i] < 0)
                for (auto& t : x) t = -t;
            break;
        }
    return x;
}

std::vector<int> sorted_by_key(const std::vector<double>& key, bool ascending) {
    std::vector<int> order(key.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return ascending ? key[x] < key[y] : key[x] > key[y];
    });
    return order;
}

std::vector<int> match_orders(const std::vector<int>& ou, const std::vector<int>& ov) {
    std::vector<int> a(ou.size());
    for (std::size_t r = 0; r < ou.size(); ++r) a[ou[r]] = ov[r];
    return a;
}

Alignment to_alignment(const std::vector<int>& a, double value, bool exact) {
    return Alignment{Permutation(a).inverse(), value, exact};
}

}  // namespace

double cut_norm_exact(const StepKernel& w, int exact_cap) {
    if (w.k() > exact_cap)
        throw SizeLimitError("cut_norm_exact: k=" + std::to_string(w.k()) + " exceeds cap " +
                             std::to_string(exact_cap));
    return cut_norm_exact_raw(w.data(), w.k()) / (static_cast<double>(w.k()) * w.k());
}

MetricEstimate cut_norm_heuristic(const StepKernel& w, int restarts, std::uint64_t seed,
                                  int exact_cap) {
    if (restarts < 1) throw ConfigError("cut_norm_heuristic: restarts must be >= 1");
    const int k = w.k();
    const double kk = static_cast<double>(k) * k;
    const double lower = cut_norm_alt_raw(w.data(), k, restarts, seed) / kk;
    double upper = ops::abs_sum(w.data(), w.size()) / kk;
    bool exact = false;
    if (k <= exact_cap) {
        upper = cut_norm_exact_raw(w.data(), k) / kk;
        exact = true;
    }
    MetricEstimate est;
    est.lower_bound = std::min(lower, upper);
    est.upper_bound = upper;
    est.alignment = Alignment{Permutation::identity(k), lower, exact};
    return est;
}

CommonPair common_blowup(const StepKernel& u, const StepKernel& v, int fallback_grid) {
    const long long n = std::lcm<long long>(u.k(), v.k());
    if (n <= kernel_size_limit()) {
        const int nn = static_cast<int>(n);
        return CommonPair{blow_up(u, nn / u.k()), blow_up(v, nn / v.k()), false};
    }
    if (fallback_grid <= 0)
        throw SizeLimitError("common blow-up size " + std::to_string(n) + " exceeds limit; set a fallback grid");
    return CommonPair{resample(u, fallback_grid), resample(v, fallback_grid), true};
}

StepKernel resample(const StepKernel& w, int grid) {
    if (grid < 1) throw ConfigError("resample: grid must be positive");
    const int k = w.k();
    // overlap weights between target cell i and source cell a, times grid
    auto weights_for = [&](int i) {
        std::vector<std::pair<int, double>> ws;
        const double lo = static_cast<double>(i) / grid, hi = static_cast<double>(i + 1) / grid;
        int a0 = static_cast<int>(std::floor(lo * k));
        int a1 = static_cast<int>(std::ceil(hi * k));
        a1 = std::min(a1, k);
        for (int a = a0; a < a1; ++a) {
            const double s0 = static_cast<double>(a) / k, s1 = static_cast<double>(a + 1) / k;
            const double ov = std::min(hi, s1) - std::max(lo, s0);
            if (ov > 0) ws.emplace_back(a, ov * grid);
        }
        return ws;
    };
    std::vector<std::vector<std::pair<int, double>>> wts(grid);
    for (int i = 0; i < grid; ++i) wts[i] = weights_for(i);
    std::vector<double> out(static_cast<std::size_t>(grid) * grid, 0.0);
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            double s = 0.0;
            for (auto [a, wa] : wts[i])
                for (auto [b, wb] : wts[j]) s += wa * wb * w.at(a, b);
            out[static_cast<std::size_t>(i) * grid + j] = s;
        }
    for (auto& x : out) x = std::min(w.box().hi, std::max(w.box().lo, x));
    // exact symmetry despite float summation order
    for (int i = 0; i < grid; ++i)
        for (int j = i + 1; j < grid; ++j) {
            const double m = out[static_cast<std::size_t>(i) * grid + j];
            out[static_cast<std::size_t>(j) * grid + i] = m;
        }
    return StepKernel(grid, std::move(out), w.box());
}

Alignment delta2_bruteforce(const StepKernel& u_in, const StepKernel& v_in, int brute_cap) {
    auto [u, v, approx] = common_blowup(u_in, v_in);
    const int n = u.k();
    if (n > brute_cap)
        throw SizeLimitError("delta2_bruteforce: common size " + std::to_string(n) +
                             " exceeds cap " + std::to_string(brute_cap));
    std::vector<int> a(n), best(n);
    std::iota(a.begin(), a.end(), 0);
    best = a;
    double best_cost = l2_cost(u, v, a);
    while (std::next_permutation(a.begin(), a.end())) {
        const double c = l2_cost(u, v, a);
        if (c < best_cost) {
            best_cost = c;
            best = a;
        }
    }
    return to_alignment(best, std::sqrt(std::max(best_cost, 0.0)) / n, true);
}

Alignment delta_cut_bruteforce(const StepKernel& u_in, const StepKernel& v_in, int brute_cap) {
    auto [u, v, approx] = common_blowup(u_in, v_in);
    const int n = u.k();
    if (n > brute_cap)
        throw SizeLimitError("delta_cut_bruteforce: common size " + std::to_string(n) +
                             " exceeds cap " + std::to_string(brute_cap));
    std::vector<int> a(n), best(n);
    std::iota(a.begin(), a.end(), 0);
    best = a;
    const double nn = static_cast<double>(n) * n;
    auto value = [&](const std::vector<int>& asg) {
        return cut_norm_exact_raw(diff_under_assignment(u, v, asg).data(), n) / nn;
    };
    double best_val = value(a);
    while (std::next_permutation(a.begin(), a.end())) {
        const double c = value(a);
        if (c < best_val) {
            best_val = c;
            best = a;
        }
    }
    return to_alignment(best, best_val, true);
}

namespace {

struct SearchResult {
    std::vector<int> a;
    double cost = 0.0;
};

SearchResult delta2_search(const StepKernel& u, const StepKernel& v,
                           const MetricSearchConfig& cfg) {
    const int n = u.k();
    const int iters = cfg.anneal_iters > 0 ? cfg.anneal_iters : std::max(300, 40 * n);
    const int n_restarts = std::max(cfg.restarts, 2);
    std::vector<SearchResult> results(static_cast<std::size_t>(n_restarts));
    parallel_for(static_cast<std::size_t>(n_restarts), [&](std::size_t r) {
        Rng rng(derive_seed(cfg.seed, r));
        std::vector<int> a(n);
        if (r == 0) {
            a = match_orders(sorted_by_rowmean(u), sorted_by_rowmean(v));
        } else if (r == 1) {
            std::iota(a.begin(), a.end(), 0);
        } else {
            std::iota(a.begin(), a.end(), 0);
            for (int i = n - 1; i > 0; --i)
                std::swap(a[i], a[static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1))]);
        }
        double cost = l2_cost(u, v, a);
        if (n >= 2) {
            double temp = 0.1 * std::max(cost, 1e-12) / (static_cast<double>(n) * n);
            for (int it = 0; it < iters; ++it) {
                const int p = static_cast<int>(rng.below(n));
                int q = static_cast<int>(rng.below(n - 1));
                if (q >= p) ++q;
                const double delta = l2_swap_delta(u, v, a, p, q);
                if (delta < 0.0 || rng.uniform() < std::exp(-delta / std::max(temp, 1e-300))) {
                    std::swap(a[p], a[q]);
                    cost += delta;
                }
                temp *= cfg.cooling;
            }
            cost = l2_cost(u, v, a);
            l2_descend(u, v, a, cost);
        }
        results[r] = SearchResult{std::move(a), cost};
    });
    std::size_t best = 0;
    for (std::size_t r = 1; r < results.size(); ++r)
        if (results[r].cost < results[best].cost - 1e-15) best = r;
    return results[best];
}

}  // namespace

MetricEstimate delta2_heuristic(const StepKernel& u_in, const StepKernel& v_in,
                                const MetricSearchConfig& cfg) {
    auto [u, v, approx] = common_blowup(u_in, v_in, cfg.fallback_grid);
    const int n = u.k();
    SearchResult sr = delta2_search(u, v, cfg);
    const double upper = std::sqrt(std::max(sr.cost, 0.0)) / n;
    const double lower = std::min(std::fabs(u.l2_norm() - v.l2_norm()), upper);
    MetricEstimate est;
    est.lower_bound = lower;
    est.upper_bound = upper;
    est.alignment = to_alignment(sr.a, upper, false);
    est.approximate = approx;
    return est;
}

MetricEstimate delta_cut_heuristic(const StepKernel& u_in, const StepKernel& v_in,
                                   const MetricSearchConfig& cfg) {
    auto [u, v, approx] = common_blowup(u_in, v_in, cfg.fallback_grid);
    const int n = u.k();
    const double nn = static_cast<double>(n) * n;
    // objective used during the search: cheap alternating cut norm (exact at
    // small sizes where enumeration is cheaper than restarts)
    auto search_obj = [&](const std::vector<int>& a) {
        auto d = diff_under_assignment(u, v, a);
        if (n <= 10) return cut_norm_exact_raw(d.data(), n) / nn;
        return cut_norm_alt_raw(d.data(), n, 2, cfg.seed) / nn;
    };

    std::vector<std::vector<int>> candidates;
    {
        std::vector<int> id(n);
        std::iota(id.begin(), id.end(), 0);
        candidates.push_back(id);
        candidates.push_back(match_orders(sorted_by_rowmean(u), sorted_by_rowmean(v)));
        const auto mu = leading_mode(u), mv = leading_mode(v);
        candidates.push_back(match_orders(sorted_by_key(mu, true), sorted_by_key(mv, true)));
        candidates.push_back(match_orders(sorted_by_key(mu, true), sorted_by_key(mv, false)));
        candidates.push_back(delta2_search(u, v, cfg).a);
    }
    std::vector<int> best = candidates[0];
    double best_obj = search_obj(best);
    for (std::size_t c = 1; c < candidates.size(); ++c) {
        const double o = search_obj(candidates[c]);
        if (o < best_obj - 1e-15) {
            best_obj = o;
            best = candidates[c];
        }
    }
    if (n <= cfg.dcut_anneal_cap && n >= 2 && best_obj > 1e-13) {
        const int n_restarts = std::max(cfg.restarts, 2);
        std::vector<SearchResult> results(static_cast<std::size_t>(n_restarts));
        parallel_for(static_cast<std::size_t>(n_restarts), [&](std::size_t r) {
            Rng rng(derive_seed(cfg.seed ^ 0xDCu, r));
            std::vector<int> a;
            if (r == 0) {
                a = best;
            } else {
                a.resize(n);
                std::iota(a.begin(), a.end(), 0);
                for (int i = n - 1; i > 0; --i)
                    std::swap(a[i],
                              a[static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1))]);
            }
            double obj = search_obj(a);
            const int iters = cfg.anneal_iters > 0 ? cfg.anneal_iters : std::max(200, 30 * n);
            double temp = 0.1 * std::max(obj, 1e-9);
            for (int it = 0; it < iters; ++it) {
                const int p = static_cast<int>(rng.below(n));
                int q = static_cast<int>(rng.below(n - 1));
                if (q >= p) ++q;
                std::swap(a[p], a[q]);
                const double o = search_obj(a);
                if (o < obj || rng.uniform() < std::exp(-(o - obj) / std::max(temp, 1e-300))) {
                    obj = o;
                } else {
                    std::swap(a[p], a[q]);
                }
                temp *= cfg.cooling;
            }
            // greedy pass
            bool improved = true;
            while (improved) {
                improved = false;
                for (int p = 0; p < n && !improved; ++p)
                    for (int q = p + 1; q < n; ++q) {
                        std::swap(a[p], a[q]);
                        const double o = search_obj(a);
                        if (o < obj - 1e-15) {
                            obj = o;
                            improved = true;
                            break;
                        }
                        std::swap(a[p], a[q]);
                    }
            }
            results[r] = SearchResult{std::move(a), obj};
        });
        for (const auto& sr : results)
            if (sr.cost < best_obj - 1e-15) {
                best_obj = sr.cost;
                best = sr.a;
            }
    }
    // final reported value: full-restart cut-norm estimate of the difference
    auto d = diff_under_assignment(u, v, best);
    double upper;
    bool exact_norm = false;
    if (n <= cfg.cut_exact_cap) {
        upper = cut_norm_exact_raw(d.data(), n) / nn;
        exact_norm = true;
    } else {
        upper = cut_norm_alt_raw(d.data(), n, cfg.cut_restarts, cfg.seed) / nn;
    }
    MetricEstimate est;
    est.upper_bound = upper;
    est.lower_bound = 0.0;
    if (n <= cfg.dcut_exact_cap) {
        est.lower_bound = delta_cut_bruteforce(u, v, cfg.dcut_exact_cap).achieved_value;
    }
    est.lower_bound = std::min(est.lower_bound, est.upper_bound);
    est.alignment = to_alignment(best, upper, exact_norm && n <= cfg.dcut_exact_cap &&
                                                  upper - est.lower_bound <= 1e-15);
    est.approximate = approx;
    return est;
}

StepKernel geodesic(const StepKernel& u, const StepKernel& v, const Alignment& a, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("geodesic: t must lie in [0,1]");
    if (u.k() != v.k()) throw ConfigError("geodesic: kernels must share a common size");
    if (u.box().lo != v.box().lo || u.box().hi != v.box().hi)
        throw ConfigError("geodesic: kernels must share a box");
    const StepKernel vp = permute(v, a.perm);
    std::vector<double> w(u.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = (1.0 - t) * u.values()[i] + t * vp.values()[i];
    return StepKernel(u.k(), std::move(w), u.box());
}

}  // namespace gf
