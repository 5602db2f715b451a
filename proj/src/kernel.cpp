#include "graphonflow/kernel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "graphonflow/ops.hpp"

namespace gf {

namespace {
int g_size_limit = 2048;

[[noreturn]] void csv_fail(const std::string& origin, int line, int col, const std::string& msg) {
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
}
}  // namespace

int kernel_size_limit() { return g_size_limit; }
void set_kernel_size_limit(int n) {
    if (n < 1) throw ConfigError("kernel size limit must be positive");
    g_size_limit = n;
}

StepKernel::StepKernel(int k, std::vector<double> values, Box box)
    : k_(k), box_(box), v_(std::move(values)) {
    if (k < 1) throw ConfigError("kernel size must be positive");
    if (k > g_size_limit)
        throw SizeLimitError("kernel size " + std::to_string(k) + " exceeds limit " +
                             std::to_string(g_size_limit));
    if (!(box.lo >= -1.0 && box.lo < box.hi && box.hi <= 1.0))
        throw ConfigError("box must satisfy -1 <= lo < hi <= 1");
    if (v_.size() != static_cast<std::size_t>(k) * k)
        throw ConfigError("kernel value array has wrong size");
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < i; ++j)
            if (v_[static_cast<std::size_t>(i) * k + j] != v_[static_cast<std::size_t>(j) * k + i])
                throw DomainError("kernel not symmetric at (" + std::to_string(i + 1) + "," +
                                  std::to_string(j + 1) + ")");
    for (std::size_t t = 0; t < v_.size(); ++t) {
        if (!std::isfinite(v_[t])) throw DomainError("kernel entry not finite");
        if (v_[t] < box.lo || v_[t] > box.hi)
            throw DomainError("kernel entry " + std::to_string(v_[t]) + " outside box [" +
                              std::to_string(box.lo) + "," + std::to_string(box.hi) + "]");
    }
}

StepKernel StepKernel::constant(int k, double value, Box box) {
    return StepKernel(k, std::vector<double>(static_cast<std::size_t>(k) * k, value), box);
}

StepKernel StepKernel::random_uniform(int k, Box box, Rng& rng) {
    std::vector<double> v(static_cast<std::size_t>(k) * k);
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
            const double x = rng.uniform(box.lo, box.hi);
            v[static_cast<std::size_t>(i) * k + j] = x;
            v[static_cast<std::size_t>(j) * k + i] = x;
        }
    return StepKernel(k, std::move(v), box);
}

double StepKernel::l2_norm() const {
    return std::sqrt(ops::dot(v_.data(), v_.data(), v_.size())) / k_;
}

Permutation::Permutation(std::vector<int> m) : map(std::move(m)) {
    const int n = static_cast<int>(map.size());
    if (n == 0) throw ConfigError("empty permutation");
    std::vector<char> seen(n, 0);
    for (int x : map) {
        if (x < 0 || x >= n || seen[x]) throw ConfigError("permutation is not a bijection");
        seen[x] = 1;
    }
}

Permutation Permutation::identity(int n) {
    std::vector<int> m(n);
    std::iota(m.begin(), m.end(), 0);
    return Permutation(std::move(m));
}

Permutation Permutation::random(int n, Rng& rng) {
    std::vector<int> m(n);
    std::iota(m.begin(), m.end(), 0);
    for (int i = n - 1; i > 0; --i)
        std::swap(m[i], m[static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1))]);
    return Permutation(std::move(m));
}

Permutation Permutation::inverse() const {
    std::vector<int> inv(map.size());
    for (int i = 0; i < n(); ++i) inv[map[i]] = i;
    return Permutation(std::move(inv));
}

Permutation Permutation::compose(const Permutation& other) const {
    if (n() != other.n()) throw ConfigError("permutation size mismatch");
    std::vector<int> m(map.size());
    for (int i = 0; i < n(); ++i) m[i] = map[other.map[i]];
    return Permutation(std::move(m));
}

SimpleGraph::SimpleGraph(int n, std::vector<std::pair<int, int>> e)
    : n_vertices(n), edges(std::move(e)) {
    if (n < 1) throw ConfigError("graph must have at least one vertex");
    for (auto& [a, b] : edges) {
        if (a == b) throw ConfigError("graph has a loop at vertex " + std::to_string(a + 1));
        if (a > b) std::swap(a, b);
        if (a < 0 || b >= n) throw ConfigError("edge endpoint out of range");
    }
    std::sort(edges.begin(), edges.end());
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (edges[i] == edges[i - 1]) throw ConfigError("duplicate edge in graph");
}

std::vector<int> SimpleGraph::degrees() const {
    std::vector<int> d(n_vertices, 0);
    for (auto [a, b] : edges) {
        ++d[a];
        ++d[b];
    }
    return d;
}

SimpleGraph edge_graph() { return SimpleGraph(2, {{0, 1}}); }

SimpleGraph path_graph(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return SimpleGraph(n, std::move(e));
}

SimpleGraph cycle_graph(int n) {
    if (n < 3) throw ConfigError("cycle needs at least 3 vertices");
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
    return SimpleGraph(n, std::move(e));
}

SimpleGraph star_graph(int n) {
    if (n < 2) throw ConfigError("star needs at least 2 vertices");
    std::vector<std::pair<int, int>> e;
    for (int i = 1; i < n; ++i) e.emplace_back(0, i);
    return SimpleGraph(n, std::move(e));
}

SimpleGraph triangle_graph() { return cycle_graph(3); }

SimpleGraph complete_graph(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return SimpleGraph(n, std::move(e));
}

SimpleGraph disjoint_union(const SimpleGraph& a, const SimpleGraph& b) {
    std::vector<std::pair<int, int>> e = a.edges;
    for (auto [x, y] : b.edges) e.emplace_back(x + a.n_vertices, y + a.n_vertices);
    return SimpleGraph(a.n_vertices + b.n_vertices, std::move(e));
}

namespace {
bool parse_sized_name(const std::string& name, const std::string& prefix, int& n) {
    if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0) return false;
    for (std::size_t i = prefix.size(); i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) return false;
    n = std::atoi(name.c_str() + prefix.size());
    return true;
}
}  // namespace

bool is_builtin_graph_name(const std::string& name) {
    int n;
    return name == "edge" || name == "triangle" || parse_sized_name(name, "path", n) ||
           parse_sized_name(name, "cycle", n) || parse_sized_name(name, "star", n) ||
           parse_sized_name(name, "complete", n);
}

SimpleGraph builtin_graph(const std::string& name) {
    int n;
    if (name == "edge") return edge_graph();
    if (name == "triangle") return triangle_graph();
    if (parse_sized_name(name, "path", n)) return path_graph(n);
    if (parse_sized_name(name, "cycle", n)) return cycle_graph(n);
    if (parse_sized_name(name, "star", n)) return star_graph(n);
    if (parse_sized_name(name, "complete", n)) return complete_graph(n);
    throw ConfigError("unknown builtin graph '" + name + "'");
}

StepKernel blow_up(const StepKernel& w, int r) {
    if (r < 1) throw ConfigError("blow-up factor must be >= 1");
    const long long nk = static_cast<long long>(w.k()) * r;
    if (nk > g_size_limit)
        throw SizeLimitError("blow-up size " + std::to_string(nk) + " exceeds limit " +
                             std::to_string(g_size_limit));
    const int n = static_cast<int>(nk);
    std::vector<double> v(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            v[static_cast<std::size_t>(i) * n + j] = w.at(i / r, j / r);
    return StepKernel(n, std::move(v), w.box());
}

std::vector<double> permute_matrix(const std::vector<double>& values, int k,
                                   const Permutation& p) {
    if (p.n() != k) throw ConfigError("permutation size mismatch");
    std::vector<double> v(values.size());
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            v[static_cast<std::size_t>(p.map[i]) * k + p.map[j]] =
                values[static_cast<std::size_t>(i) * k + j];
    return v;
}

StepKernel permute(const StepKernel& w, const Permutation& p) {
    return StepKernel(w.k(), permute_matrix(w.values(), w.k(), p), w.box());
}

StepKernel block_average(const StepKernel& w, int k) {
    if (k < 1 || w.k() % k != 0)
        throw ConfigError("block_average: target size must divide kernel size");
    const int r = w.k() / k;
    std::vector<double> v(static_cast<std::size_t>(k) * k, 0.0);
    for (int i = 0; i < w.k(); ++i)
        for (int j = 0; j < w.k(); ++j)
            v[static_cast<std::size_t>(i / r) * k + j / r] += w.at(i, j);
    const double scale = 1.0 / (static_cast<double>(r) * r);
    for (auto& x : v) x *= scale;
    // averaging can drift a hair outside the box in float; snap back
    for (auto& x : v) x = std::min(w.box().hi, std::max(w.box().lo, x));
    return StepKernel(k, std::move(v), w.box());
}

SimpleGraph edge_deleted(const SimpleGraph& h, std::pair<int, int> e) {
    if (e.first > e.second) std::swap(e.first, e.second);
    auto edges = h.edges;
    auto it = std::find(edges.begin(), edges.end(), e);
    if (it == edges.end())
        throw DomainError("edge (" + std::to_string(e.first + 1) + "," +
                          std::to_string(e.second + 1) + ") not present");
    edges.erase(it);
    return SimpleGraph(h.n_vertices, std::move(edges));
}

// --- kernel CSV ---

std::string format_kernel_csv(const StepKernel& w) {
    std::string out;
    char buf[128];
    std::snprintf(buf, sizeof buf, "# graphon k=%d lo=%.17g hi=%.17g\n", w.k(), w.box().lo,
                  w.box().hi);
    out += buf;
    for (int i = 0; i < w.k(); ++i) {
        for (int j = 0; j < w.k(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", w.at(i, j));
            out += buf;
            out += (j + 1 < w.k()) ? "," : "\n";
        }
    }
    return out;
}

StepKernel parse_kernel_csv(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) csv_fail(origin, 1, 1, "empty file");
    int k = 0;
    double lo = 0.0, hi = 0.0;
    if (std::sscanf(line.c_str(), "# graphon k=%d lo=%lf hi=%lf", &k, &lo, &hi) != 3)
        csv_fail(origin, 1, 1, "expected header '# graphon k=<k> lo=<lo> hi=<hi>'");
    if (k < 1) csv_fail(origin, 1, 1, "invalid size in header");
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(k) * k);
    for (int row = 0; row < k; ++row) {
        if (!std::getline(in, line)) csv_fail(origin, row + 2, 1, "missing row");
        const char* p = line.c_str();
        for (int col = 0; col < k; ++col) {
            char* end = nullptr;
            const double x = std::strtod(p, &end);
            if (end == p)
                csv_fail(origin, row + 2, static_cast<int>(p - line.c_str()) + 1,
                         "expected a number");
            v.push_back(x);
            p = end;
            while (*p == ' ') ++p;
            if (col + 1 < k) {
                if (*p != ',')
                    csv_fail(origin, row + 2, static_cast<int>(p - line.c_str()) + 1,
                             "expected ','");
                ++p;
            }
        }
        while (*p == ' ' || *p == '\r') ++p;
        if (*p != '\0')
            csv_fail(origin, row + 2, static_cast<int>(p - line.c_str()) + 1,
                     "trailing characters");
    }
    try {
        return StepKernel(k, std::move(v), Box{lo, hi});
    } catch (const std::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
}

StepKernel read_kernel_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open kernel file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_kernel_csv(ss.str(), path);
}

void write_kernel_csv(const StepKernel& w, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write kernel file '" + path + "'");
    out << format_kernel_csv(w);
}

// --- graph file ---

SimpleGraph parse_graph_file(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    int n = -1;
    std::vector<std::pair<int, int>> edges;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        if (n < 0) {
            if (!(ls >> n) || n < 1) csv_fail(origin, lineno, 1, "expected vertex count");
            continue;
        }
        int a, b;
        if (!(ls >> a)) continue;  // blank line
        if (!(ls >> b)) csv_fail(origin, lineno, 1, "expected '<i> <j>'");
        if (a < 1 || a > n || b < 1 || b > n)
            csv_fail(origin, lineno, 1, "vertex index out of range [1," + std::to_string(n) + "]");
        edges.emplace_back(a - 1, b - 1);
    }
    if (n < 0) csv_fail(origin, 1, 1, "empty graph file");
    try {
        return SimpleGraph(n, std::move(edges));
    } catch (const std::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
}

SimpleGraph read_graph_file(const std::string& path) {
    if (is_builtin_graph_name(path)) return builtin_graph(path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open graph file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_graph_file(ss.str(), path);
}

void write_graph_file(const SimpleGraph& h, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write graph file '" + path + "'");
    out << h.n_vertices << "\n";
    for (auto [a, b] : h.edges) out << (a + 1) << " " << (b + 1) << "\n";
}

void write_kernel_pgm(const StepKernel& w, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write pgm file '" + path + "'");
    out << "P5\n" << w.k() << " " << w.k() << "\n255\n";
    const double lo = w.box().lo, hi = w.box().hi;
    std::vector<unsigned char> row(static_cast<std::size_t>(w.k()));
    for (int i = 0; i < w.k(); ++i) {
        for (int j = 0; j < w.k(); ++j) {
            const double t = (w.at(i, j) - lo) / (hi - lo);
            row[j] = static_cast<unsigned char>(std::lround(255.0 * t));
        }
        out.write(reinterpret_cast<const char*>(row.data()), row.size());
    }
}

}  // namespace gf
