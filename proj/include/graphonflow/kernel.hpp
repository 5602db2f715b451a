#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "graphonflow/errors.hpp"
#include "graphonflow/rng.hpp"

namespace gf {

struct Box {
    double lo = 0.0;
    double hi = 1.0;
};

// Largest admissible kernel size (blow-ups included). Configurable so tests
// can exercise the size-limit error path.
int kernel_size_limit();
void set_kernel_size_limit(int n);

// A k-by-k symmetric matrix of edge weights with a box constraint; the block
// representation of a graphon at resolution k. Immutable after construction:
// every operation returns a new value.
class StepKernel {
public:
    StepKernel(int k, std::vector<double> values, Box box);

    static StepKernel constant(int k, double value, Box box);
    static StepKernel random_uniform(int k, Box box, Rng& rng);

    int k() const { return k_; }
    const Box& box() const { return box_; }
    double at(int i, int j) const { return v_[static_cast<std::size_t>(i) * k_ + j]; }
    const std::vector<double>& values() const { return v_; }
    const double* data() const { return v_.data(); }
    std::size_t size() const { return v_.size(); }

    // L2 norm of the represented kernel: (1/k)*frobenius(values)
    double l2_norm() const;

private:
    int k_;
    Box box_;
    std::vector<double> v_;
};

struct Permutation {
    std::vector<int> map;  // map[i] = image of block i

    explicit Permutation(std::vector<int> m);
    static Permutation identity(int n);
    static Permutation random(int n, Rng& rng);

    int n() const { return static_cast<int>(map.size()); }
    Permutation inverse() const;
    // (this ∘ other)(i) = this(other(i))
    Permutation compose(const Permutation& other) const;
};

// Undirected simple graph: the motif H of homomorphism functionals.
struct SimpleGraph {
    int n_vertices;
    std::vector<std::pair<int, int>> edges;  // 0-based, i < j, no duplicates

    SimpleGraph(int n, std::vector<std::pair<int, int>> e);

    int n_edges() const { return static_cast<int>(edges.size()); }
    std::vector<int> degrees() const;
};

SimpleGraph edge_graph();
SimpleGraph path_graph(int n_vertices);
SimpleGraph cycle_graph(int n_vertices);
SimpleGraph star_graph(int n_vertices);  // one hub, n-1 leaves
SimpleGraph triangle_graph();
SimpleGraph complete_graph(int n_vertices);
// Disjoint union, vertices of b relabeled after a's.
SimpleGraph disjoint_union(const SimpleGraph& a, const SimpleGraph& b);

// Builtin names accepted where a graph file is expected:
// edge, path<n>, cycle<n>, star<n>, triangle, complete<n>.
bool is_builtin_graph_name(const std::string& name);
SimpleGraph builtin_graph(const std::string& name);

// Each entry of W replicated into an r-by-r block; same graphon.
StepKernel blow_up(const StepKernel& w, int r);

// Simultaneous row/column permutation; same graphon class.
StepKernel permute(const StepKernel& w, const Permutation& p);

// Entrywise symmetric matrix permutation (used for derivative equivariance).
std::vector<double> permute_matrix(const std::vector<double>& values, int k,
                                   const Permutation& p);

// Block-average down to resolution k (k must divide w.k()).
StepKernel block_average(const StepKernel& w, int k);

// Same vertex set, edges minus e. Throws DomainError if e is absent.
SimpleGraph edge_deleted(const SimpleGraph& h, std::pair<int, int> e);

// --- file formats ---
// Kernel CSV: header line `# graphon k=<k> lo=<lo> hi=<hi>`, then k rows of
// k comma-separated decimals.
StepKernel read_kernel_csv(const std::string& path);
void write_kernel_csv(const StepKernel& w, const std::string& path);
StepKernel parse_kernel_csv(const std::string& text, const std::string& origin);
std::string format_kernel_csv(const StepKernel& w);

// Graph file: first line `<nV>`, then `<i> <j>` (1-based) per edge.
SimpleGraph read_graph_file(const std::string& path);
void write_graph_file(const SimpleGraph& h, const std::string& path);
SimpleGraph parse_graph_file(const std::string& text, const std::string& origin);

// 8-bit grayscale PGM heatmap: P5, maxval 255, v -> round(255*(v-lo)/(hi-lo)).
void write_kernel_pgm(const StepKernel& w, const std::string& path);

}  // namespace gf
