#pragma once

#include <optional>
#include <string>
#include <vector>

#include "graphonflow/kernel.hpp"

namespace gf {

// Largest motif handled by exact enumeration unless a path/cycle/star fast
// path applies.
constexpr int kDefaultMotifCap = 6;

enum class TermKind { Entropy, Hom, Interaction };

struct Term {
    double coef = 1.0;
    TermKind kind = TermKind::Entropy;
    std::optional<SimpleGraph> h;   // Hom: the motif; Interaction: H
    std::optional<SimpleGraph> h1;  // Interaction only
    std::optional<SimpleGraph> h2;  // Interaction only
    std::optional<double> lambda_bound;  // user bound for interaction terms
};

// Declarative description of F = sum_i coef_i * term_i with its domain box.
struct FunctionalSpec {
    std::vector<Term> terms;
    Box domain_box{0.0, 1.0};
    int motif_cap = kDefaultMotifCap;

    FunctionalSpec() = default;
    FunctionalSpec(std::vector<Term> t, Box box, int cap = kDefaultMotifCap);

    bool needs_strict_unit_interval() const;  // any entropy/interaction term

    static FunctionalSpec entropy(Box box);
    static FunctionalSpec hom(SimpleGraph h, Box box, double coef = 1.0);
    // The Mantel objective T_triangle - T_edge/10.
    static FunctionalSpec mantel(Box box);
};

// phi = D_W f(W): entries of the Fréchet-like derivative at W, one value per
// block pair; equals k^2 times the Euclidean gradient of the matrix
// restriction.
struct DerivativeKernel {
    int k = 0;
    std::vector<double> values;
    StepKernel paired_with;

    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * k + j]; }
};

// Entries where the flow may move without exiting the box: interior entries
// plus boundary entries whose velocity -phi points inward.
struct BoundaryMask {
    int k = 0;
    std::vector<std::uint8_t> active;

    bool at(int i, int j) const { return active[static_cast<std::size_t>(i) * k + j] != 0; }
    bool all_active() const;
};

// --- scalar entropy ---
double entropy_value(const StepKernel& w);
DerivativeKernel entropy_derivative(const StepKernel& w);

// --- homomorphism densities ---
double hom_density(const SimpleGraph& h, const StepKernel& w, int motif_cap = kDefaultMotifCap);
DerivativeKernel hom_derivative(const SimpleGraph& h, const StepKernel& w,
                                int motif_cap = kDefaultMotifCap);

// Partially labeled density t_{(a,b)}(H, W) with H's vertices pin_u at the
// row block and pin_v at the column block; returns a k*k matrix. Exposed for
// oracles and tests.
std::vector<double> hom_density_pinned(const SimpleGraph& h, int pin_u, int pin_v,
                                       const StepKernel& w);

// --- interaction energy ---
// I = log t_{H1} + log t_{H2} - 2 log t_H; requires every edge of H covered
// by H1 or H2 (all three graphs share H's vertex numbering).
double interaction_value(const SimpleGraph& h1, const SimpleGraph& h2, const SimpleGraph& h,
                         const StepKernel& w, int motif_cap = kDefaultMotifCap);
DerivativeKernel interaction_derivative(const SimpleGraph& h1, const SimpleGraph& h2,
                                        const SimpleGraph& h, const StepKernel& w,
                                        int motif_cap = kDefaultMotifCap);

// --- assembled functional ---
double evaluate(const FunctionalSpec& spec, const StepKernel& w);
DerivativeKernel derivative(const FunctionalSpec& spec, const StepKernel& w);

BoundaryMask boundary_mask(const StepKernel& w, const DerivativeKernel& phi, Box box,
                           double boundary_tol = 1e-12);

// |dF|([W]) = (1/k) * frobenius(phi masked by the boundary rule).
double local_slope(const FunctionalSpec& spec, const StepKernel& w);

struct SemiconvexityReport {
    double lambda = 0.0;        // sum of known contributions (sparse hom bound)
    double lambda_crude = 0.0;  // same with the crude hom bound
    bool known = true;          // false if any term contributes no bound
    std::vector<std::string> notes;
};
SemiconvexityReport semiconvexity_constant(const FunctionalSpec& spec);

// spec.json: {"terms":[{"coef":1.0,"kind":"entropy"}|
//                      {"coef":-0.1,"kind":"hom","graph":"edge"}|
//                      {"coef":1.0,"kind":"interaction","graph1":...,"graph2":...,"graph":...}],
//             "box":[0.05,0.95]}
// Graph fields take builtin names or paths relative to the spec file.
FunctionalSpec load_functional_spec(const std::string& path);
FunctionalSpec parse_functional_spec(const std::string& json_text, const std::string& base_dir);

}  // namespace gf
