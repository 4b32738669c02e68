#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "spinsim/distribution.hpp"
#include "spinsim/graph.hpp"

namespace spinsim {

enum class ModelKind {
    IsingGlauber,
    IsingMetropolis,
    PottsGlauber,
    ColoringGlauber,
};

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

// Parameters of a spin system.  Spins are {0,...,q-1}; for Ising (q=2) spin 1
// carries the vertex activity lambda_v.  The Gibbs weight of a configuration
// is beta^{#monochromatic edges} * prod_v lambda_v^{sigma_v}, with beta=0 for
// proper colorings (0^0 = 1, so exactly the proper colorings survive).
struct ModelSpec {
    ModelKind kind = ModelKind::IsingGlauber;
    int q = 2;
    double beta = 1.0;
    std::vector<double> lambda;  // empty = all-ones; scalar broadcast happens in the parser

    static ModelSpec ising_glauber(double beta, std::vector<double> lambda = {});
    static ModelSpec ising_metropolis(double beta, std::vector<double> lambda = {});
    static ModelSpec potts_glauber(int q, double beta);
    static ModelSpec coloring_glauber(int q);

    // Structural checks plus lambda-length agreement with the graph.
    void validate(const Graph& g) const;

    double lambda_at(int v) const {
        return lambda.empty() ? 1.0 : lambda[static_cast<std::size_t>(v)];
    }

    // Colorings are meaningful for q >= max_degree+2; this is advisory only.
    bool coloring_regime_ok(const Graph& g) const;
};

// A single-site update rule: for vertex v and a boundary condition tau on the
// inclusive neighbourhood (indexed parallel to graph.inclusive_neighborhood(v))
// it yields the distribution the new spin of v is drawn from.  Implementations
// read only coordinates inside that index set.
class LocalRule {
public:
    virtual ~LocalRule() = default;

    virtual int spin_count() const = 0;

    // Hot path: write the q probabilities into `out` (size >= spin_count()).
    virtual void evaluate_into(int v, std::span<const int> tau, std::span<double> out) const = 0;

    Distribution evaluate(int v, std::span<const int> tau) const;
};

// Heat-bath rules: the new spin is drawn from the Gibbs conditional given the
// neighbour spins; the old spin of v is ignored.
std::unique_ptr<LocalRule> glauber_rule(const ModelSpec& spec, const Graph& g);

// Metropolis filter (Ising): propose uniformly, accept with
// min{1, mu(x)/mu(tau_v)}, put the rejected mass back on tau_v.
std::unique_ptr<LocalRule> metropolis_rule(const ModelSpec& spec, const Graph& g);

// Dispatch on spec.kind.
std::unique_ptr<LocalRule> make_rule(const ModelSpec& spec, const Graph& g);

}  // namespace spinsim
