#include "spinsim/model.hpp"

#include <cmath>
#include <string>

#include "spinsim/errors.hpp"

namespace spinsim {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::IsingGlauber: return "IsingGlauber";
        case ModelKind::IsingMetropolis: return "IsingMetropolis";
        case ModelKind::PottsGlauber: return "PottsGlauber";
        case ModelKind::ColoringGlauber: return "ColoringGlauber";
    }
    throw InputError("unknown model kind");
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "IsingGlauber") return ModelKind::IsingGlauber;
    if (s == "IsingMetropolis") return ModelKind::IsingMetropolis;
    if (s == "PottsGlauber") return ModelKind::PottsGlauber;
    if (s == "ColoringGlauber") return ModelKind::ColoringGlauber;
    throw InputError("unknown model kind '" + s + "'");
}

ModelSpec ModelSpec::ising_glauber(double beta, std::vector<double> lambda) {
    return ModelSpec{ModelKind::IsingGlauber, 2, beta, std::move(lambda)};
}
ModelSpec ModelSpec::ising_metropolis(double beta, std::vector<double> lambda) {
    return ModelSpec{ModelKind::IsingMetropolis, 2, beta, std::move(lambda)};
}
ModelSpec ModelSpec::potts_glauber(int q, double beta) {
    return ModelSpec{ModelKind::PottsGlauber, q, beta, {}};
}
ModelSpec ModelSpec::coloring_glauber(int q) {
    return ModelSpec{ModelKind::ColoringGlauber, q, 0.0, {}};
}

void ModelSpec::validate(const Graph& g) const {
    if (q < 2) throw InputError("model: spin count q must be >= 2");
    const bool ising = kind == ModelKind::IsingGlauber || kind == ModelKind::IsingMetropolis;
    if (ising && q != 2) throw InputError("model: Ising requires q = 2");
    if (kind == ModelKind::ColoringGlauber) {
        if (beta != 0.0) throw InputError("model: coloring has no edge activity (beta must be 0)");
    } else if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw InputError("model: edge activity beta must be a positive real");
    }
    if (!lambda.empty()) {
        if (!ising) throw InputError("model: lambda fields are only defined for Ising");
        if (static_cast<int>(lambda.size()) != g.n())
            throw InputError("model: lambda has " + std::to_string(lambda.size()) +
                             " entries but the graph has " + std::to_string(g.n()) + " vertices");
        for (double l : lambda)
            if (!(l > 0.0) || !std::isfinite(l))
                throw InputError("model: lambda entries must be positive reals");
    }
}

bool ModelSpec::coloring_regime_ok(const Graph& g) const {
    if (kind != ModelKind::ColoringGlauber) return true;
    return q >= g.max_degree() + 2;
}

Distribution LocalRule::evaluate(int v, std::span<const int> tau) const {
    std::vector<double> out(static_cast<std::size_t>(spin_count()), 0.0);
    evaluate_into(v, tau, out);
    return Distribution(std::move(out));
}

namespace {

// Heat-bath conditional for Ising: with k spin-1 neighbours out of d,
// P(1) = lambda_v * beta^(2k-d) / (1 + lambda_v * beta^(2k-d)).  The tables
// are precomputed per vertex so a sweep costs a count and a lookup.
class IsingTables {
public:
    IsingTables(const ModelSpec& spec, const Graph& g) {
        p1_.resize(static_cast<std::size_t>(g.n()));
        for (int v = 0; v < g.n(); ++v) {
            const int d = g.degree(v);
            const double lv = spec.lambda_at(v);
            auto& row = p1_[static_cast<std::size_t>(v)];
            row.resize(static_cast<std::size_t>(d) + 1);
            for (int k = 0; k <= d; ++k) {
                const double w = lv * std::pow(spec.beta, 2 * k - d);
                row[static_cast<std::size_t>(k)] = w / (1.0 + w);
            }
        }
    }
    double p1(int v, int k) const {
        return p1_[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)];
    }

private:
    std::vector<std::vector<double>> p1_;
};

int count_ones(std::span<const int> tau, int self_slot) {
    int k = 0;
    for (std::size_t s = 0; s < tau.size(); ++s)
        if (static_cast<int>(s) != self_slot && tau[s] == 1) ++k;
    return k;
}

class IsingGlauberRule final : public LocalRule {
public:
    IsingGlauberRule(const ModelSpec& spec, const Graph& g) : g_(g), tables_(spec, g) {}
    int spin_count() const override { return 2; }
    void evaluate_into(int v, std::span<const int> tau, std::span<double> out) const override {
        const double p1 = tables_.p1(v, count_ones(tau, g_.self_slot(v)));
        out[0] = 1.0 - p1;
        out[1] = p1;
    }

private:
    const Graph& g_;
    IsingTables tables_;
};

class IsingMetropolisRule final : public LocalRule {
public:
    IsingMetropolisRule(const ModelSpec& spec, const Graph& g) : g_(g), tables_(spec, g) {}
    int spin_count() const override { return 2; }
    void evaluate_into(int v, std::span<const int> tau, std::span<double> out) const override {
        const int self = g_.self_slot(v);
        const double p1 = tables_.p1(v, count_ones(tau, self));
        const int cur = tau[static_cast<std::size_t>(self)];
        // Proposal 1/2 each; acceptance min{1, mu(x)/mu(cur)}; leftover mass
        // stays on the current spin, so the rule depends on tau_v itself.
        const double mu_cur = cur == 1 ? p1 : 1.0 - p1;
        const double mu_oth = cur == 1 ? 1.0 - p1 : p1;
        const double flip = 0.5 * std::min(1.0, mu_oth / mu_cur);
        out[static_cast<std::size_t>(1 - cur)] = flip;
        out[static_cast<std::size_t>(cur)] = 1.0 - flip;
    }

private:
    const Graph& g_;
    IsingTables tables_;
};

class PottsGlauberRule final : public LocalRule {
public:
    PottsGlauberRule(const ModelSpec& spec, const Graph& g)
        : g_(g), q_(spec.q) {
        pow_beta_.resize(static_cast<std::size_t>(g.max_degree()) + 1);
        for (std::size_t k = 0; k < pow_beta_.size(); ++k)
            pow_beta_[k] = std::pow(spec.beta, static_cast<double>(k));
    }
    int spin_count() const override { return q_; }
    void evaluate_into(int v, std::span<const int> tau, std::span<double> out) const override {
        const int self = g_.self_slot(v);
        for (int c = 0; c < q_; ++c) out[static_cast<std::size_t>(c)] = 0.0;
        thread_local std::vector<int> cnt;
        cnt.assign(static_cast<std::size_t>(q_), 0);
        for (std::size_t s = 0; s < tau.size(); ++s)
            if (static_cast<int>(s) != self) ++cnt[static_cast<std::size_t>(tau[s])];
        double norm = 0.0;
        for (int c = 0; c < q_; ++c) {
            const double w = pow_beta_[static_cast<std::size_t>(cnt[static_cast<std::size_t>(c)])];
            out[static_cast<std::size_t>(c)] = w;
            norm += w;
        }
        for (int c = 0; c < q_; ++c) out[static_cast<std::size_t>(c)] /= norm;
    }

private:
    const Graph& g_;
    int q_;
    std::vector<double> pow_beta_;
};

class ColoringGlauberRule final : public LocalRule {
public:
    ColoringGlauberRule(const ModelSpec& spec, const Graph& g) : g_(g), q_(spec.q) {}
    int spin_count() const override { return q_; }
    void evaluate_into(int v, std::span<const int> tau, std::span<double> out) const override {
        const int self = g_.self_slot(v);
        for (int c = 0; c < q_; ++c) out[static_cast<std::size_t>(c)] = 0.0;
        int free_colors = q_;
        for (std::size_t s = 0; s < tau.size(); ++s) {
            if (static_cast<int>(s) == self) continue;
            auto& slot = out[static_cast<std::size_t>(tau[s])];
            if (slot == 0.0) {
                slot = -1.0;  // mark blocked
                --free_colors;
            }
        }
        if (free_colors == 0)
            throw DegenerateDistributionError(
                "coloring: neighbours of vertex " + std::to_string(v) + " block all " +
                std::to_string(q_) + " colors");
        const double p = 1.0 / static_cast<double>(free_colors);
        for (int c = 0; c < q_; ++c) {
            auto& slot = out[static_cast<std::size_t>(c)];
            slot = slot == 0.0 ? p : 0.0;
        }
    }

private:
    const Graph& g_;
    int q_;
};

}  // namespace

std::unique_ptr<LocalRule> glauber_rule(const ModelSpec& spec, const Graph& g) {
    spec.validate(g);
    switch (spec.kind) {
        case ModelKind::IsingGlauber: return std::make_unique<IsingGlauberRule>(spec, g);
        case ModelKind::PottsGlauber: return std::make_unique<PottsGlauberRule>(spec, g);
        case ModelKind::ColoringGlauber: return std::make_unique<ColoringGlauberRule>(spec, g);
        case ModelKind::IsingMetropolis:
            throw InputError("glauber_rule: spec requests the Metropolis filter");
    }
    throw InputError("glauber_rule: unknown kind");
}

std::unique_ptr<LocalRule> metropolis_rule(const ModelSpec& spec, const Graph& g) {
    spec.validate(g);
    if (spec.kind != ModelKind::IsingMetropolis)
        throw InputError("metropolis_rule: spec is not IsingMetropolis");
    return std::make_unique<IsingMetropolisRule>(spec, g);
}

std::unique_ptr<LocalRule> make_rule(const ModelSpec& spec, const Graph& g) {
    if (spec.kind == ModelKind::IsingMetropolis) return metropolis_rule(spec, g);
    return glauber_rule(spec, g);
}

}  // namespace spinsim
