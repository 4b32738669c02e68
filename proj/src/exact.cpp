#include "spinsim/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spinsim/errors.hpp"

namespace spinsim {

namespace {

// q^n with overflow guard against the enumeration budget.
std::int64_t pow_checked(int q, int n, std::int64_t budget) {
    std::int64_t s = 1;
    for (int i = 0; i < n; ++i) {
        if (s > budget / q)
            throw CapacityError("enumeration: q^n exceeds budget (q=" + std::to_string(q) +
                                ", n=" + std::to_string(n) + ")");
        s *= q;
    }
    return s;
}

constexpr std::int64_t kEnumBudget = std::int64_t{1} << 24;

}  // namespace

std::int64_t config_index(const SpinConfig& x, int q) {
    std::int64_t idx = 0, base = 1;
    for (std::size_t v = 0; v < x.size(); ++v) {
        idx += static_cast<std::int64_t>(x[v]) * base;
        base *= q;
    }
    return idx;
}

SpinConfig config_from_index(std::int64_t idx, int n, int q) {
    SpinConfig x(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
        x[static_cast<std::size_t>(v)] = static_cast<int>(idx % q);
        idx /= q;
    }
    return x;
}

std::vector<double> exact_gibbs_distribution(const ModelSpec& spec, const Graph& g) {
    spec.validate(g);
    const int n = g.n();
    const int q = spec.q;
    const std::int64_t total = pow_checked(q, n, kEnumBudget);
    const bool coloring = spec.kind == ModelKind::ColoringGlauber;
    const double log_beta = coloring ? 0.0 : std::log(spec.beta);

    // Log-weights first; a single max-shift keeps exp() in range for any
    // beta and edge count that fits the budget.
    std::vector<double> logw(static_cast<std::size_t>(total),
                             -std::numeric_limits<double>::infinity());
    SpinConfig x(static_cast<std::size_t>(n), 0);
    double best = -std::numeric_limits<double>::infinity();
    for (std::int64_t idx = 0; idx < total; ++idx) {
        int mono = 0;
        for (auto [u, v] : g.edges())
            if (x[static_cast<std::size_t>(u)] == x[static_cast<std::size_t>(v)]) ++mono;
        double lw;
        if (coloring) {
            if (mono > 0) {
                lw = -std::numeric_limits<double>::infinity();
            } else {
                lw = 0.0;
            }
        } else {
            lw = mono * log_beta;
            if (q == 2)
                for (int v = 0; v < n; ++v)
                    if (x[static_cast<std::size_t>(v)] == 1) lw += std::log(spec.lambda_at(v));
        }
        logw[static_cast<std::size_t>(idx)] = lw;
        best = std::max(best, lw);
        // Odometer step keeps the index/config correspondence explicit.
        for (int v = 0; v < n; ++v) {
            if (++x[static_cast<std::size_t>(v)] < q) break;
            x[static_cast<std::size_t>(v)] = 0;
        }
    }
    if (!std::isfinite(best))
        throw InputError("exact_gibbs_distribution: no configuration has positive weight "
                         "(no proper coloring exists)");
    std::vector<double> p(static_cast<std::size_t>(total));
    double norm = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::exp(logw[i] - best);
        norm += p[i];
    }
    for (auto& v : p) v /= norm;
    return p;
}

std::vector<double> exact_site_marginal(const std::vector<double>& table, int n, int q, int v) {
    std::vector<double> m(static_cast<std::size_t>(q), 0.0);
    std::int64_t stride = 1;
    for (int i = 0; i < v; ++i) stride *= q;
    for (std::size_t idx = 0; idx < table.size(); ++idx) {
        const int spin = static_cast<int>((static_cast<std::int64_t>(idx) / stride) % q);
        m[static_cast<std::size_t>(spin)] += table[idx];
    }
    (void)n;
    return m;
}

}  // namespace spinsim
