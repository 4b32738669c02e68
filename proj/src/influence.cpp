#include "spinsim/influence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spinsim/distribution.hpp"
#include "spinsim/errors.hpp"

namespace spinsim {

namespace {

constexpr std::int64_t kColumnBudget = std::int64_t{1} << 22;

void check_column_budget(int q, int deg, int degree_cap, int v) {
    if (deg > degree_cap)
        throw CapacityError("influence: degree " + std::to_string(deg) + " at vertex " +
                            std::to_string(v) + " exceeds cap " + std::to_string(degree_cap) +
                            "; use the closed-form path for Ising Glauber");
    std::int64_t combos = 1;
    for (int i = 0; i <= deg; ++i) {
        if (combos > kColumnBudget / q)
            throw CapacityError("influence: q^(deg+1) exceeds 2^22 at vertex " +
                                std::to_string(v) +
                                "; use the closed-form path for Ising Glauber");
        combos *= q;
    }
}

// Max TV shift of P_v over all boundary pairs differing only at slot s.
double column_entry_brute(const LocalRule& rule, const Graph& g, int v, int slot) {
    const int q = rule.spin_count();
    const auto inc = g.inclusive_neighborhood(v);
    const int w = static_cast<int>(inc.size());
    std::vector<int> tau(static_cast<std::size_t>(w), 0);
    std::vector<double> pa(static_cast<std::size_t>(q)), pb(static_cast<std::size_t>(q));
    std::int64_t combos = 1;
    for (int i = 0; i < w; ++i) combos *= q;
    double worst = 0.0;
    for (std::int64_t idx = 0; idx < combos; ++idx) {
        std::int64_t r = idx;
        for (int i = 0; i < w; ++i) {
            tau[static_cast<std::size_t>(i)] = static_cast<int>(r % q);
            r /= q;
        }
        const int base = tau[static_cast<std::size_t>(slot)];
        rule.evaluate_into(v, tau, pa);
        // Compare against every strictly larger spin at the slot; smaller ones
        // were covered when the roles were swapped.
        for (int alt = base + 1; alt < q; ++alt) {
            tau[static_cast<std::size_t>(slot)] = alt;
            rule.evaluate_into(v, tau, pb);
            worst = std::max(worst, tv_distance(pa, pb));
        }
        tau[static_cast<std::size_t>(slot)] = base;
    }
    return worst;
}

}  // namespace

InfluenceMatrix::InfluenceMatrix(int n, std::vector<std::vector<std::pair<int, double>>> cols)
    : n_(n), cols_(std::move(cols)) {
    for (auto& col : cols_) std::sort(col.begin(), col.end());
}

double InfluenceMatrix::entry(int u, int v) const {
    const auto& col = cols_[static_cast<std::size_t>(v)];
    auto it = std::lower_bound(col.begin(), col.end(), std::make_pair(u, 0.0),
                               [](const auto& a, const auto& b) { return a.first < b.first; });
    if (it != col.end() && it->first == u) return it->second;
    return 0.0;
}

double InfluenceMatrix::column_sum(int v) const {
    double s = 0.0;
    for (const auto& [u, val] : cols_[static_cast<std::size_t>(v)]) s += val;
    return s;
}

std::vector<double> InfluenceMatrix::row_sums() const {
    std::vector<double> r(static_cast<std::size_t>(n_), 0.0);
    for (const auto& col : cols_)
        for (const auto& [u, val] : col) r[static_cast<std::size_t>(u)] += val;
    return r;
}

double influence_entry(const LocalRule& rule, const Graph& g, int u, int v) {
    if (u != v && !g.adjacent(u, v)) return 0.0;
    check_column_budget(rule.spin_count(), g.degree(v), 20, v);
    const auto inc = g.inclusive_neighborhood(v);
    const auto it = std::lower_bound(inc.begin(), inc.end(), u);
    const int slot = static_cast<int>(it - inc.begin());
    return column_entry_brute(rule, g, v, slot);
}

InfluenceMatrix influence_matrix_brute(const LocalRule& rule, const Graph& g, int degree_cap) {
    std::vector<std::vector<std::pair<int, double>>> cols(static_cast<std::size_t>(g.n()));
    for (int v = 0; v < g.n(); ++v) {
        check_column_budget(rule.spin_count(), g.degree(v), degree_cap, v);
        const auto inc = g.inclusive_neighborhood(v);
        for (int slot = 0; slot < static_cast<int>(inc.size()); ++slot) {
            const double val = column_entry_brute(rule, g, v, slot);
            if (val > 0.0) cols[static_cast<std::size_t>(v)].emplace_back(inc[static_cast<std::size_t>(slot)], val);
        }
    }
    return InfluenceMatrix(g.n(), std::move(cols));
}

InfluenceMatrix influence_matrix_ising_glauber(const ModelSpec& spec, const Graph& g) {
    spec.validate(g);
    if (spec.kind != ModelKind::IsingGlauber)
        throw InputError("influence_matrix_ising_glauber: spec is not IsingGlauber");
    std::vector<std::vector<std::pair<int, double>>> cols(static_cast<std::size_t>(g.n()));
    for (int v = 0; v < g.n(); ++v) {
        const int d = g.degree(v);
        if (d == 0) continue;
        const double lv = spec.lambda_at(v);
        // p1(k) over the count of spin-1 neighbours; flipping one neighbour
        // moves k by one, so the worst shift is max_k |p1(k+1) - p1(k)|.
        std::vector<double> p1(static_cast<std::size_t>(d) + 1);
        for (int k = 0; k <= d; ++k) {
            const double w = lv * std::pow(spec.beta, 2 * k - d);
            p1[static_cast<std::size_t>(k)] = w / (1.0 + w);
        }
        double worst = 0.0;
        for (int k = 0; k < d; ++k)
            worst = std::max(worst, std::abs(p1[static_cast<std::size_t>(k) + 1] -
                                             p1[static_cast<std::size_t>(k)]));
        if (worst > 0.0)
            for (int u : g.neighbors(v)) cols[static_cast<std::size_t>(v)].emplace_back(u, worst);
    }
    return InfluenceMatrix(g.n(), std::move(cols));
}

InfluenceMatrix influence_matrix(const ModelSpec& spec, const Graph& g, int degree_cap) {
    if (spec.kind == ModelKind::IsingGlauber) return influence_matrix_ising_glauber(spec, g);
    auto rule = make_rule(spec, g);
    return influence_matrix_brute(*rule, g, degree_cap);
}

double operator_norm(const InfluenceMatrix& rho, NormP p) {
    const int n = rho.n();
    if (p == NormP::One) {
        double best = 0.0;
        for (int v = 0; v < n; ++v) best = std::max(best, rho.column_sum(v));
        return best;
    }
    if (p == NormP::Inf) {
        const auto rows = rho.row_sums();
        double best = 0.0;
        for (double r : rows) best = std::max(best, r);
        return best;
    }
    // p=2: power iteration on rho^T rho; entries are non-negative so the
    // all-ones start vector has full overlap with the Perron direction.
    std::vector<double> x(static_cast<std::size_t>(n), 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> y(static_cast<std::size_t>(n)), z(static_cast<std::size_t>(n));
    double est = 0.0;
    constexpr double kTol = 1e-10;
    constexpr int kMaxIter = 10000;
    for (int it = 0; it < kMaxIter; ++it) {
        // y = rho x (column scatter), z = rho^T y (column gather).
        std::fill(y.begin(), y.end(), 0.0);
        for (int v = 0; v < n; ++v)
            for (const auto& [u, val] : rho.column(v))
                y[static_cast<std::size_t>(u)] += val * x[static_cast<std::size_t>(v)];
        double zz = 0.0;
        for (int v = 0; v < n; ++v) {
            double s = 0.0;
            for (const auto& [u, val] : rho.column(v)) s += val * y[static_cast<std::size_t>(u)];
            z[static_cast<std::size_t>(v)] = s;
            zz += s * s;
        }
        const double nz = std::sqrt(zz);
        if (nz == 0.0) return 0.0;
        // Rayleigh quotient of rho^T rho at the current unit vector x.
        double xz = 0.0;
        for (int v = 0; v < n; ++v) xz += x[static_cast<std::size_t>(v)] * z[static_cast<std::size_t>(v)];
        const double next = std::sqrt(std::max(0.0, xz));
        for (int v = 0; v < n; ++v) z[static_cast<std::size_t>(v)] /= nz;
        x.swap(z);
        if (it > 0 && std::abs(next - est) <= kTol * std::max(1.0, next)) return next;
        est = next;
    }
    throw DiagnosticError("operator_norm: power iteration did not converge within 10000 "
                          "iterations (last estimate " + std::to_string(est) + ")");
}

}  // namespace spinsim
