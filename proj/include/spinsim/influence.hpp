#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "spinsim/graph.hpp"
#include "spinsim/model.hpp"

namespace spinsim {

// Site-to-site influence: rho(u,v) is the largest total-variation shift of
// the update distribution of v caused by changing the boundary spin at u
// alone (u,v inside the inclusive neighbourhood; zero for distinct
// non-adjacent pairs).  Stored column-sparse: column v holds entries for
// u in N_v^+ only.
class InfluenceMatrix {
public:
    InfluenceMatrix(int n, std::vector<std::vector<std::pair<int, double>>> cols);

    int n() const { return n_; }
    double entry(int u, int v) const;
    const std::vector<std::pair<int, double>>& column(int v) const {
        return cols_[static_cast<std::size_t>(v)];
    }

    double column_sum(int v) const;
    std::vector<double> row_sums() const;

private:
    int n_ = 0;
    std::vector<std::vector<std::pair<int, double>>> cols_;
};

// Brute-force single entry: maximise d_TV(P_v^tau, P_v^tau') over all
// boundary pairs differing only at u.  Cost q^(deg(v)+1); guarded by the
// same capacity bound as influence_matrix_brute.
double influence_entry(const LocalRule& rule, const Graph& g, int u, int v);

// Whole matrix by brute force.  Requires every degree <= degree_cap and
// q^(deg+1) <= 2^22 per column.
InfluenceMatrix influence_matrix_brute(const LocalRule& rule, const Graph& g,
                                       int degree_cap = 20);

// Closed form for Ising Glauber: the conditional depends on the boundary only
// through the count of spin-1 neighbours, so each entry is a maximum of
// |p1(k+1)-p1(k)| over k; diagonal entries are 0.  O(m * Delta) overall.
InfluenceMatrix influence_matrix_ising_glauber(const ModelSpec& spec, const Graph& g);

// Dispatch: closed form when available, brute force otherwise.
InfluenceMatrix influence_matrix(const ModelSpec& spec, const Graph& g,
                                 int degree_cap = 20);

enum class NormP { One, Two, Inf };

// Induced operator norms: p=1 max column sum, p=inf max row sum, p=2 via
// power iteration on rho^T rho (tolerance 1e-10, at most 10000 iterations;
// DiagnosticError with the residual gap if it fails to settle).
double operator_norm(const InfluenceMatrix& rho, NormP p);

}  // namespace spinsim
