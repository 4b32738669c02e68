#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace spinsim {

// Probability distribution over spins {0,...,q-1}.  Construction validates:
// entries in [0,1] and total mass 1 within 1e-12.
class Distribution {
public:
    explicit Distribution(std::vector<double> probs);

    int size() const { return static_cast<int>(p_.size()); }
    double operator[](int x) const { return p_[static_cast<std::size_t>(x)]; }
    std::span<const double> view() const { return p_; }

    friend bool operator==(const Distribution&, const Distribution&) = default;

private:
    std::vector<double> p_;
};

// Total variation distance (1/2)*sum |a-b|.  Mismatched lengths are rejected.
double tv_distance(std::span<const double> a, std::span<const double> b);
double tv_distance(const Distribution& a, const Distribution& b);

// Jaccard similarity sum_x min(a,b) / sum_x max(a,b); equals
// (1 - d_TV)/(1 + d_TV) for probability vectors.  1 when both are identical
// (including the all-zero corner, by convention).
double jaccard_similarity(std::span<const double> a, std::span<const double> b);

// Normalize a histogram of non-negative counts into a distribution.
Distribution normalized(std::span<const std::int64_t> counts);

// Round every entry to k fractional bits and repair the mass defect on the
// largest entry, so the result is an exactly-summing vector of k-bit
// rationals.  k=53 leaves typical doubles nearly untouched.
Distribution round_to_bits(const Distribution& d, int k = 53);

}  // namespace spinsim
