#include "spinsim/distribution.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include "spinsim/errors.hpp"

namespace spinsim {

namespace {
constexpr double kMassTol = 1e-12;
}

Distribution::Distribution(std::vector<double> probs) : p_(std::move(probs)) {
    if (p_.empty()) throw InputError("Distribution: empty support");
    double sum = 0.0;
    for (std::size_t i = 0; i < p_.size(); ++i) {
        const double v = p_[i];
        if (!(v >= 0.0 && v <= 1.0 + kMassTol) || std::isnan(v))
            throw InputError("Distribution: entry " + std::to_string(i) + " = " +
                             std::to_string(v) + " outside [0,1]");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kMassTol)
        throw InputError("Distribution: total mass " + std::to_string(sum) +
                         " deviates from 1 by more than 1e-12");
}

double tv_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw InputError("tv_distance: mismatched supports (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return 0.5 * s;
}

double tv_distance(const Distribution& a, const Distribution& b) {
    return tv_distance(a.view(), b.view());
}

double jaccard_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InputError("jaccard_similarity: mismatched supports");
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        lo += std::min(a[i], b[i]);
        hi += std::max(a[i], b[i]);
    }
    if (hi == 0.0) return 1.0;
    return lo / hi;
}

Distribution normalized(std::span<const std::int64_t> counts) {
    std::int64_t total = 0;
    for (auto c : counts) {
        if (c < 0) throw InputError("normalized: negative count");
        total += c;
    }
    if (total == 0) throw InputError("normalized: empty histogram");
    std::vector<double> p(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        p[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    return Distribution(std::move(p));
}

Distribution round_to_bits(const Distribution& d, int k) {
    if (k < 1 || k > 62) throw InputError("round_to_bits: k must be in [1,62]");
    const double scale = std::ldexp(1.0, k);
    std::vector<double> p(d.view().begin(), d.view().end());
    double sum = 0.0;
    std::size_t argmax = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::nearbyint(p[i] * scale) / scale;
        sum += p[i];
        if (p[i] > p[argmax]) argmax = i;
    }
    // The defect 1 - sum is itself a multiple of 2^-k; absorbing it into the
    // largest entry keeps every entry a k-bit rational with exact total mass.
    p[argmax] += 1.0 - sum;
    if (p[argmax] < 0.0 || p[argmax] > 1.0)
        throw InputError("round_to_bits: k too coarse for this distribution");
    return Distribution(std::move(p));
}

}  // namespace spinsim
