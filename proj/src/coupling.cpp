#include "spinsim/coupling.hpp"

#include <string>

#include "spinsim/errors.hpp"

namespace spinsim {

namespace {

void check_support(std::span<const double> p, int q) {
    if (static_cast<int>(p.size()) != q)
        throw InputError("sample: distribution support " + std::to_string(p.size()) +
                         " does not match the stream's spin count " + std::to_string(q));
}

[[noreturn]] void throw_cap(const SeedStream& s) {
    throw DiagnosticError("sample: no acceptance within " +
                          std::to_string(static_cast<std::int64_t>(kMaxBatchFactor) * s.q) +
                          " batches for update (site " + std::to_string(s.update.site) +
                          ", index " + std::to_string(s.update.index) +
                          "); stream or distribution is broken");
}

}  // namespace

SampleOutcome sample_detailed(std::span<const double> p, const SeedStream& s) {
    check_support(p, s.q);
    const std::int64_t cap = static_cast<std::int64_t>(kMaxBatchFactor) * s.q *
                             default_batch_width(s.q);
    for (std::int64_t j = 1; j <= cap; ++j) {
        const SeedPair pr = s.pair(static_cast<std::uint64_t>(j));
        if (pr.y < p[static_cast<std::size_t>(pr.x)]) return {pr.x, j};
    }
    throw_cap(s);
}

int sample(std::span<const double> p, const SeedStream& s) { return sample_detailed(p, s).value; }

int sample(const Distribution& p, const SeedStream& s) { return sample(p.view(), s); }

std::pair<int, int> coupled_sample_pair(std::span<const double> p, std::span<const double> q,
                                        const SeedStream& s) {
    check_support(p, s.q);
    check_support(q, s.q);
    const std::int64_t cap = static_cast<std::int64_t>(kMaxBatchFactor) * s.q *
                             default_batch_width(s.q);
    int a = -1, b = -1;
    for (std::int64_t j = 1; j <= cap; ++j) {
        const SeedPair pr = s.pair(static_cast<std::uint64_t>(j));
        if (a < 0 && pr.y < p[static_cast<std::size_t>(pr.x)]) a = pr.x;
        if (b < 0 && pr.y < q[static_cast<std::size_t>(pr.x)]) b = pr.x;
        if (a >= 0 && b >= 0) return {a, b};
    }
    throw_cap(s);
}

ConsistSampler::ConsistSampler(SeedStream stream, int width) : stream_(stream), width_(width) {
    if (width_ < 1) throw InputError("ConsistSampler: batch width must be >= 1");
}

int ConsistSampler::draw(std::span<const double> p) {
    if (width_ < 1) throw DiagnosticError("ConsistSampler: drawing from a default-constructed sampler");
    check_support(p, stream_.q);
    const std::int64_t max_batches = static_cast<std::int64_t>(kMaxBatchFactor) * stream_.q;
    for (std::int64_t batch = 0; batch < max_batches; ++batch) {
        const std::size_t hi = static_cast<std::size_t>(batch + 1) * static_cast<std::size_t>(width_);
        while (pairs_.size() < hi)
            pairs_.push_back(stream_.pair(static_cast<std::uint64_t>(pairs_.size() + 1)));
        for (std::size_t k = static_cast<std::size_t>(batch) * static_cast<std::size_t>(width_);
             k < hi; ++k) {
            const SeedPair& pr = pairs_[k];
            if (pr.y < p[static_cast<std::size_t>(pr.x)]) return pr.x;
        }
    }
    throw_cap(stream_);
}

std::vector<Distribution> adversarial_family(int k, int omega) {
    if (k < 1) throw InputError("adversarial_family: k must be >= 1");
    if (omega < k + 1)
        throw InputError("adversarial_family: spin space must hold {0,...,k}, need omega >= k+1");
    std::vector<Distribution> fam;
    fam.reserve(static_cast<std::size_t>(k) + 1);
    for (int i = 0; i <= k; ++i) {
        std::vector<double> p(static_cast<std::size_t>(omega), 0.0);
        for (int x = 0; x <= k; ++x)
            if (x != i) p[static_cast<std::size_t>(x)] = 1.0 / static_cast<double>(k);
        fam.emplace_back(std::move(p));
    }
    return fam;
}

}  // namespace spinsim
