#include "jetvar/multiindex.hpp"

#include "jetvar/error.hpp"

#include <algorithm>
#include <numeric>

namespace jetvar {

MultiIndex MultiIndex::zero(std::size_t n)
{
    return MultiIndex(std::vector<std::uint32_t>(n, 0));
}

MultiIndex MultiIndex::unit(std::size_t n, std::size_t lambda)
{
    std::vector<std::uint32_t> c(n, 0);
    c.at(lambda) = 1;
    return MultiIndex(std::move(c));
}

MultiIndex::MultiIndex(std::vector<std::uint32_t> counts) : counts_(std::move(counts)) {}

MultiIndex::MultiIndex(std::initializer_list<std::uint32_t> counts) : counts_(counts) {}

std::uint32_t MultiIndex::order() const noexcept
{
    return std::accumulate(counts_.begin(), counts_.end(), std::uint32_t{0});
}

std::uint64_t MultiIndex::factorial() const
{
    std::uint64_t out = 1;
    for (auto c : counts_) {
        for (std::uint32_t k = 2; k <= c; ++k) out *= k;
    }
    return out;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const
{
    if (dim() != other.dim()) {
        throw DimensionError("multi-index union over incompatible base spaces (dimension " +
                             std::to_string(dim()) + " vs " + std::to_string(other.dim()) + ")");
    }
    std::vector<std::uint32_t> c(counts_);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += other.counts_[k];
    return MultiIndex(std::move(c));
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const
{
    if (!contains(other)) throw DimensionError("multi-index difference is not defined");
    std::vector<std::uint32_t> c(counts_);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] -= other.counts_[k];
    return MultiIndex(std::move(c));
}

MultiIndex MultiIndex::plus_unit(std::size_t lambda) const
{
    std::vector<std::uint32_t> c(counts_);
    c.at(lambda) += 1;
    return MultiIndex(std::move(c));
}

bool MultiIndex::contains(const MultiIndex& other) const
{
    if (dim() != other.dim()) return false;
    for (std::size_t k = 0; k < counts_.size(); ++k) {
        if (other.counts_[k] > counts_[k]) return false;
    }
    return true;
}

std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b)
{
    if (auto c = a.dim() <=> b.dim(); c != 0) return c;
    if (auto c = a.order() <=> b.order(); c != 0) return c;
    // Reversed lexicographic comparison: more derivatives in x^1 sorts first.
    return std::lexicographical_compare_three_way(b.counts_.begin(), b.counts_.end(),
                                                  a.counts_.begin(), a.counts_.end());
}

std::string MultiIndex::to_string(std::span<const std::string> base_names,
                                  const std::string& separator) const
{
    std::string out;
    for (std::size_t k = 0; k < counts_.size(); ++k) {
        for (std::uint32_t c = 0; c < counts_[k]; ++c) {
            if (!out.empty()) out += separator;
            out += base_names[k];
        }
    }
    return out;
}

MultiIndex multi_union(const MultiIndex& a, const MultiIndex& b) { return a + b; }

std::uint64_t multi_binomial(const MultiIndex& sigma, const MultiIndex& rho)
{
    if (!sigma.contains(rho)) return 0;
    std::uint64_t out = 1;
    for (std::size_t k = 0; k < sigma.dim(); ++k) {
        // C(s, r) built incrementally stays integral at each step.
        std::uint64_t c = 1;
        for (std::uint32_t t = 1; t <= rho[k]; ++t) c = c * (sigma[k] - rho[k] + t) / t;
        out *= c;
    }
    return out;
}

namespace {

void fill_exact(std::size_t pos, std::uint32_t remaining, std::vector<std::uint32_t>& cur,
                std::vector<MultiIndex>& out)
{
    if (pos + 1 == cur.size()) {
        cur[pos] = remaining;
        out.emplace_back(cur);
        return;
    }
    for (std::uint32_t c = remaining + 1; c-- > 0;) {
        cur[pos] = c;
        fill_exact(pos + 1, remaining - c, cur, out);
    }
}

} // namespace

std::vector<MultiIndex> enumerate_exact(std::size_t n, std::uint32_t k)
{
    std::vector<MultiIndex> out;
    if (n == 0) return out;
    std::vector<std::uint32_t> cur(n, 0);
    fill_exact(0, k, cur, out);
    return out;
}

std::vector<MultiIndex> enumerate_up_to(std::size_t n, std::uint32_t k)
{
    std::vector<MultiIndex> out;
    for (std::uint32_t d = 0; d <= k; ++d) {
        auto layer = enumerate_exact(n, d);
        out.insert(out.end(), layer.begin(), layer.end());
    }
    return out;
}

std::vector<MultiIndex> sub_indices(const MultiIndex& sigma)
{
    std::vector<MultiIndex> out;
    for (auto& rho : enumerate_up_to(sigma.dim(), sigma.order())) {
        if (sigma.contains(rho)) out.push_back(rho);
    }
    return out;
}

} // namespace jetvar
