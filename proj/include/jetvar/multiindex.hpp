/**
 * @file multiindex.hpp
 * @brief Symmetric derivative multi-indices over n base variables.
 */
#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace jetvar {

/// Counts (s_1, ..., s_n) of partial derivatives per base variable. Stored
/// symmetrically since partial derivatives commute.
class MultiIndex {
public:
    MultiIndex() = default;

    /// Zero multi-index of base dimension n.
    static MultiIndex zero(std::size_t n);

    /// Unit multi-index 1_lambda of base dimension n.
    static MultiIndex unit(std::size_t n, std::size_t lambda);

    explicit MultiIndex(std::vector<std::uint32_t> counts);
    MultiIndex(std::initializer_list<std::uint32_t> counts);

    [[nodiscard]] std::size_t dim() const noexcept { return counts_.size(); }
    [[nodiscard]] std::uint32_t operator[](std::size_t lambda) const { return counts_[lambda]; }
    [[nodiscard]] std::span<const std::uint32_t> counts() const noexcept { return counts_; }

    [[nodiscard]] std::uint32_t order() const noexcept;
    [[nodiscard]] bool is_zero() const noexcept { return order() == 0; }

    /// Product of entrywise factorials.
    [[nodiscard]] std::uint64_t factorial() const;

    /// Componentwise sum; throws DimensionError on mismatched base dimension.
    [[nodiscard]] MultiIndex operator+(const MultiIndex& other) const;

    /// Componentwise difference; requires other <= *this entrywise.
    [[nodiscard]] MultiIndex operator-(const MultiIndex& other) const;

    [[nodiscard]] MultiIndex plus_unit(std::size_t lambda) const;

    /// True when every entry of other is <= the matching entry here.
    [[nodiscard]] bool contains(const MultiIndex& other) const;

    /// Graded-lexicographic: by order, then by counts with earlier variables
    /// ranking first, so (1,0) precedes (0,1).
    friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b);
    friend bool operator==(const MultiIndex& a, const MultiIndex& b) = default;

    /// Juxtaposition of base-variable names, e.g. "x1 x1 x2" for (2,1).
    [[nodiscard]] std::string to_string(std::span<const std::string> base_names,
                                        const std::string& separator = " ") const;

private:
    std::vector<std::uint32_t> counts_;
};

/// Union of multi-indices (componentwise sum).
[[nodiscard]] MultiIndex multi_union(const MultiIndex& a, const MultiIndex& b);

/// Multi-index binomial prod_k C(sigma_k, rho_k); zero unless rho <= sigma.
[[nodiscard]] std::uint64_t multi_binomial(const MultiIndex& sigma, const MultiIndex& rho);

/// All multi-indices of dimension n with order <= k, in graded-lex order.
[[nodiscard]] std::vector<MultiIndex> enumerate_up_to(std::size_t n, std::uint32_t k);

/// All multi-indices of dimension n with order exactly k, in graded-lex order.
[[nodiscard]] std::vector<MultiIndex> enumerate_exact(std::size_t n, std::uint32_t k);

/// Every rho with rho <= sigma entrywise, in graded-lex order.
[[nodiscard]] std::vector<MultiIndex> sub_indices(const MultiIndex& sigma);

} // namespace jetvar
