#pragma once

// Sylvester Hadamard matrices and Hadamard-product orthogonality (HPO).
//
// Sign data is stored as exact int8_t values (+1 / -1). Every orthogonality
// test in this module is an exact integer sum-to-zero check.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace phasecycle {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

using SignVector = std::vector<std::int8_t>;

inline constexpr std::uint64_t kDefaultEnumerationBudget = 100'000'000;

/// Dense row-major matrix of +1/-1 entries.
class SignMatrix {
 public:
  SignMatrix() = default;
  SignMatrix(std::size_t rows, std::size_t cols, std::int8_t fill = 1);

  /// Throws ValidationError on ragged rows or entries other than +1/-1.
  static SignMatrix from_rows(const std::vector<std::vector<int>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::int8_t operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::int8_t& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  SignVector row(std::size_t r) const;
  SignVector column(std::size_t c) const;

  bool operator==(const SignMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::int8_t> data_;
};

/// An ordered list of equal-length sign vectors.
struct SignVectorSet {
  std::size_t dimension = 0;
  std::vector<SignVector> columns;

  /// Throws ValidationError unless every column has `dimension` entries of +1/-1.
  void validate() const;

  static SignVectorSet from_columns(const SignMatrix& m, std::size_t first_column = 0);
};

bool is_power_of_two(std::uint64_t x) noexcept;
std::uint64_t next_power_of_two(std::uint64_t x);

/// Sylvester construction [[H, H], [H, -H]] from H_1 = (1).
SignMatrix sylvester(std::size_t order);

/// True iff H^T H = n I. Rejects non-square input.
bool is_hadamard(const SignMatrix& m);

/// Element-wise product of the given vectors (all of one length).
SignVector hadamard_product(std::span<const SignVector> vectors);

/// HPO: the element-wise product of the subset sums to zero.
bool hpo_check(std::span<const SignVector> subset);
bool hpo_check(const SignVectorSet& set, std::span<const std::size_t> indices);

struct ClosureResult {
  bool closed = true;
  // Indices (i, j) into the set whose product is not a member.
  std::optional<std::pair<std::size_t, std::size_t>> witness;
};

/// Checks closure of the set under the Hadamard product. The set must contain
/// the all-ones vector.
ClosureResult group_closure_check(const SignVectorSet& set);

/// Non-HPO statistics for q-subsets of the 2^n - 1 non-identity elements of
/// the Sylvester group.
struct OrthogonalityCount {
  unsigned n = 0;
  unsigned q = 0;
  BigInt d;    // number of q-subsets whose product is E
  Rational p;  // d / C(2^n - 1, q)

  double p_decimal() const { return p.convert_to<double>(); }
};

BigInt binomial(unsigned n, unsigned k);

/// Closed forms for D(q) (odd and even q), exact arithmetic.
OrthogonalityCount count_nonorthogonal_exact(unsigned n, unsigned q);

/// Exhaustively counts the q-subsets of `columns` whose Hadamard product is
/// the all-ones vector. Refuses (BudgetExceeded) when C(|columns|, q) exceeds
/// the budget.
std::uint64_t count_nonorthogonal_brute(const SignVectorSet& columns, unsigned q,
                                        std::uint64_t budget = kDefaultEnumerationBudget);

/// Same count for every subset size at once; element q of the result is the
/// count for size q (index 0 counts the empty subset). Enumerates 2^|columns|
/// subsets in Gray-code order, so the budget applies to that total.
std::vector<std::uint64_t> count_nonorthogonal_brute_all(
    const SignVectorSet& columns, std::uint64_t budget = kDefaultEnumerationBudget);

enum class HadamardKind { plain, stacked };

std::string to_string(HadamardKind kind);
HadamardKind hadamard_kind_from_string(const std::string& s);

struct HpoRatio {
  Rational exact;
  double value = 0.0;
};

/// Fraction of non-empty subsets of H' (the Sylvester matrix of order 2^n
/// without its all-ones column) whose Hadamard product sums to zero. For the
/// stacked matrix [[E, H'], [E, -H']] every odd-sized subset is orthogonal.
HpoRatio hpo_ratio(HadamardKind kind, unsigned n);

}  // namespace phasecycle
