#include "phasecycle/hadamard.hpp"

#include <bit>
#include <sstream>

#include "packed_signs.hpp"
#include "phasecycle/errors.hpp"

namespace phasecycle {

namespace {

void require_sign(int v) {
  if (v != 1 && v != -1) {
    std::ostringstream os;
    os << "sign entries must be +1 or -1, got " << v;
    throw ValidationError(os.str());
  }
}

// C(n, k) clamped to `cap + 1` so callers can compare against a budget
// without overflowing.
std::uint64_t binomial_saturating(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > cap) return cap + 1;
  }
  return acc.convert_to<std::uint64_t>();
}

// Recursive q-combination walk with a running product mask.
template <typename Mask, typename Xor, typename IsIdentity>
void walk_combinations(const std::vector<Mask>& cols, std::size_t start, unsigned remaining,
                       const Mask& acc, std::uint64_t& count, Xor&& xor_op,
                       IsIdentity&& is_identity) {
  if (remaining == 0) {
    if (is_identity(acc)) ++count;
    return;
  }
  for (std::size_t i = start; i + remaining <= cols.size(); ++i) {
    walk_combinations(cols, i + 1, remaining - 1, xor_op(acc, cols[i]), count, xor_op,
                      is_identity);
  }
}

}  // namespace

SignMatrix::SignMatrix(std::size_t rows, std::size_t cols, std::int8_t fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  require_sign(fill);
}

SignMatrix SignMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
  if (rows.empty()) return {};
  const std::size_t cols = rows.front().size();
  SignMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      std::ostringstream os;
      os << "row " << r << " has " << rows[r].size() << " entries, expected " << cols;
      throw ValidationError(os.str());
    }
    for (std::size_t c = 0; c < cols; ++c) {
      require_sign(rows[r][c]);
      m(r, c) = static_cast<std::int8_t>(rows[r][c]);
    }
  }
  return m;
}

SignVector SignMatrix::row(std::size_t r) const {
  return SignVector(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                    data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
}

SignVector SignMatrix::column(std::size_t c) const {
  SignVector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

void SignVectorSet::validate() const {
  if (dimension == 0) throw ValidationError("sign vector dimension must be positive");
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].size() != dimension) {
      std::ostringstream os;
      os << "column " << i << " has length " << columns[i].size() << ", expected " << dimension;
      throw ValidationError(os.str());
    }
    for (auto v : columns[i]) require_sign(v);
  }
}

SignVectorSet SignVectorSet::from_columns(const SignMatrix& m, std::size_t first_column) {
  SignVectorSet s;
  s.dimension = m.rows();
  for (std::size_t c = first_column; c < m.cols(); ++c) s.columns.push_back(m.column(c));
  return s;
}

bool is_power_of_two(std::uint64_t x) noexcept { return std::has_single_bit(x); }

std::uint64_t next_power_of_two(std::uint64_t x) {
  if (x == 0) throw ValidationError("next_power_of_two: argument must be positive");
  if (x > (std::uint64_t{1} << 63)) throw ValidationError("next_power_of_two: overflow");
  return std::bit_ceil(x);
}

SignMatrix sylvester(std::size_t order) {
  if (!is_power_of_two(order)) {
    std::ostringstream os;
    os << "Sylvester construction needs a power-of-two order, got " << order;
    throw ValidationError(os.str());
  }
  SignMatrix h(order, order);
  // Doubling in place: the top-left block of size `half` already holds H_half.
  for (std::size_t half = 1; half < order; half *= 2) {
    for (std::size_t r = 0; r < half; ++r) {
      for (std::size_t c = 0; c < half; ++c) {
        const auto v = h(r, c);
        h(r, c + half) = v;
        h(r + half, c) = v;
        h(r + half, c + half) = static_cast<std::int8_t>(-v);
      }
    }
  }
  return h;
}

bool is_hadamard(const SignMatrix& m) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << "is_hadamard needs a square matrix, got " << m.rows() << "x" << m.cols();
    throw ValidationError(os.str());
  }
  const std::size_t n = m.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      std::int64_t dot = 0;
      for (std::size_t r = 0; r < n; ++r) dot += m(r, i) * m(r, j);
      if (dot != (i == j ? static_cast<std::int64_t>(n) : 0)) return false;
    }
  }
  return true;
}

SignVector hadamard_product(std::span<const SignVector> vectors) {
  if (vectors.empty()) throw ValidationError("hadamard_product of an empty list");
  SignVector out = vectors.front();
  for (std::size_t k = 1; k < vectors.size(); ++k) {
    if (vectors[k].size() != out.size()) {
      std::ostringstream os;
      os << "dimension mismatch: vector " << k << " has length " << vectors[k].size()
         << ", expected " << out.size();
      throw ValidationError(os.str());
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<std::int8_t>(out[i] * vectors[k][i]);
  }
  return out;
}

bool hpo_check(std::span<const SignVector> subset) {
  const SignVector prod = hadamard_product(subset);
  std::int64_t sum = 0;
  for (auto v : prod) {
    require_sign(v);
    sum += v;
  }
  return sum == 0;
}

bool hpo_check(const SignVectorSet& set, std::span<const std::size_t> indices) {
  std::vector<SignVector> chosen;
  chosen.reserve(indices.size());
  for (auto i : indices) {
    if (i >= set.columns.size()) throw ValidationError("hpo_check: column index out of range");
    chosen.push_back(set.columns[i]);
  }
  return hpo_check(chosen);
}

ClosureResult group_closure_check(const SignVectorSet& set) {
  set.validate();
  const auto packed = detail::pack_all(set.columns);
  bool has_identity = false;
  for (const auto& p : packed) has_identity |= p.is_identity();
  if (!has_identity) throw ValidationError("group_closure_check: set must contain the all-ones vector");

  for (std::size_t i = 0; i < packed.size(); ++i) {
    for (std::size_t j = i; j < packed.size(); ++j) {
      auto prod = packed[i];
      prod ^= packed[j];
      bool member = false;
      for (const auto& p : packed) {
        if (p == prod) {
          member = true;
          break;
        }
      }
      if (!member) return {false, std::make_pair(i, j)};
    }
  }
  return {};
}

BigInt binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt acc = 1;
  for (unsigned i = 1; i <= k; ++i) acc = acc * (n - k + i) / i;
  return acc;
}

OrthogonalityCount count_nonorthogonal_exact(unsigned n, unsigned q) {
  if (n == 0 || n > 20) throw ValidationError("count_nonorthogonal_exact: n must be in 1..20");
  const unsigned order = 1u << n;
  if (q < 1 || q > order - 1) {
    std::ostringstream os;
    os << "subset size q=" << q << " outside 1.." << order - 1;
    throw ValidationError(os.str());
  }
  const unsigned k = q / 2;
  // Odd q = 2k+1 carries (-1)^(k+1); even q = 2k carries (-1)^k.
  const bool negative = (q % 2 == 1) ? (k % 2 == 0) : (k % 2 == 1);
  BigInt correction = BigInt(order - 1) * binomial(order / 2 - 1, k);
  BigInt numerator = binomial(order - 1, q);
  numerator += negative ? BigInt(-correction) : correction;
  if (numerator % order != 0) throw std::logic_error("closed form for D(q) is not integral");

  OrthogonalityCount out;
  out.n = n;
  out.q = q;
  out.d = numerator / order;
  out.p = Rational(out.d, binomial(order - 1, q));
  return out;
}

std::uint64_t count_nonorthogonal_brute(const SignVectorSet& columns, unsigned q,
                                        std::uint64_t budget) {
  columns.validate();
  const std::size_t k = columns.columns.size();
  if (q == 0 || q > k) throw ValidationError("count_nonorthogonal_brute: q outside 1..|columns|");
  const auto work = binomial_saturating(k, q, budget);
  if (work > budget) {
    std::ostringstream os;
    os << "C(" << k << ", " << q << ") subsets exceed the enumeration budget of " << budget;
    throw BudgetExceeded(os.str());
  }

  std::uint64_t count = 0;
  if (columns.dimension <= 64) {
    std::vector<std::uint64_t> masks;
    for (const auto& c : columns.columns) masks.push_back(detail::PackedSigns::from(c).words()[0]);
    walk_combinations(
        masks, 0, q, std::uint64_t{0}, count,
        [](std::uint64_t a, std::uint64_t b) { return a ^ b; },
        [](std::uint64_t a) { return a == 0; });
  } else {
    const auto packed = detail::pack_all(columns.columns);
    walk_combinations(
        packed, 0, q, detail::PackedSigns(columns.dimension), count,
        [](detail::PackedSigns a, const detail::PackedSigns& b) { return a ^= b; },
        [](const detail::PackedSigns& a) { return a.is_identity(); });
  }
  return count;
}

std::vector<std::uint64_t> count_nonorthogonal_brute_all(const SignVectorSet& columns,
                                                         std::uint64_t budget) {
  columns.validate();
  const std::size_t k = columns.columns.size();
  if (k >= 64 || (std::uint64_t{1} << k) > budget) {
    std::ostringstream os;
    os << "2^" << k << " subsets exceed the enumeration budget of " << budget;
    throw BudgetExceeded(os.str());
  }
  std::vector<std::uint64_t> counts(k + 1, 0);
  counts[0] = 1;  // empty product is E
  const std::uint64_t total = std::uint64_t{1} << k;

  if (columns.dimension <= 64) {
    std::vector<std::uint64_t> masks;
    for (const auto& c : columns.columns) masks.push_back(detail::PackedSigns::from(c).words()[0]);
    std::uint64_t acc = 0;
    std::uint64_t members = 0;
    std::size_t size = 0;
    for (std::uint64_t i = 1; i < total; ++i) {
      const auto bit = static_cast<unsigned>(std::countr_zero(i));
      acc ^= masks[bit];
      members ^= std::uint64_t{1} << bit;
      if ((members >> bit) & 1u)
        ++size;
      else
        --size;
      if (acc == 0) ++counts[size];
    }
  } else {
    const auto packed = detail::pack_all(columns.columns);
    detail::PackedSigns acc(columns.dimension);
    std::uint64_t members = 0;
    for (std::uint64_t i = 1; i < total; ++i) {
      const auto bit = static_cast<unsigned>(std::countr_zero(i));
      acc ^= packed[bit];
      members ^= std::uint64_t{1} << bit;
      if (acc.is_identity()) ++counts[static_cast<std::size_t>(std::popcount(members))];
    }
  }
  return counts;
}

std::string to_string(HadamardKind kind) {
  return kind == HadamardKind::plain ? "plain" : "stacked";
}

HadamardKind hadamard_kind_from_string(const std::string& s) {
  if (s == "plain") return HadamardKind::plain;
  if (s == "stacked") return HadamardKind::stacked;
  throw ValidationError("unknown Hadamard matrix kind '" + s + "' (expected plain|stacked)");
}

HpoRatio hpo_ratio(HadamardKind kind, unsigned n) {
  if (n < 2) throw ValidationError("hpo_ratio: n must be at least 2");
  const unsigned order = 1u << n;
  BigInt non_orthogonal = 0;
  for (unsigned q = 1; q <= order - 1; ++q) {
    if (kind == HadamardKind::stacked && q % 2 == 1) continue;
    non_orthogonal += count_nonorthogonal_exact(n, q).d;
  }
  const BigInt subsets = (BigInt(1) << (order - 1)) - 1;
  HpoRatio r;
  r.exact = Rational(1) - Rational(non_orthogonal, subsets);
  r.value = r.exact.convert_to<double>();
  return r;
}

}  // namespace phasecycle
