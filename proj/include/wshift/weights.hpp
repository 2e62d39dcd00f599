#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <climits>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "log2_value.hpp"
#include "types.hpp"

namespace wshift {

/// Upper bound on the number of explicit entries in a Literal family.
inline constexpr std::size_t kMaxLiteralEntries = 1'000'000;

/// A positive rational p/q, used for literal weight input.
struct Rational {
  std::int64_t num = 1;
  std::int64_t den = 1;

  /// Accepts "p", "p/q" and plain decimals such as "0.25". Rejects values <= 0.
  static Rational parse(std::string_view text) {
    auto trim = [](std::string_view s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
      return s;
    };
    text = trim(text);
    if (text.empty()) throw Error(ErrorKind::InvalidArgument, "empty weight value");

    Rational r;
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      r.num = parse_int(trim(text.substr(0, slash)), text);
      r.den = parse_int(trim(text.substr(slash + 1)), text);
      if (r.den == 0) throw Error(ErrorKind::InvalidArgument, "zero denominator in '" + std::string(text) + "'");
    } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
      auto int_part = text.substr(0, dot);
      auto frac_part = text.substr(dot + 1);
      bool negative = !int_part.empty() && int_part.front() == '-';
      if (negative || (!int_part.empty() && int_part.front() == '+')) int_part.remove_prefix(1);
      if (frac_part.size() > 18) throw Error(ErrorKind::InvalidArgument, "too many decimals in '" + std::string(text) + "'");
      std::int64_t scale = 1;
      for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
      std::int64_t whole = int_part.empty() ? 0 : parse_int(int_part, text);
      std::int64_t frac = frac_part.empty() ? 0 : parse_int(frac_part, text);
      if (!frac_part.empty() && frac_part.front() == '-') throw Error(ErrorKind::InvalidArgument, "bad decimal '" + std::string(text) + "'");
      r.num = detail::checked_add(detail::checked_mul(whole, scale), frac);
      if (negative) r.num = -r.num;
      r.den = scale;
    } else {
      r.num = parse_int(text, text);
    }
    if (r.den < 0) {
      r.num = -r.num;
      r.den = -r.den;
    }
    if (r.num <= 0) throw Error(ErrorKind::NonPositiveWeight, "weight '" + std::string(text) + "' is not positive");
    const auto g = std::gcd(r.num, r.den);
    r.num /= g;
    r.den /= g;
    return r;
  }

  /// Exact log2 when the value is an integer power of two.
  Log2Value log2() const {
    auto pow2 = [](std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; };
    if (pow2(num) && pow2(den)) {
      return Log2Value::exact(std::countr_zero(static_cast<std::uint64_t>(num)) -
                              std::countr_zero(static_cast<std::uint64_t>(den)));
    }
    return Log2Value::inexact(std::log2(static_cast<double>(num)) - std::log2(static_cast<double>(den)));
  }

  double to_double() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }

 private:
  static std::int64_t parse_int(std::string_view s, std::string_view whole) {
    std::int64_t v = 0;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
      throw Error(ErrorKind::InvalidArgument, "cannot parse weight '" + std::string(whole) + "'");
    return v;
  }
};

/// Rule for literal weights past the explicit list.
enum class Tail { Ones, PeriodicRepeat };

/// Layout of one block of the block construction.
///
/// Odd blocks b_n are runs of (n+1)/2 twos. Even blocks b_n consist of n/2
/// copies of (s_{n-1} ones followed by one half), so they end with a half and
/// hold as many halves as the preceding odd block holds twos.
struct BlockPlan {
  int index = 0;             // n
  index_t length = 0;        // |b_n|
  index_t cumulative = 0;    // s_n
  index_t twos = 0;
  index_t halves = 0;
  index_t ones_before_half = 0;  // s_{n-1} for even n, 0 otherwise
  std::int64_t net_log2 = 0;     // twos - halves
  std::int64_t prefix_log2 = 0;  // sum of net_log2 over b_1..b_n
};

/// All block plans whose cumulative length fits into index_t (b_1..b_39).
inline const std::vector<BlockPlan>& block_plans() {
  static const std::vector<BlockPlan> plans = [] {
    std::vector<BlockPlan> out;
    index_t s_prev = 0;
    std::int64_t prefix = 0;
    for (int n = 1;; ++n) {
      BlockPlan b;
      b.index = n;
      if (n % 2 == 1) {
        b.length = (n + 1) / 2;
        b.twos = b.length;
      } else {
        b.halves = n / 2;
        b.ones_before_half = s_prev;
        std::int64_t len = 0;
        if (__builtin_add_overflow(s_prev, 1, &len) || __builtin_mul_overflow(len, n / 2, &len)) break;
        b.length = len;
      }
      if (__builtin_add_overflow(s_prev, b.length, &b.cumulative)) break;
      b.net_log2 = b.twos - b.halves;
      prefix += b.net_log2;
      b.prefix_log2 = prefix;
      out.push_back(b);
      s_prev = b.cumulative;
    }
    return out;
  }();
  return plans;
}

/// A lazily generated positive weight sequence w_1, w_2, ...
///
/// The cache only ever grows; a weight once produced never changes.
/// Dyadic sequences (every weight a power of two) store integer exponents and
/// keep every derived product exact. Growth is single-writer; once
/// materialized to a horizon, const reads may be shared across threads.
class WeightSequence {
 public:
  enum class Family { Literal, Block, Diamond, Custom };
  enum class Exactness { DyadicExact, FloatLog };
  using CustomFn = std::function<Log2Value(index_t)>;

  Family family() const noexcept { return family_; }
  Exactness exactness() const noexcept { return exactness_; }
  bool dyadic() const noexcept { return exactness_ == Exactness::DyadicExact; }

  std::string_view family_name() const noexcept {
    switch (family_) {
      case Family::Literal: return "literal";
      case Family::Block: return "block";
      case Family::Diamond: return "diamond";
      case Family::Custom: return "custom";
    }
    return "custom";
  }

  const std::vector<Log2Value>& literal_values() const noexcept { return literal_; }
  Tail literal_tail() const noexcept { return tail_; }

  index_t materialized() const noexcept {
    return static_cast<index_t>(dyadic() ? exact_cache_.size() : float_cache_.size());
  }

  /// Grows the cache so that w_1..w_horizon are available.
  void materialize(index_t horizon) {
    if (horizon <= materialized()) return;
    if (has_closed_form() && horizon > closed_form_limit())
      throw Error(ErrorKind::Overflow, "position " + std::to_string(horizon) + " beyond representable range");
    if (dyadic()) {
      grow_capacity(exact_cache_, horizon);
      for (index_t n = materialized() + 1; n <= horizon; ++n) {
        const std::int64_t e = generate_exact(n);
        if (e < INT32_MIN || e > INT32_MAX) throw Error(ErrorKind::Overflow, "weight exponent out of range");
        exact_cache_.push_back(static_cast<std::int32_t>(e));
      }
    } else {
      grow_capacity(float_cache_, horizon);
      for (index_t n = materialized() + 1; n <= horizon; ++n) float_cache_.push_back(generate_float(n));
    }
  }

  /// log2 w_n, growing the cache as needed.
  Log2Value log2_weight(index_t n) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "weights are indexed from 1");
    materialize(n);
    return cached_log2_weight(n);
  }

  double weight(index_t n) { return log2_weight(n).value(); }

  /// log2 w_n from the cache; n must be materialized.
  Log2Value cached_log2_weight(index_t n) const {
    if (n < 1 || n > materialized())
      throw Error(ErrorKind::HorizonExceeded, "weight " + std::to_string(n) + " not materialized");
    if (dyadic()) return Log2Value::exact(exact_cache_[static_cast<std::size_t>(n - 1)]);
    return Log2Value::inexact(float_cache_[static_cast<std::size_t>(n - 1)]);
  }

  /// Exponents of w_1, w_2, ... (element 0 is w_1). Dyadic only.
  std::span<const std::int32_t> exact_cache() const noexcept { return exact_cache_; }
  /// Float log2 of w_1, w_2, ... Non-dyadic only.
  std::span<const double> float_cache() const noexcept { return float_cache_; }

  /// Block and diamond sequences have a closed-form prefix sum of log2
  /// weights that needs no table.
  bool has_closed_form() const noexcept { return family_ == Family::Block || family_ == Family::Diamond; }

  index_t closed_form_limit() const noexcept { return closed_form_limit(family_); }

  /// sum_{j <= k} log2 w_j for the block or diamond families, k >= 0.
  std::int64_t closed_form_prefix(index_t k) const { return closed_form_prefix(family_, k); }

  static index_t closed_form_limit(Family family) noexcept {
    if (family == Family::Block) return block_plans().back().cumulative;
    return std::numeric_limits<index_t>::max() - 1;
  }

  static std::int64_t closed_form_prefix(Family family, index_t k) {
    if (k < 0) throw Error(ErrorKind::InvalidArgument, "negative prefix index");
    if (k > closed_form_limit(family)) throw Error(ErrorKind::Overflow, "prefix index beyond representable range");
    if (family == Family::Diamond) {
      // L(2m) = -L(m), L(2m+1) = 1 - L(m)
      std::int64_t result = 0;
      std::int64_t sign = 1;
      while (k > 0) {
        if (k & 1) result += sign;
        sign = -sign;
        k >>= 1;
      }
      return result;
    }
    if (family == Family::Block) {
      if (k == 0) return 0;
      const auto& plans = block_plans();
      auto it = std::lower_bound(plans.begin(), plans.end(), k,
                                 [](const BlockPlan& b, index_t pos) { return b.cumulative < pos; });
      const index_t before = it == plans.begin() ? 0 : std::prev(it)->cumulative;
      const std::int64_t full = it == plans.begin() ? 0 : std::prev(it)->prefix_log2;
      const index_t offset = k - before;
      if (it->index % 2 == 1) return full + offset;
      return full - offset / (it->ones_before_half + 1);
    }
    throw Error(ErrorKind::InvalidArgument, "family has no closed-form prefix");
  }

  std::int64_t closed_form_log2_weight(index_t n) const {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "weights are indexed from 1");
    if (family_ == Family::Diamond) {
      // n = 2^t * odd: exponent 1 for even t, -2 for odd t.
      return (std::countr_zero(static_cast<std::uint64_t>(n)) % 2 == 0) ? 1 : -2;
    }
    return closed_form_prefix(n) - closed_form_prefix(n - 1);
  }

  // Factories.
  friend WeightSequence gen_literal_log2(std::vector<Log2Value> values, Tail tail);
  friend WeightSequence gen_block(index_t max_index);
  friend WeightSequence gen_diamond(index_t max_index);
  friend WeightSequence gen_custom(CustomFn fn, Exactness exactness);

 private:
  WeightSequence(Family family, Exactness exactness) : family_(family), exactness_(exactness) {}

  template <class T>
  static void grow_capacity(std::vector<T>& v, index_t horizon) {
    const auto want = static_cast<std::size_t>(horizon);
    if (want > v.capacity()) v.reserve(std::max(want, 2 * v.capacity()));
  }

  std::int64_t generate_exact(index_t n) const {
    switch (family_) {
      case Family::Literal: return literal_at(n).exponent();
      case Family::Block: return closed_form_log2_weight(n);
      case Family::Diamond:
        if (n % 2 == 1) return 1;
        return -1 - exact_cache_[static_cast<std::size_t>(n / 2 - 1)];
      case Family::Custom: {
        const Log2Value v = custom_(n);
        if (!v.is_exact())
          throw Error(ErrorKind::InvalidArgument, "custom dyadic generator produced an inexact weight at " + std::to_string(n));
        return v.exponent();
      }
    }
    return 0;
  }

  double generate_float(index_t n) const {
    if (family_ == Family::Literal) return literal_at(n).log2();
    const double v = custom_(n).log2();
    if (!std::isfinite(v)) throw Error(ErrorKind::NonPositiveWeight, "weight " + std::to_string(n) + " is not a positive finite number");
    return v;
  }

  Log2Value literal_at(index_t n) const {
    const auto len = static_cast<index_t>(literal_.size());
    if (n <= len) return literal_[static_cast<std::size_t>(n - 1)];
    if (tail_ == Tail::Ones) return dyadic() ? Log2Value::one() : Log2Value::inexact(0.0);
    return literal_[static_cast<std::size_t>((n - 1) % len)];
  }

  Family family_;
  Exactness exactness_;
  std::vector<Log2Value> literal_;
  Tail tail_ = Tail::Ones;
  CustomFn custom_;
  std::vector<std::int32_t> exact_cache_;
  std::vector<double> float_cache_;
};

/// Literal sequence from log2 values. Dyadic iff every value is exact.
inline WeightSequence gen_literal_log2(std::vector<Log2Value> values, Tail tail) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "literal weight list is empty");
  if (values.size() > kMaxLiteralEntries)
    throw Error(ErrorKind::InvalidArgument, "literal weight list longer than " + std::to_string(kMaxLiteralEntries));
  for (const auto& v : values)
    if (!std::isfinite(v.log2())) throw Error(ErrorKind::NonPositiveWeight, "literal weight is not a positive finite number");
  const bool exact = std::all_of(values.begin(), values.end(), [](const Log2Value& v) { return v.is_exact(); });
  WeightSequence seq(WeightSequence::Family::Literal,
                     exact ? WeightSequence::Exactness::DyadicExact : WeightSequence::Exactness::FloatLog);
  if (!exact)
    for (auto& v : values) v = Log2Value::inexact(v.log2());
  seq.literal_ = std::move(values);
  seq.tail_ = tail;
  return seq;
}

/// w_n = values[n] for n <= len, then the tail rule.
inline WeightSequence gen_literal(const std::vector<Rational>& values, Tail tail) {
  std::vector<Log2Value> logs;
  logs.reserve(values.size());
  for (const auto& r : values) {
    if (r.num <= 0 || r.den <= 0) throw Error(ErrorKind::NonPositiveWeight, "literal weight is not positive");
    logs.push_back(r.log2());
  }
  return gen_literal_log2(std::move(logs), tail);
}

/// Block construction: odd blocks of twos, even blocks of ones and halves.
inline WeightSequence gen_block(index_t max_index) {
  if (max_index < 1) throw Error(ErrorKind::InvalidArgument, "max_index must be >= 1");
  WeightSequence seq(WeightSequence::Family::Block, WeightSequence::Exactness::DyadicExact);
  seq.materialize(max_index);
  return seq;
}

/// w_n = 2 for odd n, w_n = 1 / (2 w_{n/2}) for even n.
inline WeightSequence gen_diamond(index_t max_index) {
  if (max_index < 1) throw Error(ErrorKind::InvalidArgument, "max_index must be >= 1");
  WeightSequence seq(WeightSequence::Family::Diamond, WeightSequence::Exactness::DyadicExact);
  seq.materialize(max_index);
  return seq;
}

/// Arbitrary generator returning log2 w_n. For DyadicExact, every returned
/// value must be exact.
inline WeightSequence gen_custom(WeightSequence::CustomFn fn, WeightSequence::Exactness exactness) {
  if (!fn) throw Error(ErrorKind::InvalidArgument, "custom generator is empty");
  WeightSequence seq(WeightSequence::Family::Custom, exactness);
  seq.custom_ = std::move(fn);
  return seq;
}

/// A strictly increasing sequence of positive integers (n_k).
struct SubseqSpec {
  enum class Kind { Full, BlockNk, DiamondAk, DiamondScaled, Explicit };

  Kind kind = Kind::Explicit;
  int scale_m = 0;  // DiamondScaled: values are 4^m a_k
  std::vector<index_t> values;

  /// 1, 2, ..., count.
  static SubseqSpec full(index_t count) {
    if (count < 1) throw Error(ErrorKind::InvalidArgument, "count must be >= 1");
    SubseqSpec s;
    s.kind = Kind::Full;
    s.values.resize(static_cast<std::size_t>(count));
    std::iota(s.values.begin(), s.values.end(), index_t{1});
    return s;
  }

  static SubseqSpec explicit_values(std::vector<index_t> v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] < 1) throw Error(ErrorKind::InvalidArgument, "subsequence entries must be positive");
      if (i > 0 && v[i] <= v[i - 1]) throw Error(ErrorKind::InvalidArgument, "subsequence must be strictly increasing");
    }
    SubseqSpec s;
    s.kind = Kind::Explicit;
    s.values = std::move(v);
    return s;
  }

  /// Leading entries not exceeding `limit`.
  std::vector<index_t> up_to(index_t limit) const {
    auto end = std::upper_bound(values.begin(), values.end(), limit);
    return {values.begin(), end};
  }

  std::string kind_name() const {
    switch (kind) {
      case Kind::Full: return "full";
      case Kind::BlockNk: return "block";
      case Kind::DiamondAk: return "diamond";
      case Kind::DiamondScaled: return "diamond-scaled:" + std::to_string(scale_m);
      case Kind::Explicit: return "list";
    }
    return "list";
  }
};

/// a_1 = 1, a_k = 4 a_{k-1} + 1, i.e. a_k = (4^k - 1) / 3.
inline SubseqSpec ak_sequence(int k_max) {
  if (k_max < 1) throw Error(ErrorKind::InvalidArgument, "k_max must be >= 1");
  SubseqSpec s;
  s.kind = SubseqSpec::Kind::DiamondAk;
  index_t a = 1;
  s.values.push_back(a);
  for (int k = 2; k <= k_max; ++k) {
    a = detail::checked_add(detail::checked_mul(a, 4), 1);
    s.values.push_back(a);
  }
  return s;
}

/// 4^m a_k for k = 1..k_max.
inline SubseqSpec diamond_scaled_sequence(int m, int k_max) {
  if (m < 0) throw Error(ErrorKind::InvalidArgument, "m must be >= 0");
  SubseqSpec s = ak_sequence(k_max);
  s.kind = SubseqSpec::Kind::DiamondScaled;
  s.scale_m = m;
  index_t scale = 1;
  for (int j = 0; j < m; ++j) scale = detail::checked_mul(scale, 4);
  for (auto& v : s.values) v = detail::checked_mul(v, scale);
  return s;
}

/// n_k = s_{2k+1}, k = 1..k_max.
inline SubseqSpec block_nk_sequence(int k_max) {
  if (k_max < 1) throw Error(ErrorKind::InvalidArgument, "k_max must be >= 1");
  const auto& plans = block_plans();
  SubseqSpec s;
  s.kind = SubseqSpec::Kind::BlockNk;
  for (int k = 1; k <= k_max; ++k) {
    const auto block = static_cast<std::size_t>(2 * k + 1);
    if (block > plans.size())
      throw Error(ErrorKind::Overflow, "s_" + std::to_string(block) + " exceeds the 64-bit index range");
    s.values.push_back(plans[block - 1].cumulative);
  }
  return s;
}

}  // namespace wshift
