#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "format.hpp"
#include "log2_value.hpp"
#include "report.hpp"
#include "types.hpp"
#include "weights.hpp"

namespace wshift {

/// Window products M_i^n = w_i w_{i+1} ... w_{i+n-1} in O(1).
///
/// Keeps prefix sums L[k] = sum_{j<=k} log2 w_j (L[0] = 0) so that
/// M_i^n = 2^(L[i+n-1] - L[i-1]). Three backends:
///  - ExactTable: integer prefix table for dyadic sequences; every product exact.
///  - FloatTable: compensated float prefix table for general sequences.
///  - ClosedForm: block/diamond prefix computed on demand, no table, so the
///    horizon can reach the 64-bit index range. Also exact.
///
/// Immutable after construction; all queries are read-only.
class ProductEngine {
 public:
  enum class Backend { ExactTable, FloatTable, ClosedForm };

  /// Materializes `seq` up to `horizon` and builds the prefix table.
  static ProductEngine tabulate(WeightSequence& seq, index_t horizon) {
    if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be >= 1");
    seq.materialize(horizon);
    ProductEngine e;
    e.horizon_ = horizon;
    e.family_ = std::string(seq.family_name());
    const auto n = static_cast<std::size_t>(horizon);
    if (seq.dyadic()) {
      e.backend_ = Backend::ExactTable;
      const auto cache = seq.exact_cache().first(n);
      e.exact_prefix_.resize(n + 1);
      e.exact_prefix_[0] = 0;
      std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = std::numeric_limits<std::int64_t>::min();
      for (std::size_t k = 0; k < n; ++k) {
        e.exact_prefix_[k + 1] = detail::checked_add(e.exact_prefix_[k], cache[k]);
        lo = std::min<std::int64_t>(lo, cache[k]);
        hi = std::max<std::int64_t>(hi, cache[k]);
      }
      e.min_weight_ = Log2Value::exact(lo);
      e.max_weight_ = Log2Value::exact(hi);
    } else {
      e.backend_ = Backend::FloatTable;
      const auto cache = seq.float_cache().first(n);
      e.float_prefix_.resize(n + 1);
      e.float_prefix_[0] = 0.0;
      // Neumaier summation: the stored prefix is sum + running compensation.
      double sum = 0.0, comp = 0.0;
      double lo = HUGE_VAL, hi = -HUGE_VAL;
      for (std::size_t k = 0; k < n; ++k) {
        const double x = cache[k];
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
          comp += (sum - t) + x;
        else
          comp += (x - t) + sum;
        sum = t;
        e.float_prefix_[k + 1] = sum + comp;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
      e.min_weight_ = Log2Value::inexact(lo);
      e.max_weight_ = Log2Value::inexact(hi);
    }
    return e;
  }

  /// Table-free engine for the block and diamond families.
  static ProductEngine closed_form(const WeightSequence& seq, index_t horizon) {
    if (!seq.has_closed_form()) throw Error(ErrorKind::InvalidArgument, "family has no closed-form prefix");
    if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be >= 1");
    if (horizon > seq.closed_form_limit())
      throw Error(ErrorKind::Overflow, "horizon beyond representable range");
    ProductEngine e;
    e.backend_ = Backend::ClosedForm;
    e.closed_family_ = seq.family();
    e.horizon_ = horizon;
    e.family_ = std::string(seq.family_name());
    // The weight alphabet shows up within the first few positions.
    std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = std::numeric_limits<std::int64_t>::min();
    for (index_t n = 1; n <= std::min<index_t>(horizon, 8); ++n) {
      const auto w = WeightSequence::closed_form_prefix(e.closed_family_, n) -
                     WeightSequence::closed_form_prefix(e.closed_family_, n - 1);
      lo = std::min(lo, w);
      hi = std::max(hi, w);
    }
    e.min_weight_ = Log2Value::exact(lo);
    e.max_weight_ = Log2Value::exact(hi);
    return e;
  }

  index_t horizon() const noexcept { return horizon_; }
  Backend backend() const noexcept { return backend_; }
  bool exact() const noexcept { return backend_ != Backend::FloatTable; }
  const std::string& family() const noexcept { return family_; }

  /// L[k], 0 <= k <= horizon.
  Log2Value prefix(index_t k) const {
    if (k < 0 || k > horizon_)
      throw Error(ErrorKind::HorizonExceeded, "prefix index " + std::to_string(k) + " outside [0, " + std::to_string(horizon_) + "]");
    return raw_prefix(k);
  }

  /// M_i^n; exact unless the backend is FloatTable.
  Log2Value product(index_t i, index_t n) const {
    check_window(i, n);
    return raw_prefix(i + n - 1) - raw_prefix(i - 1);
  }

  Log2Value weight(index_t i) const { return product(i, 1); }

  /// max / min weight over w_1..w_horizon (mu and delta).
  Log2Value max_weight() const noexcept { return max_weight_; }
  Log2Value min_weight() const noexcept { return min_weight_; }

  void check_window(index_t i, index_t n) const {
    if (i < 1 || n < 1)
      throw Error(ErrorKind::InvalidArgument, "window (i=" + std::to_string(i) + ", n=" + std::to_string(n) + ") needs i, n >= 1");
    if (n > horizon_ || i > horizon_ - n + 1)
      throw Error(ErrorKind::HorizonExceeded, "window (i=" + std::to_string(i) + ", n=" + std::to_string(n) +
                                                  ") exceeds horizon " + std::to_string(horizon_));
  }

  /// Integer prefix table (ExactTable backend only), element k is L[k].
  std::span<const std::int64_t> exact_prefix_table() const noexcept { return exact_prefix_; }

 private:
  ProductEngine() = default;

  Log2Value raw_prefix(index_t k) const {
    switch (backend_) {
      case Backend::ExactTable: return Log2Value::exact(exact_prefix_[static_cast<std::size_t>(k)]);
      case Backend::FloatTable: return Log2Value::inexact(float_prefix_[static_cast<std::size_t>(k)]);
      case Backend::ClosedForm: return Log2Value::exact(WeightSequence::closed_form_prefix(closed_family_, k));
    }
    return Log2Value::one();
  }

  Backend backend_ = Backend::ExactTable;
  WeightSequence::Family closed_family_ = WeightSequence::Family::Diamond;
  index_t horizon_ = 0;
  std::string family_;
  std::vector<std::int64_t> exact_prefix_;
  std::vector<double> float_prefix_;
  Log2Value min_weight_;
  Log2Value max_weight_;
};

/// M_i^n.
inline Log2Value product(const ProductEngine& engine, index_t i, index_t n) { return engine.product(i, n); }

struct ProductSample {
  index_t i = 1;
  index_t j = 2;
  index_t n = 1;
};

/// Checks M_i^n M_{i+n}^{j-i} = M_i^{n+j-i} = M_i^{j-i} M_j^n for each sample.
/// Exact engines compare exponents with zero tolerance; float engines allow
/// `float_tolerance` in log2.
inline Report verify_product_formula(const ProductEngine& engine, std::span<const ProductSample> samples,
                                     double float_tolerance = 1e-9) {
  Report r;
  r.property = "product_formula";
  r.exact = engine.exact();
  double worst = 0.0;
  for (const auto& s : samples) {
    if (s.i >= s.j) throw Error(ErrorKind::InvalidArgument, "product formula sample needs i < j");
    const index_t gap = s.j - s.i;
    engine.check_window(s.i, s.n + gap);
    const Log2Value left = engine.product(s.i, s.n) + engine.product(s.i + s.n, gap);
    const Log2Value middle = engine.product(s.i, s.n + gap);
    const Log2Value right = engine.product(s.i, gap) + engine.product(s.j, s.n);
    bool ok;
    if (engine.exact()) {
      ok = left == middle && middle == right;
    } else {
      const double d = std::max(std::abs(left.log2() - middle.log2()), std::abs(middle.log2() - right.log2()));
      worst = std::max(worst, d);
      ok = d <= float_tolerance;
    }
    r.record_check(ok, "product_formula", {s.i, s.j, s.n}, middle);
  }
  r.config = {{"samples", samples.size()}, {"horizon", engine.horizon()}};
  if (!engine.exact()) {
    r.config["float_tolerance"] = float_tolerance;
    r.config["max_log2_discrepancy"] = worst;
  }
  r.finish_suite();
  return r;
}

struct WindowMin {
  Log2Value min;
  index_t argmin = 0;  // smallest attaining i
};

/// min over 1 <= i <= i_max of M_i^n, with the smallest attaining i.
inline WindowMin min_product_over_i(const ProductEngine& engine, index_t n, index_t i_max) {
  if (i_max < 1) throw Error(ErrorKind::InvalidArgument, "i_max must be >= 1");
  engine.check_window(i_max, n);
  WindowMin out;
  if (engine.backend() == ProductEngine::Backend::ExactTable) {
    const auto p = engine.exact_prefix_table();
    const std::int64_t* lo = p.data();
    const std::int64_t* hi = p.data() + n;
    std::int64_t best = hi[0] - lo[0];
    index_t best_i = 1;
    for (index_t i = 1; i < i_max; ++i) {
      const std::int64_t v = hi[i] - lo[i];
      if (v < best) {
        best = v;
        best_i = i + 1;
      }
    }
    out.min = Log2Value::exact(best);
    out.argmin = best_i;
    return out;
  }
  out.min = engine.product(1, n);
  out.argmin = 1;
  for (index_t i = 2; i <= i_max; ++i) {
    const Log2Value v = engine.product(i, n);
    if (v < out.min) {
      out.min = v;
      out.argmin = i;
    }
  }
  return out;
}

/// The sequence n -> M_1^n for n = 1..n_max.
struct M1Scan {
  std::vector<Log2Value> log2_m1;  // element n-1 holds M_1^n
  Log2Value max;
  index_t argmax = 0;                 // smallest attaining n
  std::vector<index_t> unit_indices;  // {n : M_1^n = 1}, exact engines only
};

inline M1Scan scan_m1(const ProductEngine& engine, index_t n_max) {
  if (n_max < 1) throw Error(ErrorKind::InvalidArgument, "n_max must be >= 1");
  if (n_max > engine.horizon())
    throw Error(ErrorKind::HorizonExceeded, "n_max " + std::to_string(n_max) + " exceeds horizon " + std::to_string(engine.horizon()));
  M1Scan s;
  s.log2_m1.reserve(static_cast<std::size_t>(n_max));
  for (index_t n = 1; n <= n_max; ++n) {
    const Log2Value v = engine.prefix(n);
    s.log2_m1.push_back(v);
    if (n == 1 || v > s.max) {
      s.max = v;
      s.argmax = n;
    }
    if (engine.exact() && v == Log2Value::one()) s.unit_indices.push_back(n);
  }
  return s;
}

/// CSV columns: n, log2_M1n, min_log2_Min_window, argmin; one row per
/// n = 1..n_max with the window minimum taken over 1 <= i <= i_max.
inline void write_scan_csv(std::ostream& out, const ProductEngine& engine, index_t n_max, index_t i_max) {
  engine.check_window(i_max, n_max);
  out << "n,log2_M1n,min_log2_Min_window,argmin\n";
  for (index_t n = 1; n <= n_max; ++n) {
    const WindowMin m = min_product_over_i(engine, n, i_max);
    out << n << ',' << format_log2(engine.prefix(n)) << ',' << format_log2(m.min) << ',' << m.argmin << '\n';
  }
}

}  // namespace wshift
