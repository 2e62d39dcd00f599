#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "format.hpp"
#include "products.hpp"
#include "types.hpp"
#include "weights.hpp"

namespace wshift {

/// c_0 (sup norm) or l^p, p >= 1.
struct SpaceSpec {
  enum class Kind { Lp, C0 };

  Kind kind = Kind::Lp;
  double p = 2.0;

  static SpaceSpec lp(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorKind::InvalidArgument, "l^p needs finite p >= 1");
    return {Kind::Lp, p};
  }
  static SpaceSpec c0() { return {Kind::C0, 0.0}; }

  bool is_c0() const noexcept { return kind == Kind::C0; }

  /// "c0", "l1", "l2", "l1.5", ...
  std::string name() const { return is_c0() ? "c0" : "l" + format_double(p); }

  /// Accepts "c0", "l<p>" and "lp:<p>".
  static SpaceSpec parse(std::string_view text) {
    if (text == "c0" || text == "C0") return c0();
    std::string_view num;
    if (text.starts_with("lp:"))
      num = text.substr(3);
    else if (text.starts_with("l") || text.starts_with("L"))
      num = text.substr(1);
    else
      throw Error(ErrorKind::InvalidArgument, "unknown space '" + std::string(text) + "'");
    double p = 0.0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), p);
    if (ec != std::errc{} || ptr != num.data() + num.size())
      throw Error(ErrorKind::InvalidArgument, "unknown space '" + std::string(text) + "'");
    return lp(p);
  }

  friend bool operator==(const SpaceSpec&, const SpaceSpec&) = default;
};

/// Finitely supported element of c_0 or l^p; coordinates are 0-based.
/// Zero values are never stored.
class SparseVector {
 public:
  SparseVector() = default;
  explicit SparseVector(SpaceSpec space) : space_(space) {}

  /// e_j.
  static SparseVector basis(index_t j, SpaceSpec space = {}) {
    SparseVector v(space);
    v.set(j, 1.0);
    return v;
  }

  void set(index_t j, double value) {
    if (j < 0) throw Error(ErrorKind::InvalidArgument, "coordinates are indexed from 0");
    if (!std::isfinite(value)) throw Error(ErrorKind::InvalidArgument, "coordinate value must be finite");
    if (value == 0.0)
      entries_.erase(j);
    else
      entries_[j] = value;
  }

  double at(index_t j) const {
    auto it = entries_.find(j);
    return it == entries_.end() ? 0.0 : it->second;
  }

  const std::map<index_t, double>& entries() const noexcept { return entries_; }
  const SpaceSpec& space() const noexcept { return space_; }
  void set_space(SpaceSpec s) noexcept { space_ = s; }

  bool empty() const noexcept { return entries_.empty(); }
  std::size_t support_size() const noexcept { return entries_.size(); }
  index_t max_index() const { return entries_.empty() ? -1 : entries_.rbegin()->first; }

  /// Coordinates with index < n, the rest dropped.
  SparseVector restricted_below(index_t n) const {
    SparseVector out(space_);
    for (auto it = entries_.begin(); it != entries_.end() && it->first < n; ++it) out.entries_.insert(*it);
    return out;
  }

  SparseVector scaled(double c) const {
    SparseVector out(space_);
    for (const auto& [j, v] : entries_) out.set(j, c * v);
    return out;
  }

  friend SparseVector operator+(const SparseVector& a, const SparseVector& b) {
    SparseVector out = a;
    for (const auto& [j, v] : b.entries_) out.set(j, out.at(j) + v);
    return out;
  }

  friend SparseVector operator-(const SparseVector& a, const SparseVector& b) { return a + b.scaled(-1.0); }

  /// Same support and bit-identical values (space ignored).
  friend bool operator==(const SparseVector& a, const SparseVector& b) { return a.entries_ == b.entries_; }

 private:
  std::map<index_t, double> entries_;
  SpaceSpec space_;
};

/// c_0: max |x_i|; l^p: (sum |x_i|^p)^(1/p). Zero vector -> 0.
inline double norm(const SparseVector& x, const SpaceSpec& space) {
  double peak = 0.0;
  for (const auto& [j, v] : x.entries()) peak = std::max(peak, std::abs(v));
  if (space.is_c0() || peak == 0.0) return peak;
  if (space.p == 1.0) {
    double s = 0.0;
    for (const auto& [j, v] : x.entries()) s += std::abs(v);
    return s;
  }
  // Scaled by the peak so that huge or tiny coordinates don't over/underflow.
  double s = 0.0;
  for (const auto& [j, v] : x.entries()) s += std::pow(std::abs(v) / peak, space.p);
  return peak * std::pow(s, 1.0 / space.p);
}

inline double norm(const SparseVector& x) { return norm(x, x.space()); }

/// B_w^n x:  (B_w^n x)_j = M_{j+1}^n x_{j+n}. Coordinates below n are dropped.
inline SparseVector apply_backward(const ProductEngine& engine, const SparseVector& x, index_t n) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "power must be >= 0");
  if (n == 0) return x;
  SparseVector out(x.space());
  for (const auto& [k, v] : x.entries()) {
    if (k < n) continue;
    const index_t j = k - n;
    out.set(j, engine.product(j + 1, n).scale(v));
  }
  return out;
}

/// S^n x:  (S^n x)_{k+n} = x_k / M_{k+1}^n. Coordinates below n vanish.
/// In exact mode each coordinate is x_k times an exact power of two.
inline SparseVector apply_forward(const ProductEngine& engine, const SparseVector& x, index_t n) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "power must be >= 0");
  if (n == 0) return x;
  SparseVector out(x.space());
  for (const auto& [k, v] : x.entries()) {
    if (k > std::numeric_limits<index_t>::max() - n) throw Error(ErrorKind::Overflow, "coordinate index overflow");
    out.set(k + n, (-engine.product(k + 1, n)).scale(v));
  }
  return out;
}

struct OrbitPoint {
  index_t n = 0;
  double norm = 0.0;
};

/// ||S^n x|| along the given subsequence.
inline std::vector<OrbitPoint> orbit_norms(const ProductEngine& engine, const SparseVector& x, const std::vector<index_t>& ns) {
  std::vector<OrbitPoint> out;
  out.reserve(ns.size());
  for (index_t n : ns) out.push_back({n, norm(apply_forward(engine, x, n))});
  return out;
}

inline std::vector<OrbitPoint> orbit_norms(const ProductEngine& engine, const SparseVector& x, const SubseqSpec& ns) {
  return orbit_norms(engine, x, ns.values);
}

inline nlohmann::json to_json(const SparseVector& x) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [j, v] : x.entries()) entries.push_back({j, v});
  return {{"space", x.space().name()}, {"entries", entries}};
}

inline SparseVector sparse_vector_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("entries"))
    throw Error(ErrorKind::Config, "vector JSON needs an 'entries' array");
  SparseVector x(j.contains("space") ? SpaceSpec::parse(j.at("space").get<std::string>()) : SpaceSpec{});
  for (const auto& e : j.at("entries")) {
    if (!e.is_array() || e.size() != 2) throw Error(ErrorKind::Config, "vector entries must be [index, value] pairs");
    const auto idx = e[0].get<index_t>();
    if (x.at(idx) != 0.0) throw Error(ErrorKind::Config, "duplicate index " + std::to_string(idx) + " in vector JSON");
    x.set(idx, e[1].get<double>());
  }
  return x;
}

}  // namespace wshift
