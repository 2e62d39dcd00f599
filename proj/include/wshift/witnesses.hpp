#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "analysis.hpp"
#include "log2_value.hpp"
#include "products.hpp"
#include "report.hpp"
#include "shifts.hpp"
#include "types.hpp"
#include "weights.hpp"

namespace wshift {

/// One re-checkable claim about a witness vector x.
///
/// Kinds:
///  - coordinate_equals_one:   (S^n x)_coordinate == 1
///  - coordinate_at_least_one: (S^n x)_coordinate >= 1
///  - orbit_norm_at_least_one: ||S^n x|| >= 1 in the bundle's space
///  - norm_below_one:          ||x|| < 1 in `space`
///  - norm_pow_equals_sum:     ||x||^p equals `target` to 1e-12 relative
struct Inequality {
  std::string kind;
  index_t n = 0;
  index_t coordinate = -1;
  double target = 1.0;
  double observed = 0.0;
  SpaceSpec space;
};

/// A vector built by one of the blocking constructions, with the data that
/// selected it and the finite list of inequalities it is claimed to satisfy.
/// The infinite constructions are replaced by finite ones: what gets verified
/// is exactly the recorded list, nothing more.
struct WitnessBundle {
  struct Pair {
    index_t i = 0;
    index_t n = 0;
    Log2Value product;  // M_i^n
  };

  std::string provenance;  // "uh_blocker" or "sh_blocker"
  SparseVector x;
  std::vector<Pair> pairs;                         // uh: (i_l, n_{k_l}); sh: (i_n, n)
  std::map<index_t, std::vector<index_t>> groups;  // sh: v -> N_v
  std::vector<Inequality> inequalities;
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json source = nlohmann::json::object();  // how to rebuild the engine (set by callers)
};

namespace detail {

inline bool close_rel(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)); }

/// Evaluates one inequality against (x, engine); fills `observed`.
inline bool evaluate(const ProductEngine& engine, const SparseVector& x, Inequality& q) {
  constexpr double kRel = 1e-12;
  if (q.kind == "coordinate_equals_one" || q.kind == "coordinate_at_least_one") {
    q.observed = apply_forward(engine, x, q.n).at(q.coordinate);
    if (q.kind == "coordinate_equals_one") return engine.exact() ? q.observed == 1.0 : close_rel(q.observed, 1.0, kRel);
    return engine.exact() ? q.observed >= 1.0 : q.observed >= 1.0 - kRel;
  }
  if (q.kind == "orbit_norm_at_least_one") {
    q.observed = norm(apply_forward(engine, x, q.n), q.space);
    return q.observed >= 1.0 - kRel;
  }
  if (q.kind == "norm_below_one") {
    q.observed = norm(x, q.space);
    return q.observed < 1.0;
  }
  if (q.kind == "norm_pow_equals_sum") {
    const double nx = norm(x, q.space);
    q.observed = q.space.is_c0() ? nx : std::pow(nx, q.space.p);
    return close_rel(q.observed, q.target, kRel);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown inequality kind '" + q.kind + "'");
}

inline void verify_all(const ProductEngine& engine, WitnessBundle& b) {
  for (auto& q : b.inequalities)
    if (!evaluate(engine, b.x, q))
      throw Error(ErrorKind::PreconditionUnmet, "witness inequality " + q.kind + " failed at n=" + std::to_string(q.n) +
                                                    " (observed " + format_double(q.observed) + ")");
}

}  // namespace detail

/// Vector showing that (n_k) does not make B_w ultra hypercyclic.
///
/// Greedy: k runs outward, and for each k, i runs upward from the last
/// selected i. The first pair with i > i_{l-1}, n_k > n_{k_{l-1}} and
/// M_i^{n_k} < 2^-l becomes (i_l, n_{k_l}). Then x_{i_l - 1} = M_{i_l}^{n_{k_l}},
/// so (S^{n_{k_l}} x)_{i_l - 1 + n_{k_l}} = 1 and ||x||_1 < sum 2^-l < 1.
/// Only n_k with n_k + i_max - 1 within the horizon are scanned.
inline WitnessBundle build_uh_blocker(const ProductEngine& engine, const SubseqSpec& nk, int L, const ClassifierConfig& cfg) {
  if (L < 0) throw Error(ErrorKind::InvalidArgument, "L must be >= 0");
  if (cfg.i_max < 1) throw Error(ErrorKind::InvalidArgument, "i_max must be >= 1");
  WitnessBundle b;
  b.provenance = "uh_blocker";
  b.x = SparseVector(SpaceSpec::lp(1.0));
  b.params = {{"L", L}, {"i_max", cfg.i_max}, {"nk", nk.kind_name()}};

  index_t last_i = 0, last_n = 0;
  int l = 1;
  for (index_t n : nk.values) {
    if (l > L) break;
    if (n > engine.horizon() - cfg.i_max + 1) break;
    if (n <= last_n) continue;
    for (index_t i = last_i + 1; i <= cfg.i_max; ++i) {
      const Log2Value m = engine.product(i, n);
      if (m.log2() < -static_cast<double>(l)) {
        b.pairs.push_back({i, n, m});
        b.x.set(i - 1, m.value());
        last_i = i;
        last_n = n;
        ++l;
        break;
      }
    }
  }
  if (static_cast<int>(b.pairs.size()) < L)
    throw Error(ErrorKind::NoPairsFound, "found " + std::to_string(b.pairs.size()) + " of " + std::to_string(L) +
                                             " pairs with M_i^{n_k} < 2^-l (i_max " + std::to_string(cfg.i_max) + ")");

  for (const auto& p : b.pairs) {
    b.inequalities.push_back({"coordinate_equals_one", p.n, p.i - 1 + p.n, 1.0, 0.0, SpaceSpec::c0()});
    b.inequalities.push_back({"orbit_norm_at_least_one", p.n, -1, 1.0, 0.0, SpaceSpec::c0()});
  }
  b.inequalities.push_back({"norm_below_one", 0, -1, 1.0, 0.0, SpaceSpec::lp(1.0)});
  detail::verify_all(engine, b);
  return b;
}

/// Vector whose orbit stays outside the unit ball up to N, i.e. a vector the
/// strong hypercyclicity necessary condition forbids when the sums are small.
///
/// i_n = argmin_{i <= i_max} M_i^n (smallest i on ties); V = {i_n}, and for v in
/// V the group N_v = {n : i_n = v}. l^p: x_{v-1} = (sum_{n in N_v} (M_v^n)^p)^{1/p};
/// c_0: x_{v-1} = max_{n in N_v} M_v^n. Then (S^n x)_{i_n - 1 + n} >= 1 for
/// every n <= N. Refuses (PreconditionUnmet) when the sum of (M_{i_n}^n)^p,
/// or for c_0 the max of M_{i_n}^n, is not below `norm_bound`.
inline WitnessBundle build_sh_blocker(const ProductEngine& engine, const SpaceSpec& space, index_t N, index_t i_max,
                                      double norm_bound = 1.0) {
  if (N < 1) throw Error(ErrorKind::InvalidArgument, "N must be >= 1");
  engine.check_window(i_max, N);
  WitnessBundle b;
  b.provenance = "sh_blocker";
  b.x = SparseVector(space);
  const double p = space.is_c0() ? 1.0 : space.p;

  double partial = 0.0;  // sum of (M_{i_n}^n)^p, or max for c_0
  for (index_t n = 1; n <= N; ++n) {
    const WindowMin m = min_product_over_i(engine, n, i_max);
    b.pairs.push_back({m.argmin, n, m.min});
    b.groups[m.argmin].push_back(n);
    const double term = m.min.pow(p).value();
    partial = space.is_c0() ? std::max(partial, term) : partial + term;
  }
  b.params = {{"space", space.name()}, {"N", N}, {"i_max", i_max}, {"norm_bound", norm_bound}, {"partial_sum", partial}};
  if (!(partial < norm_bound))
    throw Error(ErrorKind::PreconditionUnmet, std::string(space.is_c0() ? "max" : "sum") + " of (min_i M_i^n)^p over n <= " +
                                                  std::to_string(N) + " is " + format_double(partial) +
                                                  ", not below " + format_double(norm_bound));

  for (const auto& [v, ns] : b.groups) {
    double value = 0.0;
    if (space.is_c0()) {
      for (index_t n : ns) value = std::max(value, engine.product(v, n).value());
    } else {
      detail::Log2Sum s;
      for (index_t n : ns) s.add(engine.product(v, n).log2() * p);
      value = std::exp2(s.log2() / p);
      if (ns.size() == 1) value = engine.product(v, ns.front()).value();  // exact single term
    }
    b.x.set(v - 1, value);
  }

  for (const auto& q : b.pairs) {
    b.inequalities.push_back({"coordinate_at_least_one", q.n, q.i - 1 + q.n, 1.0, 0.0, space});
    b.inequalities.push_back({"orbit_norm_at_least_one", q.n, -1, 1.0, 0.0, space});
  }
  if (!space.is_c0()) b.inequalities.push_back({"norm_pow_equals_sum", 0, -1, partial, 0.0, space});
  detail::verify_all(engine, b);
  return b;
}

/// u = (y_0, ..., y_{n-1}, 0, ...), which B_w^n sends to 0.
inline SparseVector build_kernel_truncation(const SparseVector& y, index_t n) { return y.restricted_below(n); }

struct ConvergenceRow {
  int k = 0;
  index_t n = 0;
  double distance = 0.0;  // ||S^{n_k} x + u_k - y||
};

/// ||S^{n_k} x + u_k - y|| for k = 1..K with u_k the kernel truncation of y.
inline std::vector<ConvergenceRow> demo_ultra_convergence(const ProductEngine& engine, const SubseqSpec& nk,
                                                          const SparseVector& x, const SparseVector& y, int K) {
  if (x.empty()) throw Error(ErrorKind::InvalidArgument, "x must be nonzero");
  if (K > static_cast<int>(nk.values.size()))
    throw Error(ErrorKind::InvalidArgument, "K exceeds the number of n_k supplied");
  std::vector<ConvergenceRow> rows;
  for (int k = 1; k <= K; ++k) {
    const index_t n = nk.values[static_cast<std::size_t>(k - 1)];
    const SparseVector d = apply_forward(engine, x, n) + build_kernel_truncation(y, n) - y;
    rows.push_back({k, n, norm(d, x.space())});
  }
  return rows;
}

/// Re-checks every recorded inequality from (x, engine) alone.
inline Report verify_bundle(const ProductEngine& engine, const WitnessBundle& bundle) {
  Report r;
  r.property = "witness_" + bundle.provenance;
  r.exact = engine.exact();
  r.config = bundle.params;
  for (Inequality q : bundle.inequalities) {
    bool ok = false;
    try {
      ok = detail::evaluate(engine, bundle.x, q);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::HorizonExceeded && e.kind() != ErrorKind::InvalidArgument) throw;
      r.notes.push_back(std::string("could not evaluate ") + q.kind + ": " + e.what());
    }
    const Log2Value v = q.observed > 0.0 ? detail::log2_of(q.observed) : Log2Value::inexact(-HUGE_VAL);
    r.record_check(ok, q.kind, {q.n, q.coordinate}, v);
  }
  // Pair data must match the engine too.
  for (const auto& p : bundle.pairs) {
    const Log2Value m = engine.product(p.i, p.n);
    const bool ok = engine.exact() ? m == p.product : std::abs(m.log2() - p.product.log2()) <= 1e-9;
    r.record_check(ok, "pair_product", {p.i, p.n}, m);
  }
  r.finish_suite();
  return r;
}

inline nlohmann::json to_json(const WitnessBundle& b) {
  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["provenance"] = b.provenance;
  j["x"] = to_json(b.x);
  j["pairs"] = nlohmann::json::array();
  for (const auto& p : b.pairs) j["pairs"].push_back({{"i", p.i}, {"n", p.n}, {"log2", log2_to_json(p.product)}});
  j["groups"] = nlohmann::json::array();
  for (const auto& [v, ns] : b.groups) j["groups"].push_back({{"v", v}, {"n", ns}});
  j["inequalities"] = nlohmann::json::array();
  for (const auto& q : b.inequalities)
    j["inequalities"].push_back({{"kind", q.kind},
                                 {"n", q.n},
                                 {"coordinate", q.coordinate},
                                 {"target", q.target},
                                 {"observed", q.observed},
                                 {"space", q.space.name()}});
  j["params"] = b.params;
  j["source"] = b.source;
  return j;
}

inline WitnessBundle witness_bundle_from_json(const nlohmann::json& j) {
  try {
    WitnessBundle b;
    b.provenance = j.at("provenance").get<std::string>();
    b.x = sparse_vector_from_json(j.at("x"));
    for (const auto& p : j.at("pairs"))
      b.pairs.push_back({p.at("i").get<index_t>(), p.at("n").get<index_t>(), log2_from_json(p.at("log2"))});
    for (const auto& g : j.value("groups", nlohmann::json::array()))
      b.groups[g.at("v").get<index_t>()] = g.at("n").get<std::vector<index_t>>();
    for (const auto& q : j.at("inequalities"))
      b.inequalities.push_back({q.at("kind").get<std::string>(), q.at("n").get<index_t>(), q.at("coordinate").get<index_t>(),
                                q.at("target").get<double>(), q.value("observed", 0.0),
                                SpaceSpec::parse(q.at("space").get<std::string>())});
    b.params = j.value("params", nlohmann::json::object());
    b.source = j.value("source", nlohmann::json::object());
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("malformed witness bundle: ") + e.what());
  }
}

}  // namespace wshift
