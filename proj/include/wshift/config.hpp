#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "analysis.hpp"
#include "products.hpp"
#include "shifts.hpp"
#include "types.hpp"
#include "weights.hpp"

namespace wshift {

/// Everything one CLI invocation needs. Filled from flags and/or a config
/// file; see cli.hpp for the flag names.
///
/// `horizon` is the number of weights the engine sees (w_1..w_H). Checks that
/// take a minimum over i <= i_max therefore range over n <= H - i_max + 1.
struct RunConfig {
  std::string command;

  // [sequence]
  std::string family = "diamond";  // diamond | block | literal
  std::vector<std::string> values;  // literal weights: "2", "1/2", "0.75"
  std::string values_file;          // gen CSV (n,w_n,log2_wn) to re-ingest as literal
  std::string tail = "ones";        // ones | repeat

  index_t horizon = 100000;
  index_t i_max = 10000;
  int k_max = 10;
  int m_max = 5;
  std::string space = "l2";
  std::string nk;       // block | diamond | diamond-scaled:<m> | full | list:<n1,n2,...>; empty = by family
  std::string profile;  // inv-sqrt4 | inverse[:a]; empty = by family
  std::string engine = "auto";  // auto | table | closed-form
  std::string checks = "hypercyclic,mixing,ultra,strong_necessary,strong_sufficient";
  std::string suite;  // verify: comma list of diamond, block, product, lemma; empty = by family
  std::string out;
  bool json = false;

  double log2_threshold = 6.0;
  index_t tail_window = 0;
  double log2_decay_tolerance = -4.0;
  std::vector<int> eps_log2 = {-4, -6, -8, -10, -12};
  std::vector<index_t> n_list = {4, 16, 64};

  std::string vector_file;  // orbit input
  std::string bundle_file;  // verify: replay a witness bundle
  std::string kind = "uh";  // witness: uh | sh
  int L = 4;
  index_t N = 10;
  double bound = 1.0;
  std::uint64_t seed = 1;
};

/// Auto-selects the closed-form backend above this many weights.
inline constexpr index_t kAutoClosedFormAbove = index_t{1} << 24;

namespace detail {

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    std::string item(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    while (!item.empty() && (item.back() == ' ' || item.back() == '\r' || item.back() == '\t')) item.pop_back();
    while (!item.empty() && (item.front() == ' ' || item.front() == '\t')) item.erase(item.begin());
    out.push_back(item);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view s, std::string_view what) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw Error(ErrorKind::Config, "bad " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

/// log2 w_n column of a gen CSV; integers stay exact.
inline std::vector<Log2Value> read_weights_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Config, path + " is empty");
  const auto header = split(line, ',');
  int log_col = -1, w_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "log2_wn") log_col = static_cast<int>(c);
    if (header[c] == "w_n") w_col = static_cast<int>(c);
  }
  if (log_col < 0 && w_col < 0) throw Error(ErrorKind::Config, path + " has neither a log2_wn nor a w_n column");
  std::vector<Log2Value> out;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line, ',');
    if (log_col >= 0) {
      const std::string& cell = cells.at(static_cast<std::size_t>(log_col));
      if (cell.find_first_of(".eE") == std::string::npos)
        out.push_back(Log2Value::exact(parse_number<std::int64_t>(cell, "log2_wn")));
      else
        out.push_back(Log2Value::inexact(parse_number<double>(cell, "log2_wn")));
    } else {
      out.push_back(Rational::parse(cells.at(static_cast<std::size_t>(w_col))).log2());
    }
    if (out.size() > kMaxLiteralEntries)
      throw Error(ErrorKind::InvalidArgument, path + " holds more than " + std::to_string(kMaxLiteralEntries) + " weights");
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

inline Tail parse_tail(std::string_view s) {
  if (s == "ones") return Tail::Ones;
  if (s == "repeat" || s == "periodic") return Tail::PeriodicRepeat;
  throw Error(ErrorKind::Config, "tail must be 'ones' or 'repeat', got '" + std::string(s) + "'");
}

inline WeightSequence make_sequence(const RunConfig& cfg) {
  if (cfg.family == "diamond") return gen_diamond(1);
  if (cfg.family == "block") return gen_block(1);
  if (cfg.family == "literal") {
    const Tail tail = parse_tail(cfg.tail);
    if (!cfg.values_file.empty()) {
      if (!cfg.values.empty()) throw Error(ErrorKind::Config, "give either values or values-file, not both");
      return gen_literal_log2(detail::read_weights_csv(cfg.values_file), tail);
    }
    std::vector<Rational> vals;
    for (const auto& v : cfg.values) vals.push_back(Rational::parse(v));
    return gen_literal(vals, tail);
  }
  throw Error(ErrorKind::Config, "unknown family '" + cfg.family + "' (diamond, block, literal)");
}

/// The sequence block as it appears in reports and witness bundles.
inline nlohmann::json sequence_json(const RunConfig& cfg) {
  nlohmann::json j = {{"family", cfg.family}};
  if (cfg.family == "literal") {
    if (!cfg.values_file.empty())
      j["values_file"] = cfg.values_file;
    else
      j["values"] = cfg.values;
    j["tail"] = cfg.tail;
  }
  return j;
}

inline ProductEngine make_engine(WeightSequence& seq, index_t horizon, std::string_view mode) {
  if (mode == "table") return ProductEngine::tabulate(seq, horizon);
  if (mode == "closed-form") return ProductEngine::closed_form(seq, horizon);
  if (mode == "auto") {
    if (seq.has_closed_form() && horizon > kAutoClosedFormAbove) return ProductEngine::closed_form(seq, horizon);
    return ProductEngine::tabulate(seq, horizon);
  }
  throw Error(ErrorKind::Config, "engine must be auto, table or closed-form");
}

inline SubseqSpec make_nk(const RunConfig& cfg, index_t horizon) {
  std::string spec = cfg.nk;
  if (spec.empty()) spec = cfg.family == "block" ? "block" : cfg.family == "diamond" ? "diamond" : "full";
  if (spec == "block") return block_nk_sequence(cfg.k_max);
  if (spec == "diamond") return ak_sequence(cfg.k_max);
  if (spec.starts_with("diamond-scaled:"))
    return diamond_scaled_sequence(detail::parse_number<int>(std::string_view(spec).substr(15), "scale"), cfg.k_max);
  if (spec == "full") return SubseqSpec::full(horizon);
  if (spec.starts_with("list:")) {
    std::vector<index_t> v;
    for (const auto& s : detail::split(std::string_view(spec).substr(5), ','))
      v.push_back(detail::parse_number<index_t>(s, "n_k"));
    return SubseqSpec::explicit_values(std::move(v));
  }
  throw Error(ErrorKind::Config, "unknown nk '" + spec + "'");
}

inline GrowthProfile make_profile(const RunConfig& cfg) {
  std::string spec = cfg.profile;
  if (spec.empty()) spec = cfg.family == "diamond" ? "inv-sqrt4" : "inverse";
  if (spec == "inv-sqrt4") return GrowthProfile::inv_sqrt4();
  if (spec == "inverse") return GrowthProfile::inverse();
  if (spec.starts_with("inverse:")) return GrowthProfile::inverse(detail::parse_number<double>(std::string_view(spec).substr(8), "a"));
  throw Error(ErrorKind::Config, "unknown profile '" + spec + "'");
}

inline ClassifierConfig make_classifier_config(const RunConfig& cfg) {
  ClassifierConfig c;
  c.i_max = cfg.i_max;
  c.horizon = cfg.horizon - cfg.i_max + 1;
  if (c.horizon < 1)
    throw Error(ErrorKind::HorizonExceeded, "horizon " + std::to_string(cfg.horizon) + " leaves no room for i_max " +
                                                std::to_string(cfg.i_max));
  c.log2_threshold = cfg.log2_threshold;
  c.tail_window = cfg.tail_window;
  c.log2_decay_tolerance = cfg.log2_decay_tolerance;
  return c;
}

}  // namespace wshift
