#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "log2_value.hpp"
#include "types.hpp"

namespace wshift {

inline constexpr int kReportSchema = 1;

enum class Verdict { EvidenceFor, EvidenceAgainst, Inconclusive };

inline const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::EvidenceFor: return "EvidenceFor";
    case Verdict::EvidenceAgainst: return "EvidenceAgainst";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

/// A recomputable datum: the indices it was taken at and the log2 value found.
/// For products the indices are (i, n) and the value is log2 M_i^n.
struct Witness {
  std::string label;
  std::vector<index_t> indices;
  Log2Value log2;
};

/// Outcome of a classifier or a verification suite.
///
/// Verdicts at a finite horizon are evidence, never proof: "for all n"
/// statements are only ever checked up to the horizons recorded in `config`.
struct Report {
  std::string property;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<Witness> witnesses;
  nlohmann::json config = nlohmann::json::object();
  bool exact = true;

  // Verification suites only.
  std::size_t checks = 0;
  std::size_t failure_count = 0;
  std::vector<Witness> failures;  // first kMaxStoredFailures

  std::vector<std::string> notes;

  static constexpr std::size_t kMaxStoredFailures = 32;

  void add_witness(std::string label, std::vector<index_t> indices, Log2Value value) {
    witnesses.push_back({std::move(label), std::move(indices), value});
    if (!value.is_exact()) exact = false;
  }

  /// Records one identity check; `ok == false` stores a failure witness.
  void record_check(bool ok, const std::string& label, std::vector<index_t> indices, Log2Value value) {
    ++checks;
    if (!value.is_exact()) exact = false;
    if (ok) return;
    ++failure_count;
    if (failures.size() < kMaxStoredFailures) failures.push_back({label, std::move(indices), value});
  }

  /// Closes a verification suite: EvidenceFor iff nothing failed.
  void finish_suite() { verdict = failure_count == 0 ? Verdict::EvidenceFor : Verdict::EvidenceAgainst; }

  bool passed() const noexcept { return failure_count == 0; }
};

inline nlohmann::json log2_to_json(const Log2Value& v) {
  if (v.is_exact()) return v.exponent();
  return v.log2();
}

inline Log2Value log2_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return Log2Value::exact(j.get<std::int64_t>());
  return Log2Value::inexact(j.get<double>());
}

inline nlohmann::json to_json(const Witness& w) {
  return {{"label", w.label}, {"indices", w.indices}, {"log2", log2_to_json(w.log2)}};
}

inline nlohmann::json to_json(const Report& r) {
  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["property"] = r.property;
  j["verdict"] = to_string(r.verdict);
  j["witnesses"] = nlohmann::json::array();
  for (const auto& w : r.witnesses) j["witnesses"].push_back(to_json(w));
  j["config"] = r.config;
  j["exact"] = r.exact;
  if (r.checks > 0) {
    j["checks"] = r.checks;
    j["failure_count"] = r.failure_count;
    j["failures"] = nlohmann::json::array();
    for (const auto& w : r.failures) j["failures"].push_back(to_json(w));
  }
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

}  // namespace wshift
