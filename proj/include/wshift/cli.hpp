#pragma once

#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "analysis.hpp"
#include "config.hpp"
#include "format.hpp"
#include "products.hpp"
#include "report.hpp"
#include "shifts.hpp"
#include "types.hpp"
#include "weights.hpp"
#include "witnesses.hpp"

namespace wshift {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailed = 1,  // identity failure, Inconclusive verdict, no witness found
  kExitHorizon = 2,
  kExitConfig = 3,  // bad flags or config file, unreadable input, I/O
};

inline int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::HorizonExceeded: return kExitHorizon;
    case ErrorKind::NoPairsFound:
    case ErrorKind::PreconditionUnmet: return kExitFailed;
    default: return kExitConfig;
  }
}

namespace detail {

/// Writes to --out when given, else to `fallback`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error(ErrorKind::Io, "cannot write " + path);
      out_ = file_.get();
    }
  }
  std::ostream& operator*() { return *out_; }
  void close() {
    if (file_) {
      file_->close();
      if (!*file_) throw Error(ErrorKind::Io, "write failed");
    }
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_;
};

inline std::string indices_string(const std::vector<index_t>& v) {
  std::string s = "(";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + std::to_string(v[k]);
  return s + ")";
}

}  // namespace detail

/// CSV n,w_n,log2_wn for n = 1..horizon.
inline int cmd_gen(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be >= 1");
  WeightSequence seq = make_sequence(cfg);
  seq.materialize(cfg.horizon);
  detail::Sink sink(cfg.out, out);
  *sink << "n,w_n,log2_wn\n";
  for (index_t n = 1; n <= cfg.horizon; ++n) {
    const Log2Value w = seq.log2_weight(n);
    *sink << n << ',' << format_double(w.value()) << ',' << format_log2(w) << '\n';
  }
  sink.close();
  return kExitOk;
}

/// Runs the selected classifiers and writes one JSON document.
/// Exit 0 iff no requested check came back Inconclusive.
inline int cmd_classify(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  WeightSequence seq = make_sequence(cfg);
  const ProductEngine engine = make_engine(seq, cfg.horizon, cfg.engine);
  const ClassifierConfig cc = make_classifier_config(cfg);
  const SpaceSpec space = SpaceSpec::parse(cfg.space);

  nlohmann::json doc;
  doc["schema"] = kReportSchema;
  doc["command"] = "classify";
  doc["sequence"] = sequence_json(cfg);
  doc["horizon"] = cfg.horizon;
  doc["reports"] = nlohmann::json::object();
  doc["verdicts"] = nlohmann::json::object();
  bool conclusive = true;
  auto add = [&](const Report& r) {
    doc["reports"][r.property] = to_json(r);
    doc["verdicts"][r.property] = to_string(r.verdict);
    if (r.verdict == Verdict::Inconclusive) conclusive = false;
  };

  for (const auto& check : detail::split(cfg.checks, ',')) {
    if (check == "hypercyclic") {
      const SubseqSpec nk = make_nk(cfg, cc.horizon);
      add(check_hypercyclic(engine, cc, nk.up_to(cc.horizon)));
    } else if (check == "mixing") {
      add(check_mixing(engine, cc));
    } else if (check == "ultra") {
      add(check_ultra_conditions(engine, make_nk(cfg, cc.horizon), cc));
    } else if (check == "strong_necessary") {
      add(check_strong_necessary(engine, space, cc));
    } else if (check == "strong_sufficient") {
      std::vector<double> eps;
      for (int e : cfg.eps_log2) eps.push_back(std::ldexp(1.0, e));
      add(check_strong_sufficient(engine, make_profile(cfg), eps, cfg.n_list, cc));
    } else {
      throw Error(ErrorKind::Config, "unknown check '" + check + "'");
    }
  }
  detail::Sink sink(cfg.out, out);
  *sink << doc.dump(2) << '\n';
  sink.close();
  return conclusive ? kExitOk : kExitFailed;
}

namespace detail {

/// Smallest horizon that the selected verify suites fit into.
inline index_t verify_horizon(const RunConfig& cfg, const std::vector<std::string>& suites, DiamondSuiteConfig& dc) {
  index_t need = cfg.horizon;
  for (const auto& s : suites) {
    if (s == "diamond") {
      dc.growth_k_max = cfg.k_max;
      dc.floor_k_max = std::min(cfg.k_max, 6);
      dc.m_max = cfg.m_max;
      const auto ak = ak_sequence(std::max(1, cfg.k_max)).values;
      index_t four_m = 1;
      for (int m = 0; m < dc.m_max; ++m) four_m = checked_mul(four_m, 4);
      need = std::max({need, ak.back(), dc.floor_i_max + ak[static_cast<std::size_t>(dc.floor_k_max - 1)] - 1,
                       4 * dc.i_max + 4 * dc.k_max - 1, four_m * (dc.scaled_i_max + dc.scaled_k_max) - 1,
                       2 * dc.reflection_n_max + 1});
    } else if (s == "block") {
      need = std::max(need, checked_add(block_nk_sequence(cfg.k_max).values.back(), cfg.i_max - 1));
    } else if (s != "product" && s != "lemma") {
      throw Error(ErrorKind::Config, "unknown suite '" + s + "' (diamond, block, product, lemma)");
    }
  }
  return need;
}

template <class Sample>
std::vector<Sample> random_samples(std::mt19937_64& rng, index_t horizon, std::size_t count) {
  // i < j, n >= 1 with j + n - 1 <= horizon.
  std::vector<Sample> out;
  if (horizon < 3) return out;
  const index_t span = std::min<index_t>(horizon, 4096);
  std::uniform_int_distribution<index_t> gap(1, span / 2);
  for (std::size_t c = 0; c < count; ++c) {
    const index_t g = gap(rng), n = gap(rng);
    std::uniform_int_distribution<index_t> start(1, horizon - g - n + 1);
    const index_t i = start(rng);
    out.push_back({i, i + g, n});
  }
  return out;
}

}  // namespace detail

inline int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<Report> reports;
  nlohmann::json doc;
  doc["schema"] = kReportSchema;
  doc["command"] = "verify";

  if (!cfg.bundle_file.empty()) {
    const auto bj = nlohmann::json::parse(detail::read_file(cfg.bundle_file), nullptr, false);
    if (bj.is_discarded()) throw Error(ErrorKind::Config, cfg.bundle_file + " is not valid JSON");
    const WitnessBundle bundle = witness_bundle_from_json(bj);
    RunConfig src = cfg;
    const auto& s = bundle.source;
    if (!s.contains("sequence") || !s.contains("horizon")) throw Error(ErrorKind::Config, "bundle has no source sequence");
    src.family = s["sequence"].at("family").get<std::string>();
    src.values = s["sequence"].value("values", std::vector<std::string>{});
    src.values_file = s["sequence"].value("values_file", std::string{});
    src.tail = s["sequence"].value("tail", std::string("ones"));
    WeightSequence seq = make_sequence(src);
    const ProductEngine engine = make_engine(seq, s["horizon"].get<index_t>(), s.value("engine", std::string("auto")));
    doc["sequence"] = sequence_json(src);
    reports.push_back(verify_bundle(engine, bundle));
  } else {
    std::string suite_list = cfg.suite;
    if (suite_list.empty())
      suite_list = cfg.family == "diamond" ? "diamond,product,lemma" : cfg.family == "block" ? "block,product,lemma" : "product,lemma";
    const auto suites = detail::split(suite_list, ',');
    DiamondSuiteConfig dc;
    const index_t horizon = detail::verify_horizon(cfg, suites, dc);
    WeightSequence seq = make_sequence(cfg);
    const ProductEngine engine = make_engine(seq, horizon, cfg.engine);
    doc["sequence"] = sequence_json(cfg);
    doc["horizon"] = horizon;
    std::mt19937_64 rng(cfg.seed);
    for (const auto& s : suites) {
      if (s == "diamond") {
        reports.push_back(verify_diamond_identities(engine, dc));
      } else if (s == "block") {
        reports.push_back(verify_block_facts(engine, cfg.k_max, cfg.i_max));
      } else if (s == "product") {
        const auto samples = detail::random_samples<ProductSample>(rng, horizon, 10000);
        reports.push_back(verify_product_formula(engine, samples));
      } else if (s == "lemma") {
        const auto samples = detail::random_samples<LemmaSample>(rng, horizon, 1000);
        reports.push_back(verify_lemma_comparability(engine, samples));
      }
    }
  }

  bool ok = true;
  doc["reports"] = nlohmann::json::array();
  for (const auto& r : reports) {
    doc["reports"].push_back(to_json(r));
    if (!r.passed()) {
      ok = false;
      const Witness& w = r.failures.front();
      err << "FAIL " << r.property << ": " << w.label << " at " << detail::indices_string(w.indices) << " (log2 "
          << format_log2(w.log2) << "), " << r.failure_count << " of " << r.checks << " checks failed\n";
    }
  }
  detail::Sink sink(cfg.out, out);
  if (cfg.json) {
    *sink << doc.dump(2) << '\n';
  } else {
    for (const auto& r : reports)
      *sink << (r.passed() ? "PASS " : "FAIL ") << r.property << " (" << r.checks << " checks, " << r.failure_count
            << " failures)\n";
  }
  sink.close();
  return ok ? kExitOk : kExitFailed;
}

/// CSV n,norm of ||S^n x|| along n_k. x comes from --vector (JSON), else e_0.
inline int cmd_orbit(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  SparseVector x;
  if (!cfg.vector_file.empty()) {
    const auto vj = nlohmann::json::parse(detail::read_file(cfg.vector_file), nullptr, false);
    if (vj.is_discarded()) throw Error(ErrorKind::Config, cfg.vector_file + " is not valid JSON");
    x = sparse_vector_from_json(vj);
    if (!vj.contains("space")) x.set_space(SpaceSpec::parse(cfg.space));
  } else {
    x = SparseVector::basis(0, SpaceSpec::parse(cfg.space));
  }
  WeightSequence seq = make_sequence(cfg);
  const ProductEngine engine = make_engine(seq, cfg.horizon, cfg.engine);
  const SubseqSpec nk = make_nk(cfg, cfg.horizon);
  const index_t reach = std::max<index_t>(x.max_index(), 0);
  detail::Sink sink(cfg.out, out);
  *sink << "n,norm\n";
  for (index_t n : nk.up_to(cfg.horizon - reach))
    *sink << n << ',' << format_double(norm(apply_forward(engine, x, n))) << '\n';
  sink.close();
  return kExitOk;
}

/// CSV n,log2_M1n,min_log2_Min_window,argmin for n = 1..horizon - i_max + 1.
inline int cmd_scan(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  WeightSequence seq = make_sequence(cfg);
  const ProductEngine engine = make_engine(seq, cfg.horizon, cfg.engine);
  const ClassifierConfig cc = make_classifier_config(cfg);
  detail::Sink sink(cfg.out, out);
  write_scan_csv(*sink, engine, cc.horizon, cfg.i_max);
  sink.close();
  return kExitOk;
}

/// Builds a blocking vector (--kind uh or sh) and writes the bundle JSON,
/// which `verify --bundle` replays.
inline int cmd_witness(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  WeightSequence seq = make_sequence(cfg);
  const ProductEngine engine = make_engine(seq, cfg.horizon, cfg.engine);
  WitnessBundle b;
  if (cfg.kind == "uh") {
    ClassifierConfig cc = make_classifier_config(cfg);
    b = build_uh_blocker(engine, make_nk(cfg, cc.horizon), cfg.L, cc);
  } else if (cfg.kind == "sh") {
    b = build_sh_blocker(engine, SpaceSpec::parse(cfg.space), cfg.N, cfg.i_max, cfg.bound);
  } else {
    throw Error(ErrorKind::Config, "witness kind must be uh or sh");
  }
  b.source = {{"sequence", sequence_json(cfg)}, {"horizon", cfg.horizon}, {"engine", cfg.engine}};
  detail::Sink sink(cfg.out, out);
  *sink << to_json(b).dump(2) << '\n';
  sink.close();
  return kExitOk;
}

/// INI reader that folds the [sequence] section onto the sequence flags.
/// Sequence keys are only accepted inside [sequence], everything else only at
/// top level; any other section is an error.
class RunConfigFormat : public CLI::ConfigINI {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::vector<CLI::ConfigItem> out;
    for (auto& item : CLI::ConfigINI::from_config(input)) {
      const bool seq_key = is_sequence_key(item.name);
      if (item.parents.empty()) {
        if (seq_key) throw CLI::ConfigError(item.name + " belongs in the [sequence] section");
        out.push_back(std::move(item));
      } else if (item.parents.size() == 1 && item.parents.front() == "sequence") {
        if (item.name == "++" || item.name == "--") continue;
        if (!seq_key) throw CLI::ConfigError("unknown key sequence." + item.name);
        item.parents.clear();
        out.push_back(std::move(item));
      } else {
        throw CLI::ConfigError("unknown section [" + item.parents.front() + "]");
      }
    }
    return out;
  }

 private:
  static bool is_sequence_key(const std::string& k) {
    return k == "family" || k == "values" || k == "values-file" || k == "values_file" || k == "tail";
  }
};

/// Registers every flag on `app`; the sequence flags form the [sequence]
/// section of a --config file.
inline void add_options(CLI::App& app, RunConfig& cfg) {
  app.set_config("--config", "", "key = value config file; the weight family goes in a [sequence] section");
  app.config_formatter(std::make_shared<RunConfigFormat>());
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();
  app.require_subcommand(1, 1);

  auto* seq = app.add_option_group("sequence", "weight sequence");
  seq->add_option("--family", cfg.family, "diamond, block or literal")->capture_default_str();
  seq->add_option("--values", cfg.values, "literal weights, e.g. 2,1/2,0.75")->delimiter(',');
  seq->add_option("--values-file", cfg.values_file, "re-ingest a gen CSV as a literal sequence");
  seq->add_option("--tail", cfg.tail, "literal tail: ones or repeat")->capture_default_str();

  app.add_option("--horizon", cfg.horizon, "number of weights w_1..w_H used")->capture_default_str();
  app.add_option("--imax", cfg.i_max, "window starts i range over 1..imax")->capture_default_str();
  app.add_option("--kmax", cfg.k_max, "subsequence length / suite depth")->capture_default_str();
  app.add_option("--mmax", cfg.m_max, "self-similarity depth (diamond suite)")->capture_default_str();
  app.add_option("--space", cfg.space, "c0, l1, l2, lp:<p>")->capture_default_str();
  app.add_option("--nk", cfg.nk, "block, diamond, diamond-scaled:<m>, full or list:<n1,n2,...>");
  app.add_option("--profile", cfg.profile, "growth profile: inv-sqrt4 or inverse[:a]");
  app.add_option("--engine", cfg.engine, "auto, table or closed-form")->capture_default_str();
  app.add_option("--checks", cfg.checks, "classify: comma list of checks")->capture_default_str();
  app.add_option("--suite", cfg.suite, "verify: comma list of diamond, block, product, lemma");
  app.add_option("--out", cfg.out, "output file (default stdout)");
  app.add_flag("--json", cfg.json, "verify: print the JSON reports");
  app.add_option("--log2-threshold", cfg.log2_threshold, "growth threshold T as log2")->capture_default_str();
  app.add_option("--tail-window", cfg.tail_window, "tail window W (0 = horizon/4)")->capture_default_str();
  app.add_option("--log2-decay-tolerance", cfg.log2_decay_tolerance, "decay tolerance as log2")->capture_default_str();
  app.add_option("--eps-log2", cfg.eps_log2, "strong_sufficient: log2 of each eps")->delimiter(',');
  app.add_option("--nlist", cfg.n_list, "strong_sufficient: the N values")->delimiter(',');
  app.add_option("--vector", cfg.vector_file, "orbit: vector JSON {space, entries}");
  app.add_option("--bundle", cfg.bundle_file, "verify: replay a witness bundle");
  app.add_option("--kind", cfg.kind, "witness: uh or sh")->capture_default_str();
  app.add_option("-L,--pairs", cfg.L, "witness uh: number of pairs")->capture_default_str();
  app.add_option("-N,--terms", cfg.N, "witness sh: number of terms")->capture_default_str();
  app.add_option("--bound", cfg.bound, "witness sh: bound on the partial sum")->capture_default_str();
  app.add_option("--seed", cfg.seed, "verify: RNG seed for sampled suites")->capture_default_str();

  const std::pair<const char*, const char*> commands[] = {
      {"gen", "print the first H weights as CSV"},
      {"classify", "run the finite-horizon checks and print a JSON report"},
      {"verify", "run exact identity suites or replay a witness bundle"},
      {"orbit", "print ||S^n x|| along a subsequence as CSV"},
      {"scan", "print M_1^n and the windowed minimum as CSV"},
      {"witness", "build a blocking vector and print it as a JSON bundle"},
  };
  for (const auto& [name, help] : commands)
    app.add_subcommand(name, help)->callback([&cfg, name = name] { cfg.command = name; });
}

inline int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.command == "gen") return cmd_gen(cfg, out, err);
  if (cfg.command == "classify") return cmd_classify(cfg, out, err);
  if (cfg.command == "verify") return cmd_verify(cfg, out, err);
  if (cfg.command == "orbit") return cmd_orbit(cfg, out, err);
  if (cfg.command == "scan") return cmd_scan(cfg, out, err);
  if (cfg.command == "witness") return cmd_witness(cfg, out, err);
  throw Error(ErrorKind::Config, "unknown command '" + cfg.command + "'");
}

/// Full CLI run on an argument list (without the program name).
inline int run_cli(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Weighted backward shift toolkit", "wshift"};
  RunConfig cfg;
  add_options(app, cfg);
  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    return dispatch(cfg, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace wshift
