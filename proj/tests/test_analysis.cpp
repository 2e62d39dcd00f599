#include <catch_amalgamated.hpp>

#include <random>

#include "oracle.hpp"
#include "wshift/analysis.hpp"

using namespace wshift;

namespace {

ProductEngine table(WeightSequence seq, index_t h) { return ProductEngine::tabulate(seq, h); }
ProductEngine constant(const char* w, index_t h) { return table(gen_literal({Rational::parse(w)}, Tail::PeriodicRepeat), h); }

ClassifierConfig cfg_of(index_t horizon, index_t i_max, double log2_t = 4.0) {
  ClassifierConfig c;
  c.horizon = horizon;
  c.i_max = i_max;
  c.log2_threshold = log2_t;
  return c;
}

const Witness* find(const Report& r, const std::string& label) {
  for (const auto& w : r.witnesses)
    if (w.label == label) return &w;
  return nullptr;
}

}  // namespace

TEST_CASE("hypercyclic: block up to s_39 via the closed form") {
  auto b = gen_block(1);
  const index_t s39 = block_plans().back().cumulative;
  const auto e = ProductEngine::closed_form(b, s39);
  const auto nk = block_nk_sequence(19);
  const auto r = check_hypercyclic(e, cfg_of(s39, 1, 15), nk.values);
  CHECK(r.verdict == Verdict::EvidenceFor);
  CHECK(e.prefix(s39) == Log2Value::exact(20));
  const auto* w = find(r, "max_M_1^n");
  REQUIRE(w);
  CHECK(w->log2 == Log2Value::exact(20));
  CHECK_THROWS_AS(block_nk_sequence(20), Error);  // s_41 is not representable
  CHECK(r.notes.size() == 1);
}

TEST_CASE("hypercyclic: constant 1 and diamond") {
  const auto one = constant("1", 1000);
  CHECK(check_hypercyclic(one, cfg_of(1000, 1)).verdict == Verdict::EvidenceAgainst);

  const index_t a12 = ak_sequence(12).values.back();
  const auto d = table(gen_diamond(1), a12);
  const auto r = check_hypercyclic(d, cfg_of(a12, 1, 10));
  CHECK(r.verdict == Verdict::EvidenceFor);
  CHECK(d.prefix(ak_sequence(11).values.back()) == Log2Value::exact(11));
  const auto* first = find(r, "first_crossing_M_1^n");
  REQUIRE(first);
  CHECK(first->indices[1] == 349525);  // a_10 already reaches 2^10
}

TEST_CASE("hypercyclic with a partial dense scan is never against") {
  const auto one = constant("1", 1000);
  auto c = cfg_of(1000, 1);
  c.dense_scan_limit = 10;
  CHECK(check_hypercyclic(one, c).verdict == Verdict::Inconclusive);
}

TEST_CASE("mixing") {
  const auto b = table(gen_block(1), 20000);
  auto c = cfg_of(20000, 1);
  const auto rb = check_mixing(b, c);
  CHECK(rb.verdict == Verdict::EvidenceAgainst);
  const auto* unit = find(rb, "tail_M_1^n_at_most_1");
  REQUIRE(unit);
  CHECK(unit->indices[1] == 18731);
  CHECK(b.prefix(18731) == Log2Value::one());

  const auto d = table(gen_diamond(1), 100000);
  CHECK(check_mixing(d, cfg_of(100000, 1)).verdict == Verdict::EvidenceAgainst);
  const auto two = constant("2", 1000);
  CHECK(check_mixing(two, cfg_of(1000, 1)).verdict == Verdict::EvidenceFor);
}

TEST_CASE("ultra: block along s_{2k+1} up to k = 10") {
  auto b = gen_block(1);
  const auto nk = block_nk_sequence(10);
  const index_t H = nk.values.back() + 10000;
  const auto e = ProductEngine::closed_form(b, H);
  const auto r = check_ultra_conditions(e, nk, cfg_of(nk.values.back(), 10000));
  CHECK(r.verdict == Verdict::EvidenceFor);
  const auto* floor = find(r, "inf_{i,k} M_i^{n_k}");
  REQUIRE(floor);
  CHECK(floor->log2 >= Log2Value::exact(-1));
  CHECK(r.config["nk_used"].size() == 10);
  CHECK(find(r, "min_weight")->log2 == Log2Value::exact(-1));
}

TEST_CASE("ultra: diamond fails along every growth subsequence") {
  const auto d = table(gen_diamond(1), 1 << 20);
  std::vector<SubseqSpec> subs = {ak_sequence(8), diamond_scaled_sequence(1, 8), diamond_scaled_sequence(2, 7),
                                  SubseqSpec::explicit_values({3, 21, 100, 341, 5000, 21845})};
  for (const auto& nk : subs) {
    const auto r = check_ultra_conditions(d, nk, cfg_of(nk.values.back(), 64));
    CHECK(r.verdict == Verdict::EvidenceAgainst);
    const auto* w = find(r, "reflection M_{n+1}^n (M_1^n)^2 = 1");
    REQUIRE(w);
    const index_t n = w->indices[1];
    CHECK(d.product(n + 1, n) + d.prefix(n).pow(std::int64_t{2}) == Log2Value::one());
    CHECK(d.prefix(n).log2() > 0);
  }
}

TEST_CASE("ultra: constant 2 with every n") {
  const auto two = constant("2", 400);
  const auto r = check_ultra_conditions(two, SubseqSpec::full(200), cfg_of(200, 100));
  CHECK(r.verdict == Verdict::EvidenceFor);
  CHECK(find(r, "inf_{i,k} M_i^{n_k}")->log2 == Log2Value::exact(1));
}

TEST_CASE("monotone refinement: against never turns into for") {
  const auto d = table(gen_diamond(1), 1 << 19);
  const auto b = table(gen_block(1), 1 << 19);
  for (index_t H : {4096, 16384, 65536, 200000}) {
    for (index_t i_max : {16, 256, 4096}) {
      const auto c = cfg_of(H, i_max);
      REQUIRE(check_ultra_conditions(d, ak_sequence(9), c).verdict == Verdict::EvidenceAgainst);
      REQUIRE(check_mixing(d, c).verdict == Verdict::EvidenceAgainst);
    }
  }
  // the block tail only dips below the threshold when it holds a unit return
  for (index_t H : {18731, 20000, 24000}) {
    for (index_t i_max : {16, 256}) REQUIRE(check_mixing(b, cfg_of(H, i_max)).verdict == Verdict::EvidenceAgainst);
  }
}

TEST_CASE("strong necessary: diamond in l^1 grows linearly") {
  const auto d = table(gen_diamond(1), 40000);
  for (index_t H : {4096, 8192, 16384, 32768}) {
    const auto r = check_strong_necessary(d, SpaceSpec::lp(1.0), cfg_of(H, 1000));
    CHECK(r.config["partial_sum"].get<double>() >= 0.05 * static_cast<double>(H));
    CHECK(r.verdict != Verdict::EvidenceAgainst);
  }
  const auto r = check_strong_necessary(d, SpaceSpec::lp(1.0), cfg_of(32768, 1000));
  CHECK(r.verdict == Verdict::EvidenceFor);
}

TEST_CASE("strong necessary: quarter weights are summable, constant 2 is not") {
  const auto q = constant("1/4", 2000);
  const auto rq = check_strong_necessary(q, SpaceSpec::lp(1.0), cfg_of(1000, 100));
  CHECK(rq.verdict == Verdict::EvidenceAgainst);
  CHECK(rq.config["partial_sum"].get<double>() == Catch::Approx(1.0 / 3.0));
  CHECK(check_strong_necessary(q, SpaceSpec::c0(), cfg_of(1000, 100)).verdict == Verdict::EvidenceAgainst);

  const auto two = constant("2", 2000);
  CHECK(check_strong_necessary(two, SpaceSpec::lp(2.0), cfg_of(1000, 100)).verdict == Verdict::EvidenceFor);
  CHECK(check_strong_necessary(two, SpaceSpec::c0(), cfg_of(1000, 100)).verdict == Verdict::EvidenceFor);
}

TEST_CASE("necessary corollary along increasing i_n") {
  const auto d = table(gen_diamond(1), 5000);
  std::vector<index_t> i_seq;
  for (index_t n = 1; n <= 1000; ++n) i_seq.push_back(n + 3);
  const auto r = verify_necessary_corollary(d, SpaceSpec::lp(2.0), i_seq, 64);
  CHECK(r.passed());
  CHECK(r.checks == 1001);
  CHECK_THROWS_AS(verify_necessary_corollary(d, SpaceSpec::lp(2.0), std::vector<index_t>{3, 3}, 8), Error);
}

TEST_CASE("strong sufficient: diamond with the explicit n = 4^m a_k") {
  const auto d = table(gen_diamond(1), 200000);
  const double eps[] = {std::ldexp(1.0, -8)};
  const index_t Ns[] = {16};
  std::vector<SufficiencyHit> hits;
  const auto r = check_strong_sufficient(d, GrowthProfile::inv_sqrt4(), eps, Ns, cfg_of(100000, 10000), &hits);
  CHECK(r.verdict == Verdict::EvidenceFor);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].n == 336);
  CHECK(hits[0].method == "constructive");
  CHECK(hits[0].min_head == Log2Value::exact(3));
  CHECK(hits[0].min_all >= Log2Value::exact(-6));
  const auto c = constructive_choice(GrowthProfile::inv_sqrt4()(std::ldexp(1.0, -8)), 16);
  CHECK(c.k == 3);
  CHECK(c.m == 2);
}

TEST_CASE("strong sufficient: exploratory block run, and constant 1 fails") {
  const auto b = table(gen_block(1), 30000);
  const double eps[] = {1.0 / 16, 1.0 / 64};
  const index_t Ns[] = {1, 4};
  std::vector<SufficiencyHit> hits;
  const auto r = check_strong_sufficient(b, GrowthProfile::inverse(), eps, Ns, cfg_of(20000, 500), &hits);
  for (const auto& h : hits) {
    if (h.n == 0) continue;
    for (index_t i = 1; i <= h.N; ++i) REQUIRE(b.product(i, h.n).value() > 1.0 / h.eps);
    for (index_t i = 1; i <= 500; ++i) REQUIRE(b.product(i, h.n).value() > h.eps);
  }
  CHECK(r.config["pairs"].size() == 4);

  const auto one = constant("1", 3000);
  const double e1[] = {0.5};
  const index_t n1[] = {4};
  CHECK(check_strong_sufficient(one, GrowthProfile::inverse(1.0), e1, n1, cfg_of(1000, 100)).verdict ==
        Verdict::EvidenceAgainst);
}

TEST_CASE("growth profiles") {
  const auto f = GrowthProfile::inv_sqrt4();
  CHECK(f(1.0 / 16) == 1.0);
  CHECK_THROWS_AS(f(0.3), Error);
  const auto t = GrowthProfile::from_table(0.5, {{0.1, 10.0}, {0.2, 4.0}, {0.4, 2.0}});
  CHECK(t(0.15) == Catch::Approx(7.0));
  CHECK(t(0.2) == 4.0);
  CHECK_THROWS_AS(GrowthProfile::from_table(0.5, {{0.1, 1.0}, {0.2, 4.0}}), Error);
}

TEST_CASE("diamond identity suite") {
  const auto d = table(gen_diamond(1), 400000);
  const auto r = verify_diamond_identities(d);
  CHECK(r.passed());
  CHECK(r.exact);
  CHECK(r.checks > 1000000);
  // (6) at i = 1, k = 2 and the reflection at n = 1
  CHECK(d.product(1, 4) == -d.product(1, 2));
  CHECK(d.product(1, 4) == Log2Value::exact(1));
  CHECK(d.product(2, 1) == -d.prefix(1).pow(std::int64_t{2}));

  // growth exactly 2^k for k = 1..10, against the oracle
  const auto w = oracle::diamond_log2(349525, 0);
  const auto ak = ak_sequence(10).values;
  for (int k = 1; k <= 10; ++k) CHECK(oracle::product_log2(w, 1, ak[static_cast<std::size_t>(k - 1)]) == k);

  const auto b = table(gen_block(1), 400000);
  CHECK_FALSE(verify_diamond_identities(b).passed());
  const auto small = table(gen_diamond(1), 1000);
  CHECK_THROWS_AS(verify_diamond_identities(small), Error);
}

TEST_CASE("block facts") {
  const auto b = table(gen_block(1), 18738 + 10000);
  const auto r = verify_block_facts(b, 6, 10000);
  CHECK(r.passed());
  CHECK(b.prefix(5) == Log2Value::exact(2));
  CHECK(b.prefix(3) == Log2Value::one());
  CHECK(r.config["half_attained"].get<bool>());

  auto seq = gen_block(1);
  const auto cf = ProductEngine::closed_form(seq, block_nk_sequence(8).values.back() + 10000);
  CHECK(verify_block_facts(cf, 8, 10000).passed());
  CHECK_THROWS_AS(verify_block_facts(b, 8, 10000), Error);
}

TEST_CASE("lemma comparability") {
  const auto d = table(gen_diamond(1), 100);
  CHECK(d.max_weight() - d.min_weight() == Log2Value::exact(3));
  const LemmaSample one[] = {{1, 2, 4}};
  CHECK(verify_lemma_comparability(d, one).passed());
  CHECK(d.product(2, 4) <= Log2Value::exact(3) + d.product(1, 4));

  std::mt19937_64 rng(2);
  const auto b = table(gen_block(1), 50000);
  std::vector<LemmaSample> samples;
  std::uniform_int_distribution<index_t> g(1, 300), st(1, 40000);
  for (int t = 0; t < 500; ++t) {
    const index_t i = st(rng), j = i + g(rng);
    samples.push_back({i, j, g(rng)});
  }
  const auto rb = verify_lemma_comparability(b, samples);
  CHECK(rb.checks == 1000);
  CHECK(rb.failure_count == 0);

  const auto c = constant("3", 100);
  CHECK(c.product(4, 7).log2() == Catch::Approx(c.product(9, 7).log2()).epsilon(1e-12));
  CHECK(verify_lemma_comparability(c, one).passed());
}
