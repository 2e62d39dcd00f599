#include <catch_amalgamated.hpp>

#include <random>

#include "wshift/products.hpp"
#include "wshift/shifts.hpp"

using namespace wshift;

namespace {

ProductEngine engine_of(WeightSequence seq, index_t h) { return ProductEngine::tabulate(seq, h); }

SparseVector random_sparse(std::mt19937_64& rng, index_t max_index, int support, SpaceSpec space) {
  std::uniform_int_distribution<index_t> idx(0, max_index);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  SparseVector x(space);
  for (int k = 0; k < support; ++k) x.set(idx(rng), val(rng));
  return x;
}

const SpaceSpec kSpaces[] = {SpaceSpec::lp(1.0), SpaceSpec::lp(2.0), SpaceSpec::c0()};

}  // namespace

TEST_CASE("norms") {
  for (const auto& s : kSpaces) CHECK(norm(SparseVector::basis(0, s)) == 1.0);
  SparseVector x(SpaceSpec::lp(2.0));
  x.set(0, 3.0);
  x.set(1, 4.0);
  CHECK(norm(x) == Catch::Approx(5.0));
  CHECK(norm(x, SpaceSpec::c0()) == 4.0);
  CHECK(norm(x, SpaceSpec::lp(1.0)) == 7.0);
  CHECK(norm(SparseVector{}) == 0.0);

  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    for (const auto& s : kSpaces) {
      const auto v = random_sparse(rng, 50, 6, s);
      const double c = std::uniform_real_distribution<double>(-10, 10)(rng);
      REQUIRE(norm(v.scaled(c)) == Catch::Approx(std::abs(c) * norm(v)).epsilon(1e-12));
    }
  }
}

TEST_CASE("space parsing") {
  CHECK(SpaceSpec::parse("c0").is_c0());
  CHECK(SpaceSpec::parse("l2").p == 2.0);
  CHECK(SpaceSpec::parse("lp:3").p == 3.0);
  CHECK(SpaceSpec::parse("l1.5").name() == "l1.5");
  CHECK_THROWS_AS(SpaceSpec::parse("l0.5"), Error);
  CHECK_THROWS_AS(SpaceSpec::parse("x"), Error);
}

TEST_CASE("sparse vectors keep no zeros") {
  SparseVector x;
  x.set(4, 1.0);
  x.set(4, 0.0);
  CHECK(x.empty());
  CHECK_THROWS_AS(x.set(-1, 1.0), Error);
  x.set(0, 2.0);
  x.set(7, 3.0);
  CHECK(x.restricted_below(5).support_size() == 1);
  CHECK((x - x).empty());
}

TEST_CASE("backward shift") {
  const auto d = engine_of(gen_diamond(1), 1000);
  CHECK(apply_backward(d, SparseVector::basis(0), 1).empty());
  const auto y = apply_backward(d, SparseVector::basis(1), 1);
  CHECK(y.support_size() == 1);
  CHECK(y.at(0) == 2.0);
}

TEST_CASE("forward shift coordinates") {
  const auto d = engine_of(gen_diamond(1), 1000);
  const auto s5 = apply_forward(d, SparseVector::basis(0), 5);
  CHECK(s5.support_size() == 1);
  CHECK(s5.at(5) == 0.25);
  for (index_t j = 0; j < 50; ++j) {
    const auto s = apply_forward(d, SparseVector::basis(j), 1);
    CHECK(s.at(j + 1) == 1.0 / d.weight(j + 1).value());
  }
}

TEST_CASE("block orbit of e_0 along n_k") {
  auto b = gen_block(1);
  const auto e = ProductEngine::closed_form(b, 2000000);
  const auto nk = block_nk_sequence(8);
  for (const auto& s : kSpaces) {
    const auto pts = orbit_norms(e, SparseVector::basis(0, s), nk);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      REQUIRE(pts[k].norm == std::ldexp(1.0, -static_cast<int>(k + 2)));
      if (k > 0) REQUIRE(pts[k].norm < pts[k - 1].norm);
    }
  }
}

TEST_CASE("diamond orbit of e_5 along a_k does not decay") {
  const auto d = engine_of(gen_diamond(1), 100000);
  const auto pts = orbit_norms(d, SparseVector::basis(5), ak_sequence(6));
  CHECK(pts[1].n == 5);
  CHECK(pts[1].norm >= 16.0);
  CHECK(apply_forward(d, SparseVector::basis(5), 5).at(10) == 16.0);
  for (const auto& p : orbit_norms(d, SparseVector{}, ak_sequence(6))) CHECK(p.norm == 0.0);
}

TEST_CASE("B^n S^n is the identity, exactly") {
  std::mt19937_64 rng(99);
  const auto d = engine_of(gen_diamond(1), 5000);
  const auto b = engine_of(gen_block(1), 5000);
  std::uniform_int_distribution<index_t> pn(0, 100);
  for (int t = 0; t < 1000; ++t) {
    const auto x = random_sparse(rng, 200, 5, SpaceSpec::lp(2.0));
    const index_t n = pn(rng);
    REQUIRE(apply_backward(d, apply_forward(d, x, n), n) == x);
    REQUIRE(apply_backward(b, apply_forward(b, x, n), n) == x);
  }
}

TEST_CASE("S^n coordinates bounded by the window minimum") {
  std::mt19937_64 rng(13);
  const auto d = engine_of(gen_diamond(1), 20000);
  for (int t = 0; t < 200; ++t) {
    for (const auto& s : kSpaces) {
      const auto x = random_sparse(rng, 60, 4, s);
      const index_t n = std::uniform_int_distribution<index_t>(1, 2000)(rng);
      const auto r = min_product_over_i(d, n, 61).min.value();
      REQUIRE(norm(apply_forward(d, x, n)) <= norm(x) / r * (1 + 1e-12));
    }
  }
}

TEST_CASE("vector JSON round-trip") {
  SparseVector x(SpaceSpec::c0());
  x.set(0, 0.5);
  x.set(9, -2.0);
  const auto j = to_json(x);
  CHECK(j["space"] == "c0");
  const auto y = sparse_vector_from_json(j);
  CHECK(y == x);
  CHECK(y.space().is_c0());
  nlohmann::json dup = {{"entries", {{1, 1.0}, {1, 2.0}}}};
  CHECK_THROWS_AS(sparse_vector_from_json(dup), Error);
}
