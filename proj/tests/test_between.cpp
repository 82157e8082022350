#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qsmap/qsmap.hpp"

using namespace qsmap;
using Catch::Approx;

namespace {

SemimetricSpace equilateral() { return build_space(default_labels(3), {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}); }

SemimetricSpace unit_square() {
  const double r2 = std::sqrt(2.0);
  return build_space(default_labels(4), {{0, 1, r2, 1}, {1, 0, 1, r2}, {r2, 1, 0, 1}, {1, r2, 1, 0}});
}

bool every_triple_embeds(const SemimetricSpace& S) {
  for (std::size_t skip = 0; skip < S.size(); ++skip) {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < S.size(); ++k)
      if (k != skip) idx.push_back(k);
    if (!line_embed(subspace(S, idx))) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("betweenness_triples", "[between]") {
  const auto t = betweenness_triples(collinear_space({0, 1, 3}));
  REQUIRE(t.size() == 1);
  CHECK(t[0].x == 0);
  CHECK(t[0].y == 1);
  CHECK(t[0].z == 2);
  CHECK(betweenness_triples(equilateral()).empty());
  CHECK(betweenness_triples(pseudolinear_space(1, 2)).size() == 4);
}

TEST_CASE("preserves_betweenness", "[between]") {
  const auto X = share(collinear_space({0, 1, 2, 5}));
  CHECK(preserves_betweenness(index_map(X, share(transform_distances(*X, scale_scaler(2.5))))).holds);
  CHECK(preserves_betweenness(index_map(X, X)).holds);
  const auto L = share(collinear_space({0, 1, 2}));
  const auto snow = preserves_betweenness(oracle::snowflake_map(L, 0.5));
  CHECK_FALSE(snow.holds);
  REQUIRE(snow.violations.size() == 1);
  CHECK(snow.violations[0].image_lhs == Approx(std::sqrt(2.0)));
  CHECK(snow.violations[0].image_rhs == Approx(2.0));
}

TEST_CASE("check_l02_conditions", "[between]") {
  const auto samples = partition_samples(512);
  const auto id = check_l02_conditions(Modulus::power(1.0), samples);
  CHECK(id.sufficiency_holds);
  CHECK(id.max_forward_error == 0.0);
  CHECK(id.necessity_holds);

  const auto half = check_l02_conditions(Modulus::power(0.5), {0.5});
  CHECK_FALSE(half.sufficiency_holds);
  CHECK_FALSE(half.necessity_holds);
  REQUIRE(half.necessity_violations.size() == 1);
  CHECK(half.necessity_violations[0].inverse == Approx(std::sqrt(2.0)).epsilon(1e-15));

  const auto k8 = check_l02_conditions(eta_from_generators(power_generator(3), power_generator(3)), samples, 1e-12);
  CHECK(k8.sufficiency_holds);
  CHECK_THROWS_AS(check_l02_conditions(Modulus::power(1.0), {1.0}), Error);
}

TEST_CASE("eta_from_generators", "[between]") {
  for (int n : {1, 2}) {
    const auto eta = eta_from_generators(power_generator(n), power_generator(n));
    for (double t : {0.0, 0.1, 0.5, 0.9, 1.0, 1.7, 10.0, 1e4}) CHECK(eta(t) == Approx(t).epsilon(1e-12).margin(1e-15));
  }
  const auto cubic = eta_from_generators(power_generator(3), power_generator(3));
  CHECK(cubic(0.25) == Approx(19.0 / 64.0).epsilon(1e-15));
  CHECK(cubic(0.75) == Approx(45.0 / 64.0).epsilon(1e-15));
  CHECK(cubic(0.25) + cubic(0.75) == Approx(1.0).epsilon(1e-15));

  const ScalarGauge off{"x/2+0.1", [](double x) { return x / 2 + 0.1; }};
  try {
    eta_from_generators(off, power_generator(1));
    FAIL("expected GeneratorEndpointViolation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::GeneratorEndpointViolation);
  }
  try {
    const ScalarGauge dip{"dip", [](double x) { return 0.5 * x + 0.3 * std::sin(3.0 * std::numbers::pi * x); }};
    eta_from_generators(dip, power_generator(1));
    FAIL("expected GeneratorNotIncreasing");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::GeneratorNotIncreasing);
  }
}

TEST_CASE("detect_pseudolinear", "[between]") {
  const auto q = detect_pseudolinear(pseudolinear_space(1, 2));
  REQUIRE(q);
  CHECK(std::min(q.s, q.t) == 1.0);
  CHECK(std::max(q.s, q.t) == 2.0);
  CHECK_FALSE(detect_pseudolinear(unit_square()));
  CHECK_FALSE(detect_pseudolinear(collinear_space({0, 1, 2, 3})));
  CHECK_THROWS_AS(detect_pseudolinear(collinear_space({0, 1, 2})), Error);
}

TEST_CASE("line_embed", "[between]") {
  const auto c = line_embed(collinear_space({0, 1, 3}));
  REQUIRE(c);
  const bool forward = (*c)[1] == Approx(1.0);
  CHECK(((*c)[0] == Approx(0.0).margin(1e-15)));
  CHECK((*c)[1] == Approx(forward ? 1.0 : -1.0));
  CHECK((*c)[2] == Approx(forward ? 3.0 : -3.0));
  CHECK(std::abs((*c)[2] - (*c)[1]) == Approx(2.0));

  const auto P = pseudolinear_space(1, 2);
  CHECK_FALSE(line_embed(P));
  CHECK(every_triple_embeds(P));
  CHECK_FALSE(line_embed(equilateral()));
}

TEST_CASE("betweenness_image_structure", "[between]") {
  const auto L = share(collinear_space({0, 1, 4, 6}));
  const auto sim = index_map(L, share(transform_distances(*L, scale_scaler(3.0))));
  const auto r = betweenness_image_structure(sim, whole(L));
  CHECK(r.holds);
  CHECK(r.domain_line);
  CHECK(r.image_line == std::optional<bool>(true));

  const auto P = share(pseudolinear_space(1, 2));
  const auto ps = betweenness_image_structure(index_map(P, share(transform_distances(*P, scale_scaler(2.0)))), whole(P));
  CHECK(ps.holds);
  REQUIRE(ps.image_quadruple);
  CHECK(std::min(ps.image_quadruple.s, ps.image_quadruple.t) == Approx(2.0));
  CHECK(std::max(ps.image_quadruple.s, ps.image_quadruple.t) == Approx(4.0));

  // Rotating pseudolinear(1,1) one step around its cycle preserves every distance.
  const auto P1 = share(pseudolinear_space(1, 1));
  const PointMap rot(P1, P1, {1, 2, 3, 0}, true);
  const auto rr = betweenness_image_structure(rot, whole(P1));
  CHECK(rr.holds);
  CHECK(static_cast<bool>(rr.image_quadruple));

  CHECK_THROWS_AS(betweenness_image_structure(oracle::snowflake_map(L, 0.5), whole(L)), Error);
}

TEST_CASE("property: k8 moduli satisfy the betweenness equalities", "[between][property]") {
  const auto samples = partition_samples(512);
  for (int n : {1, 2, 3, 5})
    for (int m : {1, 2, 3, 5}) {
      const auto r = check_l02_conditions(eta_from_generators(power_generator(n), power_generator(m)), samples);
      CHECK(r.max_forward_error <= 1e-10);
      CHECK(r.max_inverse_error <= 1e-10);
    }
}

TEST_CASE("property: line embeddings order betweenness", "[between][property]") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> xs;
    const std::size_t n = 3 + rng.below(6);
    while (xs.size() < n) {
      const double x = std::round(rng.uniform(-50.0, 50.0) * 8.0) / 8.0;
      if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
    }
    const auto S = collinear_space(xs);
    const auto c = line_embed(S);
    REQUIRE(c);
    const auto triples = betweenness_triples(S);
    CHECK_FALSE(triples.empty());
    std::size_t expected = 0;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t z = x + 1; z < n; ++z)
        for (std::size_t y = 0; y < n; ++y) {
          if (y == x || y == z) continue;
          if (std::min((*c)[x], (*c)[z]) < (*c)[y] && (*c)[y] < std::max((*c)[x], (*c)[z])) ++expected;
        }
    CHECK(triples.size() == expected);
  }
}

TEST_CASE("property: Menger dichotomy at four points", "[between][property]") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const double s = rng.uniform(0.1, 10.0), t = rng.uniform(0.1, 10.0);
    const auto P = pseudolinear_space(s, t);
    CHECK(detect_pseudolinear(P));
    CHECK(oracle::pseudolinear(P, 1e-9));
    CHECK_FALSE(line_embed(P));
    CHECK(every_triple_embeds(P));

    const auto E = euclidean_space(4, 2, rng.below(1u << 20));
    CHECK_FALSE(detect_pseudolinear(E));
    for (const auto& S : {P, E}) {
      if (every_triple_embeds(S) && !line_embed(S)) CHECK(detect_pseudolinear(S));
    }
  }
}
