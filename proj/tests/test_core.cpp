#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "qsmap/qsmap.hpp"

using namespace qsmap;
using Catch::Approx;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::BadParams;
}

SpacePtr collinear013() { return share(collinear_space({0, 1, 3})); }

}  // namespace

TEST_CASE("build_space accepts valid matrices", "[core]") {
  const auto two = build_space({"a", "b"}, {{0, 1}, {1, 0}});
  CHECK(two.size() == 2);
  CHECK(two.d(0, 1) == 1.0);
  const auto line = build_space({"a", "b", "c"}, {{0, 1, 2}, {1, 0, 1}, {2, 1, 0}});
  CHECK(line.d(0, 2) == 2.0);
  CHECK(line.index_of("c") == std::optional<std::size_t>(2));
}

TEST_CASE("build_space rejects broken axioms", "[core]") {
  CHECK(kind_of([] { build_space({"a", "b"}, {{0, 0}, {0, 0}}); }) == ErrorKind::ZeroOffDiagonal);
  CHECK(kind_of([] { build_space({"a", "b"}, {{0, 1}, {2, 0}}); }) == ErrorKind::NonSymmetric);
  CHECK(kind_of([] { build_space({"a", "b"}, {{0, -1}, {-1, 0}}); }) == ErrorKind::NegativeDistance);
  CHECK(kind_of([] { build_space({"a", "a"}, {{0, 1}, {1, 0}}); }) == ErrorKind::DuplicateLabel);
  CHECK(kind_of([] { build_space({"a", "b"}, {{0, 1}}); }) == ErrorKind::ShapeMismatch);
}

TEST_CASE("asymmetry within tolerance is averaged", "[core]") {
  const auto s = build_space({"a", "b"}, {{0, 1.0}, {1.0 + 1e-12, 0}}, 1e-9);
  CHECK(s.d(0, 1) == s.d(1, 0));
}

TEST_CASE("spectrum", "[core]") {
  CHECK(spectrum(*collinear013()).values == std::vector<double>{0, 1, 2, 3});
  CHECK(spectrum(build_space({"a"}, {{0}})).values == std::vector<double>{0});
  const auto sq = spectrum(euclidean_space(1, 2, 0));
  CHECK(sq.values.size() == 1);
  const auto unit = build_space(default_labels(4), {{0, 1, std::sqrt(2.0), 1},
                                                    {1, 0, 1, std::sqrt(2.0)},
                                                    {std::sqrt(2.0), 1, 0, 1},
                                                    {1, std::sqrt(2.0), 1, 0}});
  CHECK(spectrum(unit).values == std::vector<double>{0, 1, std::sqrt(2.0)});
}

TEST_CASE("diameter", "[core]") {
  const auto s = collinear013();
  CHECK(diameter(make_subset(s, {1})) == 0.0);
  CHECK(diameter(whole(s)) == 3.0);
  CHECK(diameter(pseudolinear_space(1, 2)) == 3.0);
  CHECK(kind_of([&] { make_subset(s, {}); }) == ErrorKind::BadSubset);
  CHECK(kind_of([&] { make_subset(s, {0, 0}); }) == ErrorKind::BadSubset);
  CHECK(kind_of([&] { make_subset(s, {7}); }) == ErrorKind::BadSubset);
}

TEST_CASE("transform_distances", "[core]") {
  const auto s = collinear013();
  const auto snow = transform_distances(*s, power_scaler(0.5));
  CHECK(snow.d(0, 1) == Approx(1.0));
  CHECK(snow.d(1, 2) == Approx(std::sqrt(2.0)));
  CHECK(snow.d(0, 2) == Approx(std::sqrt(3.0)));
  CHECK(transform_distances(*s, ScalarGauge{"id", [](double u) { return u; }}) == *s);
  const auto e = transform_distances(collinear_space({0, 1, 2}), expm1_scaler());
  const auto sp = spectrum(e).values;
  REQUIRE(sp.size() == 3);
  CHECK(sp[0] == 0.0);
  CHECK(sp[1] == Approx(std::expm1(1.0)).epsilon(1e-15));
  CHECK(sp[2] == Approx(std::expm1(2.0)).epsilon(1e-15));
  CHECK(kind_of([&] { transform_distances(*s, ScalarGauge{"c", [](double u) { return u + 1; }}); }) ==
        ErrorKind::ScalerOriginNonzero);
  CHECK(kind_of([&] { transform_distances(*s, ScalarGauge{"dip", [](double u) { return u * (4 - u); }}); }) ==
        ErrorKind::ScalerNotMonotone);
}

TEST_CASE("generators", "[core]") {
  const auto p = pseudolinear_space(1, 2);
  CHECK(p.d(0, 1) == 2.0);
  CHECK(p.d(2, 3) == 2.0);
  CHECK(p.d(1, 2) == 1.0);
  CHECK(p.d(3, 0) == 1.0);
  CHECK(p.d(0, 2) == 3.0);
  CHECK(p.d(1, 3) == 3.0);

  const auto w = wilson_space(2);
  REQUIRE(w.size() == 4);
  const auto at = [&](const char* a, const char* b) { return w.d(*w.index_of(a), *w.index_of(b)); };
  CHECK(at("-1", "1") == Approx(1.0));
  CHECK(at("-1", "1/2") == Approx(0.5));
  CHECK(at("0", "1") == Approx(1.0));

  CHECK(check_triangle(ultrametric_space(5, 7), TriangleFunction::max_gauge()).holds);

  CHECK(kind_of([] { pseudolinear_space(0, 1); }) == ErrorKind::BadParams);
  CHECK(kind_of([] { pseudolinear_space(1, -1); }) == ErrorKind::BadParams);
  CHECK(kind_of([] { euclidean_space(0, 2, 1); }) == ErrorKind::BadParams);
  CHECK(kind_of([] { euclidean_space(3, 0, 1); }) == ErrorKind::BadParams);
}

TEST_CASE("build_map", "[core]") {
  const auto s = collinear013();
  CHECK(build_map(s, s, {{"p0", "p0"}, {"p1", "p1"}, {"p2", "p2"}}, true).is_bijective());
  const auto one = share(build_space({"x"}, {{0}}));
  CHECK(kind_of([&] { build_map(s, one, {{"p0", "x"}, {"p1", "x"}, {"p2", "x"}}, true); }) ==
        ErrorKind::NotBijective);
  const auto dom = share(build_space({"a", "b"}, {{0, 1}, {1, 0}}));
  const auto cod = share(build_space({"x", "y", "z"}, {{0, 1, 2}, {1, 0, 1}, {2, 1, 0}}));
  const auto f = build_map(dom, cod, {{"a", "x"}, {"b", "z"}});
  CHECK_FALSE(f.is_bijective());
  CHECK(f.image_d(0, 1) == 2.0);
  CHECK(kind_of([&] { build_map(dom, cod, {{"a", "x"}}); }) == ErrorKind::UnassignedPoint);
  CHECK(kind_of([&] { build_map(dom, cod, {{"a", "x"}, {"b", "w"}}); }) == ErrorKind::UnknownTarget);
  CHECK(kind_of([&] { build_map(dom, cod, {{"a", "x"}, {"b", "y"}, {"a", "z"}}); }) ==
        ErrorKind::DuplicateAssignment);
}

TEST_CASE("properties: scaler invariance, determinism, spectrum transport, diameter monotone", "[core][property]") {
  Rng rng(11);
  const std::vector<ScalarGauge> scalers{power_scaler(0.3), power_scaler(2.0), scale_scaler(5.0), expm1_scaler(),
                                         ScalarGauge{"log1p", [](double u) { return std::log1p(u); }}};
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(8));
    const std::uint64_t seed = rng.below(1'000'000);
    const auto kind = static_cast<GeneratorKind>(rng.below(3));
    GeneratorParams p;
    p.n = n;
    p.dim = 1 + static_cast<int>(rng.below(3));
    const auto S = generate(kind, p, seed);
    CHECK(generate(kind, p, seed) == S);

    for (const auto& g : scalers) {
      const auto T = transform_distances(S, g);
      CHECK_NOTHROW(build_space_flat(T.labels(), std::vector<double>(T.matrix().begin(), T.matrix().end())));
      const auto a = spectrum(S).values;
      const auto b = spectrum(T).values;
      REQUIRE(a.size() == b.size());
      for (std::size_t k = 0; k < a.size(); ++k) CHECK(b[k] == g(a[k]));
    }

    const auto ptr = share(S);
    const auto B = oracle::random_subset(rng, S.size(), 1);
    std::vector<std::size_t> A(B.begin(), B.begin() + 1 + static_cast<std::ptrdiff_t>(rng.below(B.size())));
    CHECK(diameter(make_subset(ptr, A)) <= diameter(make_subset(ptr, B)));
  }
}
