#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "qsmap/qsmap.hpp"
#include "qsmap_cli.hpp"

using namespace qsmap;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "qsmap");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("qsmap_cli_" + std::to_string(Catch::rngSeed()) + "_" +
                                                  std::to_string(counter_++))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

}  // namespace

TEST_CASE("space files round-trip bitwise", "[cli][io]") {
  TempDir dir;
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto S = transform_distances(euclidean_space(2 + static_cast<int>(rng.below(7)), 3, rng.below(1u << 20)),
                                       power_scaler(rng.uniform(0.1, 1.0)));
    for (const char* name : {"s.json", "s.csv"}) {
      save_space(S, dir / name);
      const auto back = load_space(dir / name);
      CHECK(back == S);
    }
  }
}

TEST_CASE("space parsing errors", "[cli][io]") {
  try {
    parse_space_json("{\"labels\": [\"a\", \"b\"],\n \"matrix\": [[0, 1], [1, 0]");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
  try {
    parse_space_csv(",a,b\na,0,1\nc,1,0\n");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
  }
  try {
    parse_space_json(R"({"points": ["a", "b"], "matrix": [[0, 1], [2, 0]]})");
    FAIL("expected NonSymmetric");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonSymmetric);
  }
  const auto ok = parse_space_json(R"({"points": ["a", "b", "c"], "matrix": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]})");
  CHECK(ok.size() == 3);
}

TEST_CASE("spec grammars", "[cli][io]") {
  CHECK(parse_eta_spec("power:0.5")(4.0) == 2.0);
  CHECK(parse_eta_spec("linear:3")(2.0) == 6.0);
  CHECK(parse_eta_spec("bilip:2")(1.0) == 4.0);
  CHECK(parse_eta_spec("expratio").kind() == Modulus::Kind::ExpRatio);
  CHECK(parse_eta_spec("k8:3,3")(0.25) == Catch::Approx(19.0 / 64.0));
  CHECK_THROWS_AS(parse_eta_spec("power"), Error);
  CHECK_THROWS_AS(parse_eta_spec("cubic:2"), Error);
  CHECK(parse_phi_spec("bmetric:2").coefficient() == 2.0);
  CHECK(parse_phi_spec("max").kind() == TriangleFunction::Kind::Max);
  CHECK(parse_index_list("0, 2,5") == std::vector<std::size_t>{0, 2, 5});
  CHECK_THROWS_AS(parse_index_list("0,x"), Error);
}

TEST_CASE("envelope text round-trips", "[cli][io]") {
  const auto X = share(euclidean_space(5, 2, 1));
  const auto env = empirical_modulus(oracle::snowflake_map(X, 0.5));
  const auto points = parse_envelope_text(envelope_to_text(env));
  REQUIRE(points.size() == env.steps.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    CHECK(points[i].t == env.steps[i].t);
    CHECK(points[i].value == env.steps[i].H);
  }
}

TEST_CASE("cli: check classes", "[cli]") {
  TempDir dir;
  save_space(transform_distances(collinear_space({0, 1, 2}), power_scaler(2.0)), dir / "sq.json");
  const auto b = run({"check", dir / "sq.json", "--class", "bmetric"});
  CHECK(b.status == 0);
  CHECK(b.out == "minimal K = 2\n");
  const auto m = run({"check", dir / "sq.json"});
  CHECK(m.status == 1);
  CHECK(m.out.find("FAILS") != std::string::npos);
  save_space(collinear_space({0, 1, 3}), dir / "c.json");
  const auto ok = run({"check", dir / "c.json", "--class", "metric"});
  CHECK(ok.status == 0);
  CHECK(ok.out.rfind("additive: HOLDS (worst margin ", 0) == 0);
  CHECK(run({"check", dir / "c.json", "--phi", "max"}).status == 1);
  CHECK(run({"check", dir / "c.json", "--class", "ptolemaic"}).status == 0);
}

TEST_CASE("cli: qs-check witness and modulus dump", "[cli]") {
  TempDir dir;
  const auto X = share(euclidean_space(6, 2, 2));
  const auto f = oracle::snowflake_map(X, 0.5);
  save_space(*X, dir / "X.json");
  save_space(f.codomain(), dir / "Y.json");
  write_text_file(dir / "f.json", map_to_json(f));
  const std::vector<std::string> map{"--domain", dir / "X.json", "--codomain", dir / "Y.json", "--map", dir / "f.json"};
  auto with = [&](std::vector<std::string> head) {
    head.insert(head.end(), map.begin(), map.end());
    return head;
  };
  const auto bad = run(with({"qs-check", "--eta", "power:0.4"}));
  CHECK(bad.status == 1);
  CHECK(bad.out.find("witness (x,a,b)") != std::string::npos);
  CHECK(bad.out.find("H(t)") != std::string::npos);
  CHECK(run(with({"qs-check", "--eta", "power:0.5"})).status == 0);

  const auto js = run(with({"qs-check", "--eta", "power:0.4", "--json"}));
  CHECK(js.status == 1);
  const auto doc = nlohmann::json::parse(js.out);
  CHECK(doc["verdict"] == "fails");
  CHECK(doc["inputs"].size() == 3);
  CHECK(doc["tolerances"]["tol"] == 1e-9);
  CHECK(doc["report"]["witness"].contains("x"));

  const auto env = run(with({"modulus", "-o", dir / "env.txt"}));
  CHECK(env.status == 0);
  CHECK(env.out == read_text_file(dir / "env.txt"));
  const auto points = parse_envelope_text(env.out);
  for (std::size_t i = 1; i < points.size(); ++i) CHECK(points[i].t > points[i - 1].t);
  CHECK(run(with({"qs-check", "--eta", "empirical:" + (dir / "env.txt")})).status == 0);

  const auto fit = run(with({"fit-snowflake"}));
  CHECK(fit.status == 0);
  CHECK(fit.out.find("alpha = ") != std::string::npos);
  const auto fj = nlohmann::json::parse(run(with({"fit-snowflake", "--json"})).out);
  CHECK(fj["report"]["fit"]["alpha"].get<double>() == Catch::Approx(0.5).epsilon(1e-12));
  CHECK(fj["report"]["fit"]["lambda"].get<double>() == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cli: usage and input errors exit 2", "[cli]") {
  TempDir dir;
  write_text_file(dir / "asym.json", R"({"points": ["a", "b"], "matrix": [[0, 1], [2, 0]]})");
  const auto asym = run({"check", dir / "asym.json"});
  CHECK(asym.status == 2);
  CHECK(asym.err.find("NonSymmetric") != std::string::npos);
  write_text_file(dir / "bad.csv", ",a,b\na,0,1\nc,1,0\n");
  CHECK(run({"check", dir / "bad.csv"}).status == 2);
  CHECK(run({"check", dir / "missing.json"}).status == 2);
  CHECK(run({}).status == 2);
  CHECK(run({"frobnicate"}).status == 2);
  CHECK(run({"check", dir / "asym.json", "--bogus"}).status == 2);
  CHECK(run({"qs-check", "--eta", "power:1"}).status == 2);
  CHECK(run({"--help"}).status == 0);
}

TEST_CASE("cli: gen writes files", "[cli]") {
  TempDir dir;
  const auto g = run({"gen", "pseudolinear", "--s", "1", "--t", "2", "-o", dir / "q.json"});
  CHECK(g.status == 0);
  CHECK(load_space(dir / "q.json") == pseudolinear_space(1, 2));
  const auto r = run({"gen", "euclidean", "--n", "6", "--seed", "4", "--transform", "expm1", "--relabel",
                      "--source-out", dir / "src.csv", "--map-out", dir / "m.json", "-o", dir / "out.json"});
  CHECK(r.status == 0);
  const auto src = share(load_space(dir / "src.csv"));
  const auto out = share(load_space(dir / "out.json"));
  CHECK(*src == euclidean_space(6, 2, 4));
  const auto f = load_map(dir / "m.json", src, out, true);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) CHECK(f.image_d(i, j) == (i == j ? 0.0 : std::expm1(src->d(i, j))));
}

TEST_CASE("cli: weaksim dump", "[cli]") {
  TempDir dir;
  save_space(collinear_space({0, 1, 3}), dir / "x.json");
  save_space(transform_distances(collinear_space({0, 1, 3}), power_scaler(2.0)), dir / "y.json");
  const auto w = run({"weaksim", dir / "x.json", dir / "y.json"});
  CHECK(w.status == 0);
  CHECK(w.out.find("p0 -> p0") != std::string::npos);
  CHECK(w.out.find("3 -> 9") != std::string::npos);
  CHECK(run({"weaksim", dir / "x.json", dir / "y.json", "--oracle"}).status == 0);
  save_space(build_space(default_labels(3), {{0, 1, 1}, {1, 0, 2}, {1, 2, 0}}), dir / "a.json");
  save_space(build_space(default_labels(3), {{0, 1, 2}, {1, 0, 2}, {2, 2, 0}}), dir / "b.json");
  CHECK(run({"weaksim", dir / "a.json", dir / "b.json"}).status == 1);
}
