#ifndef QSMAP_TOOLS_CLI_HPP
#define QSMAP_TOOLS_CLI_HPP

// Command-line front end. Exit status: 0 property holds / object produced,
// 1 property fails, 2 usage or input error.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qsmap/qsmap.hpp"

namespace qsmap::cli {

inline constexpr int kHolds = 0;
inline constexpr int kFails = 1;
inline constexpr int kUsage = 2;

using Json = nlohmann::ordered_json;

inline std::string num(double v) { return format_number(v); }

/// Shared state of one invocation: loaded inputs with their hashes and the output mode.
class Session {
 public:
  Session(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  double tol = kDefaultTol;
  bool json = false;
  std::uint64_t seed = 0;

  SpacePtr space(const std::string& path) {
    const std::string text = read_text_file(path);
    inputs_[path] = content_hash(text);
    return share(has_csv_extension(path) ? parse_space_csv(text, tol, path) : parse_space_json(text, tol));
  }

  PointMap map(const std::string& path, SpacePtr domain, SpacePtr codomain, bool bijective = false) {
    const std::string text = read_text_file(path);
    inputs_[path] = content_hash(text);
    return parse_map_json(text, std::move(domain), std::move(codomain), bijective);
  }

  /// --map FILE with --domain/--codomain, or --map DOMAIN CODOMAIN FILE.
  PointMap map_from(const std::vector<std::string>& files, const std::string& domain, const std::string& codomain,
                    bool bijective = false) {
    if (files.size() == 3) return map(files[2], space(files[0]), space(files[1]), bijective);
    if (files.size() == 1) {
      if (domain.empty() || codomain.empty()) {
        throw Error(ErrorKind::BadParams, "--map FILE needs --domain and --codomain (or pass three files)");
      }
      return map(files[0], space(domain), space(codomain), bijective);
    }
    throw Error(ErrorKind::BadParams, "--map takes one file or three (domain, codomain, map)");
  }

  Modulus eta(const std::string& spec) {
    if (spec.rfind("empirical:", 0) == 0) inputs_[spec.substr(10)] = content_hash(read_text_file(spec.substr(10)));
    return parse_eta_spec(spec);
  }

  /// Emits the report and returns the exit status.
  int finish(const std::string& command, int status, Json report, const std::string& human,
             Json tolerances = Json::object()) {
    if (json) {
      Json doc;
      doc["command"] = command;
      doc["verdict"] = status == kHolds ? "holds" : "fails";
      doc["exit"] = status;
      Json inputs = Json::object();
      for (const auto& [path, hash] : inputs_) inputs[path] = "fnv1a64:" + hash;
      doc["inputs"] = std::move(inputs);
      tolerances["tol"] = tol;
      doc["tolerances"] = std::move(tolerances);
      doc["report"] = std::move(report);
      out_ << doc.dump(2) << "\n";
    } else {
      out_ << human;
    }
    return status;
  }

  std::ostream& err() { return err_; }

 private:
  std::ostream& out_;
  std::ostream& err_;
  std::map<std::string, std::string> inputs_;
};

// ---- rendering helpers ----

inline std::string lab(const SemimetricSpace& S, std::size_t i) { return S.label(i); }

inline Json triangle_json(const SemimetricSpace& S, const TriangleFunction& phi, const TriangleReport& r) {
  Json j;
  j["gauge"] = phi.describe();
  j["holds"] = r.holds;
  if (r.worst_triple) {
    const auto& w = *r.worst_triple;
    j["worst_triple"] = {{"x", lab(S, w[0])}, {"z", lab(S, w[1])}, {"y", lab(S, w[2])}};
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["margin"] = r.margin;
  }
  return j;
}

inline std::string triangle_text(const SemimetricSpace& S, const TriangleFunction& phi, const TriangleReport& r) {
  std::ostringstream os;
  os << phi.describe() << ": " << (r.holds ? "HOLDS" : "FAILS");
  if (r.worst_triple) {
    const auto& w = *r.worst_triple;
    os << " (worst margin " << num(r.margin) << " at (" << lab(S, w[0]) << "," << lab(S, w[1]) << ","
       << lab(S, w[2]) << ")";
    if (!r.holds) {
      os << ": d(" << lab(S, w[0]) << "," << lab(S, w[2]) << ") = " << num(r.lhs) << " > " << num(r.rhs);
    }
    os << ")";
  } else {
    os << " (vacuous)";
  }
  os << "\n";
  return os.str();
}

inline Json ptolemy_json(const SemimetricSpace& S, const PtolemyReport& r) {
  Json j;
  j["holds"] = r.holds;
  j["mode"] = std::string(to_string(r.mode));
  j["checked"] = r.checked;
  if (r.witness) {
    const auto& w = *r.witness;
    j["witness"] = {{"x", lab(S, w[0])}, {"y", lab(S, w[1])}, {"z", lab(S, w[2])}, {"t", lab(S, w[3])}};
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["margin"] = r.margin;
  }
  return j;
}

inline std::string ptolemy_text(const SemimetricSpace& S, const PtolemyReport& r) {
  std::ostringstream os;
  os << "ptolemaic: " << (r.holds ? "HOLDS" : "FAILS") << " [" << to_string(r.mode) << ", " << r.checked
     << " quadruples]";
  if (r.witness) {
    const auto& w = *r.witness;
    os << " (worst margin " << num(r.margin) << " at (" << lab(S, w[0]) << "," << lab(S, w[1]) << ","
       << lab(S, w[2]) << "," << lab(S, w[3]) << "): d(x,z)d(t,y) = " << num(r.lhs)
       << ", d(x,y)d(t,z)+d(x,t)d(y,z) = " << num(r.rhs) << ")";
  }
  os << "\n";
  return os.str();
}

inline Json qs_json(const SemimetricSpace& X, const Modulus& eta, const QsReport& r) {
  Json j;
  j["eta"] = eta.describe();
  j["holds"] = r.holds;
  j["levels"] = r.levels;
  j["min_slack"] = r.min_slack;
  if (r.witness) {
    const auto& w = *r.witness;
    j["witness"] = {{"x", lab(X, w[0])}, {"a", lab(X, w[1])}, {"b", lab(X, w[2])}};
    j["t"] = r.t;
    j["image_ratio"] = r.image_ratio;
    j["eta_at_t"] = r.eta_at_t;
    j["slack"] = r.eta_at_t - r.image_ratio;
  }
  return j;
}

inline std::string qs_text(const SemimetricSpace& X, const Modulus& eta, const QsReport& r) {
  std::ostringstream os;
  os << eta.describe() << "-quasisymmetric: " << (r.holds ? "HOLDS" : "FAILS");
  if (r.witness) {
    const auto& w = *r.witness;
    os << " (witness (x,a,b) = (" << lab(X, w[0]) << "," << lab(X, w[1]) << "," << lab(X, w[2])
       << "): t = " << num(r.t) << ", H(t) = " << num(r.image_ratio) << ", eta(t) = " << num(r.eta_at_t)
       << ", slack = " << num(r.eta_at_t - r.image_ratio) << ")";
  } else {
    os << " (" << r.levels << " ratio levels, min slack " << num(r.min_slack) << ")";
  }
  os << "\n";
  return os.str();
}

inline Json unbounded_json(const SemimetricSpace& X, const Error& e) {
  Json j;
  j["holds"] = false;
  j["error"] = std::string(to_string(e.kind()));
  j["message"] = e.what();
  if (e.witness().size() == 3) {
    j["witness"] = {{"x", lab(X, e.witness()[0])}, {"a", lab(X, e.witness()[1])}, {"b", lab(X, e.witness()[2])}};
  }
  return j;
}

inline Json transfer_json(const TransferReport& r) {
  Json j;
  j["holds"] = r.holds;
  j["mode"] = std::string(to_string(r.mode));
  j["checked_pairs"] = r.checked_pairs;
  auto pack = [](const TransferWorst& w) {
    return Json{{"t1", w.t1}, {"t2", w.t2}, {"lhs1", w.lhs1}, {"lhs2", w.lhs2}, {"slack", w.lhs2 - 1.0}};
  };
  if (r.worst) j["worst"] = pack(*r.worst);
  if (r.first_violation) j["first_violation"] = pack(*r.first_violation);
  return j;
}

inline std::string transfer_text(const TransferReport& r) {
  std::ostringstream os;
  os << "transfer condition [" << to_string(r.mode) << ", " << r.checked_pairs
     << " pairs]: " << (r.holds ? "HOLDS" : "FAILS");
  const auto& w = r.first_violation ? r.first_violation : r.worst;
  if (w) {
    os << " (" << (r.first_violation ? "violation" : "worst") << " at t1 = " << num(w->t1) << ", t2 = " << num(w->t2)
       << ": Phi1(1/t1,1/t2) = " << num(w->lhs1) << ", Phi2(1/eta(t1),1/eta(t2)) = " << num(w->lhs2) << ")";
  }
  os << "\n";
  return os.str();
}

// ---- subcommands ----

struct Options {
  std::string space, domain, codomain, out_file;
  std::vector<std::string> map_files;
  std::string klass = "metric", phi, phi1 = "additive", phi2 = "additive", eta;
  std::string subset_a, subset_b, quadruple, coords, transform;
  std::vector<double> at;
  std::string source_out, map_out, kind;
  std::string x_file, y_file;
  int n = 0, dim = 2, n1 = 0, n2 = 0, grid = static_cast<int>(kTransferGridPoints);
  int samples = 512;
  double s = 0.0, t = 0.0, min_k2 = 0.0;
  bool line = false, oracle = false, pointwise = false, check_l02 = false, realized = false, ratios = false,
       relabel = false;
};

inline int cmd_check(Session& ss, const Options& o) {
  const SpacePtr S = ss.space(o.space);
  Json report;
  std::string human;
  int status = kHolds;
  if (!o.phi.empty() || o.klass == "metric" || o.klass == "ultrametric") {
    const TriangleFunction phi = !o.phi.empty()           ? parse_phi_spec(o.phi)
                                 : o.klass == "metric"    ? TriangleFunction::additive()
                                                          : TriangleFunction::max_gauge();
    const auto r = check_triangle(*S, phi, ss.tol);
    report = triangle_json(*S, phi, r);
    human = triangle_text(*S, phi, r);
    status = r.holds ? kHolds : kFails;
  } else if (o.klass == "bmetric") {
    const double k = minimal_bmetric_K(*S);
    report["minimal_K"] = k;
    report["metric"] = S->size() < 3 || k <= 1.0;
    human = "minimal K = " + num(k) + "\n";
  } else if (o.klass == "ptolemaic") {
    const auto r = is_ptolemaic(*S, ss.tol, ss.seed);
    report = ptolemy_json(*S, r);
    human = ptolemy_text(*S, r);
    status = r.holds ? kHolds : kFails;
  } else {
    throw Error(ErrorKind::BadParams, "unknown class '" + o.klass + "'");
  }
  report["space"] = S->name();
  report["points"] = S->size();
  return ss.finish("check", status, std::move(report), human);
}

inline int cmd_modulus(Session& ss, const Options& o) {
  const PointMap f = ss.map_from(o.map_files, o.domain, o.codomain);
  Json tols{{"ratio_merge", kRatioTol}};
  try {
    const auto env = empirical_modulus(f);
    if (!o.out_file.empty()) write_text_file(o.out_file, envelope_to_text(env));
    Json steps = Json::array();
    const SemimetricSpace& X = f.domain();
    for (const auto& st : env.steps) {
      steps.push_back({{"t", st.t},
                       {"H", st.H},
                       {"raw", st.raw},
                       {"witness", {lab(X, st.witness[0]), lab(X, st.witness[1]), lab(X, st.witness[2])}}});
    }
    Json report{{"holds", true}, {"levels", env.steps.size()}, {"steps", std::move(steps)}};
    return ss.finish("modulus", kHolds, std::move(report), envelope_to_text(env), std::move(tols));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::UnboundedEnvelope) throw;
    return ss.finish("modulus", kFails, unbounded_json(f.domain(), e),
                     std::string("UNBOUNDED: ") + e.what() + "\n", std::move(tols));
  }
}

inline int cmd_qs_check(Session& ss, const Options& o) {
  const PointMap f = ss.map_from(o.map_files, o.domain, o.codomain);
  const Modulus eta = ss.eta(o.eta);
  Json tols{{"ratio_merge", kRatioTol}};
  try {
    const auto r = check_qs(f, eta, ss.tol);
    Json report = qs_json(f.domain(), eta, r);
    std::string human = qs_text(f.domain(), eta, r);
    if (o.ratios) {
      const auto rr = eta_ratio_report(f, eta);
      report["ratio_report"] = {{"holds", rr.holds},
                                {"min_product", rr.min_product},
                                {"at_t", rr.at_t},
                                {"eta_at_one", rr.eta_at_one}};
      human += "eta(t) eta(1/t) >= 1: " + std::string(rr.holds ? "HOLDS" : "FAILS") + " (min product " +
               num(rr.min_product) + " at t = " + num(rr.at_t) + ", eta(1) = " + num(rr.eta_at_one) + ")\n";
    }
    return ss.finish("qs-check", r.holds ? kHolds : kFails, std::move(report), human, std::move(tols));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::UnboundedEnvelope) throw;
    return ss.finish("qs-check", kFails, unbounded_json(f.domain(), e), std::string("FAILS: ") + e.what() + "\n",
                     std::move(tols));
  }
}

inline int cmd_invert_eta(Session& ss, const Options& o) {
  const Modulus eta = ss.eta(o.eta);
  const Modulus inv = inverse_modulus(eta);
  Json report;
  report["eta"] = eta.describe();
  report["inverse"] = inv.describe();
  std::ostringstream human;
  human << "inverse of " << eta.describe() << ": " << inv.describe() << "\n";
  Json values = Json::array();
  for (double t : o.at) {
    const double v = inv(t);
    values.push_back({{"t", t}, {"value", v}});
    human << "eta'(" << num(t) << ") = " << num(v) << "\n";
  }
  report["values"] = std::move(values);
  int status = kHolds;
  if (!o.map_files.empty()) {
    const PointMap f = ss.map_from(o.map_files, o.domain, o.codomain, true);
    const PointMap g = f.inverse();
    const auto r = check_qs(g, inv, ss.tol);
    report["inverse_map"] = qs_json(g.domain(), inv, r);
    human << "inverse map: " << qs_text(g.domain(), inv, r);
    status = r.holds ? kHolds : kFails;
  }
  return ss.finish("invert-eta", status, std::move(report), human.str());
}

inline int cmd_transfer(Session& ss, const Options& o) {
  const Modulus eta = ss.eta(o.eta);
  if (o.min_k2 > 0.0) {
    const auto k = minimal_transfer_K2_detail(o.min_k2, eta, static_cast<std::size_t>(o.grid));
    Json report{{"K1", o.min_k2}, {"minimal_K2", k.k2}, {"boundary_sup", k.sup}, {"t1", k.t1}, {"t2", k.t2}};
    return ss.finish("transfer", kHolds, std::move(report), "minimal K2 = " + num(k.k2) + "\n");
  }
  const TriangleFunction phi1 = parse_phi_spec(o.phi1);
  const TriangleFunction phi2 = parse_phi_spec(o.phi2);
  if (o.map_files.empty()) {
    const auto r = check_transfer_condition(phi1, phi2, eta, grid_pairs(static_cast<std::size_t>(o.grid)), ss.tol);
    return ss.finish("transfer", r.holds ? kHolds : kFails, transfer_json(r), transfer_text(r));
  }
  const PointMap f = ss.map_from(o.map_files, o.domain, o.codomain, true);
  const auto r = verify_transfer_end_to_end(f, phi1, phi2, eta, ss.tol);
  Json report;
  report["holds"] = r.holds;
  report["transfer"] = transfer_json(r.transfer);
  report["side_conditions"] = {{"homogeneity", r.side.homogeneity},
                               {"origin_bound", r.side.origin_bound},
                               {"mode", r.side.probed ? "probed" : "analytic"}};
  std::string human = transfer_text(r.transfer);
  human += std::string("side conditions [") + (r.side.probed ? "probed" : "analytic") +
           "]: " + (r.side.homogeneity && r.side.origin_bound ? "HOLD" : "FAIL") + "\n";
  if (r.conclusion) {
    report["conclusion"] = triangle_json(f.codomain(), phi2, *r.conclusion);
    report["theorem_violation"] = r.theorem_violation;
    human += "codomain " + triangle_text(f.codomain(), phi2, *r.conclusion);
  }
  return ss.finish("transfer", r.holds ? kHolds : kFails, std::move(report), human);
}

inline int cmd_ptolemy_transfer(Session& ss, const Options& o) {
  const Modulus eta = ss.eta(o.eta);
  const PointMap f = ss.map_from(o.map_files, o.domain, o.codomain, true);
  const auto r = ptolemy_transfer_check(f, eta, o.realized ? PtolemyPath::Realized : PtolemyPath::Auto, ss.tol);
  Json report;
  report["holds"] = r.holds;
  report["path"] = r.analytic ? "analytic" : "realized";
  report["implication_holds"] = r.implication_holds;
  report["checked"] = r.checked;
  std::ostringstream human;
  human << "implication [" << (r.analytic ? "analytic" : "realized") << "]: "
        << (r.implication_holds ? "HOLDS" : "FAILS");
  if (r.witness) {
    const SemimetricSpace& X = f.domain();
    const auto& w = *r.witness;
    report["witness"] = {{"x", lab(X, w[0])}, {"y", lab(X, w[1])}, {"z", lab(X, w[2])}, {"t", lab(X, w[3])}};
    report["ratios"] = r.ratios;
    report["lhs"] = r.lhs;
    report["rhs"] = r.rhs;
    report["margin"] = r.margin;
    human << " (worst relative margin " << num(r.margin) << ")";
  }
  human << "\n";
  if (r.conclusion) {
    report["conclusion"] = ptolemy_json(f.codomain(), *r.conclusion);
    report["theorem_violation"] = r.theorem_violation;
    human << "codomain " << ptolemy_text(f.codomain(), *r.conclusion);
  }
  return ss.finish("ptolemy-transfer", r.holds ? kHolds : kFails, std::move(report), human.str());
}

inline int cmd_distortion(Session& ss, const Options& o) {
  const Modulus eta = ss.eta(o.eta);
  const TriangleFunction phi1 = parse_phi_spec(o.phi1);
  const TriangleFunction phi2 = parse_phi_spec(o.phi2);
  const PointMap f = ss.map_from(o.map_files, o.domain, o.codomain);
  const SemimetricSpace& X = f.domain();
  Json tols{{"bound", kBoundTol}};
  if (o.pointwise) {
    const auto r = bounded_image_bounds(f, eta, phi1, phi2, kBoundTol);
    Json report{{"holds", r.holds},
                {"diam_X", r.diam_x},
                {"diam_fX", r.diam_fx},
                {"pairs", r.pairs},
                {"slack_lower", r.slack_lower},
                {"slack_upper", r.slack_upper}};
    std::ostringstream human;
    human << "pointwise bounds: " << (r.holds ? "HOLD" : "FAIL") << " (" << r.pairs << " pairs, min lower slack "
          << num(r.slack_lower) << ", min upper slack " << num(r.slack_upper) << ")\n";
    auto pack = [&](const PairBound& p) {
      return Json{{"x", lab(X, p.x)}, {"y", lab(X, p.y)}, {"lower", p.lower}, {"value", p.value}, {"upper", p.upper}};
    };
    if (r.worst_lower) report["worst_lower"] = pack(*r.worst_lower);
    if (r.worst_upper) report["worst_upper"] = pack(*r.worst_upper);
    if (r.bilipschitz) {
      report["bilipschitz"] = {{"derived_L", r.bilipschitz->derived_L},
                               {"observed_L", r.bilipschitz->observed_L ? Json(*r.bilipschitz->observed_L) : Json()},
                               {"holds", r.bilipschitz->holds}};
      human << "bi-Lipschitz: derived L = " << num(r.bilipschitz->derived_L) << ", observed L = "
            << (r.bilipschitz->observed_L ? num(*r.bilipschitz->observed_L) : std::string("none")) << "\n";
    }
    return ss.finish("distortion", r.holds ? kHolds : kFails, std::move(report), human.str(), std::move(tols));
  }
  if (o.subset_a.empty()) throw Error(ErrorKind::BadParams, "distortion needs --A (and optionally --B) or --pointwise");
  const SubsetRef A = make_subset(f.domain_ptr(), parse_index_list(o.subset_a));
  const SubsetRef B = o.subset_b.empty() ? whole(f.domain_ptr()) : make_subset(f.domain_ptr(), parse_index_list(o.subset_b));
  const auto r = tv_bounds(f, eta, A, B, phi1, phi2, kBoundTol);
  Json report{{"holds", r.holds},
              {"diam_A", r.diam_a},
              {"diam_B", r.diam_b},
              {"diam_fA", r.diam_fa},
              {"diam_fB", r.diam_fb},
              {"ratio", r.ratio},
              {"upper", r.upper},
              {"slack_upper", r.slack_upper},
              {"lower_lhs", r.lower_lhs},
              {"lower_rhs", r.lower_rhs},
              {"slack_lower", r.slack_lower}};
  std::ostringstream human;
  human << "generalized bounds: " << (r.slack_upper >= -kBoundTol && r.slack_lower >= -kBoundTol ? "HOLD" : "FAIL")
        << " (ratio " << num(r.ratio) << " <= " << num(r.upper) << "; " << num(r.lower_lhs)
        << " <= " << num(r.lower_rhs) << ")\n";
  if (r.classical) {
    const auto& c = *r.classical;
    report["classical"] = {{"K1", c.k1},          {"K2", c.k2},
                           {"lower", c.lower},    {"upper", c.upper},
                           {"slack_lower", c.slack_lower}, {"slack_upper", c.slack_upper}};
    human << "double inequality (K1 = " << num(c.k1) << ", K2 = " << num(c.k2) << "): " << num(c.lower)
          << " <= " << num(r.ratio) << " <= " << num(c.upper) << "\n";
  }
  return ss.finish("distortion", r.holds ? kHolds : kFails, std::move(report), human.str(), std::move(tols));
}

inline int cmd_between(Session& ss, const Options& o) {
  std::optional<PointMap> f;
  SpacePtr S;
  if (!o.map_files.empty()) {
    if (o.map_files.size() == 1) {
      f = ss.map_from(o.map_files, o.space.empty() ? o.domain : o.space, o.codomain);
    } else {
      f = ss.map_from(o.map_files, "", "");
    }
    S = f->domain_ptr();
  } else {
    if (o.space.empty()) throw Error(ErrorKind::BadParams, "between needs --space");
    S = ss.space(o.space);
  }
  Json report;
  std::ostringstream human;
  int status = kHolds;
  const auto triples = betweenness_triples(*S, ss.tol);
  Json tj = Json::array();
  for (const auto& tr : triples) {
    tj.push_back({{"x", lab(*S, tr.x)}, {"y", lab(*S, tr.y)}, {"z", lab(*S, tr.z)}, {"slack", tr.slack}});
    human << lab(*S, tr.y) << " between " << lab(*S, tr.x) << " and " << lab(*S, tr.z) << "\n";
  }
  report["triples"] = std::move(tj);
  human << triples.size() << " betweenness triple(s)\n";

  const auto coords = line_embed(*S, ss.tol);
  report["line_embeds"] = coords.has_value();
  if (coords) report["coordinates"] = *coords;
  human << "line embedding: " << (coords ? "YES" : "NO") << "\n";
  if (o.line && !coords) status = kFails;

  std::optional<std::array<std::size_t, 4>> quad;
  if (!o.quadruple.empty()) {
    const auto idx = parse_index_list(o.quadruple);
    if (idx.size() != 4) throw Error(ErrorKind::BadParams, "--quadruple takes four indices");
    for (std::size_t i : idx)
      if (i >= S->size()) throw Error(ErrorKind::BadSubset, "quadruple index out of range");
    quad = std::array<std::size_t, 4>{idx[0], idx[1], idx[2], idx[3]};
    const auto shape = detect_pseudolinear(*S, *quad, ss.tol);
    const auto sub = subspace(*S, idx);
    const bool sub_line = line_embed(sub, ss.tol).has_value();
    bool triples_line = true;
    for (std::size_t skip = 0; skip < 4; ++skip) {
      std::vector<std::size_t> three;
      for (std::size_t k = 0; k < 4; ++k)
        if (k != skip) three.push_back(k);
      triples_line = triples_line && line_embed(subspace(sub, three), ss.tol).has_value();
    }
    report["quadruple"] = {{"pseudolinear", static_cast<bool>(shape)},
                           {"line_embeds", sub_line},
                           {"every_triple_line_embeds", triples_line}};
    if (shape) {
      const auto& ord = *shape.ordering;
      report["quadruple"]["ordering"] = {lab(*S, ord[0]), lab(*S, ord[1]), lab(*S, ord[2]), lab(*S, ord[3])};
      report["quadruple"]["s"] = shape.s;
      report["quadruple"]["t"] = shape.t;
      human << "pseudolinear quadruple: YES (" << lab(*S, ord[0]) << "," << lab(*S, ord[1]) << "," << lab(*S, ord[2])
            << "," << lab(*S, ord[3]) << "; s = " << num(shape.s) << ", t = " << num(shape.t) << ")\n";
    } else {
      human << "pseudolinear quadruple: NO\n";
    }
    human << "quadruple line embedding: " << (sub_line ? "YES" : "NO")
          << ", every 3-subset embeds: " << (triples_line ? "YES" : "NO") << "\n";
    if (!o.line && !f && !shape) status = kFails;
    if (o.line && !sub_line) status = kFails;
  }

  if (f) {
    const auto pr = preserves_betweenness(*f, ss.tol);
    Json pj{{"holds", pr.holds}, {"checked", pr.checked}};
    Json vj = Json::array();
    for (const auto& v : pr.violations) {
      vj.push_back({{"x", lab(*S, v.triple.x)},
                    {"y", lab(*S, v.triple.y)},
                    {"z", lab(*S, v.triple.z)},
                    {"image_lhs", v.image_lhs},
                    {"image_rhs", v.image_rhs},
                    {"slack", v.image_lhs - v.image_rhs}});
    }
    pj["violations"] = std::move(vj);
    report["preserves_betweenness"] = std::move(pj);
    human << "preserves betweenness: " << (pr.holds ? "HOLDS" : "FAILS") << " (" << pr.checked << " triples, "
          << pr.violations.size() << " violations)\n";
    status = pr.holds ? kHolds : kFails;
    if (pr.holds) {
      std::vector<std::size_t> idx;
      if (quad) {
        idx.assign(quad->begin(), quad->end());
      } else {
        for (std::size_t i = 0; i < S->size(); ++i) idx.push_back(i);
      }
      const auto ir = betweenness_image_structure(*f, make_subset(S, idx), ss.tol);
      report["image_structure"] = {{"holds", ir.holds},
                                   {"domain_line", ir.domain_line},
                                   {"image_line", ir.image_line ? Json(*ir.image_line) : Json()},
                                   {"domain_pseudolinear", static_cast<bool>(ir.domain_quadruple)},
                                   {"image_pseudolinear", static_cast<bool>(ir.image_quadruple)}};
      human << "image structure: " << (ir.holds ? "HOLDS" : "FAILS") << "\n";
      if (!ir.holds) status = kFails;
    }
  }
  return ss.finish("between", status, std::move(report), human.str());
}

inline int cmd_eta_k8(Session& ss, const Options& o) {
  Modulus eta = !o.eta.empty() ? ss.eta(o.eta)
                               : eta_from_generators(power_generator(o.n1), power_generator(o.n2));
  Json report;
  report["eta"] = eta.describe();
  std::ostringstream human;
  human << "eta = " << eta.describe() << "\n";
  Json values = Json::array();
  for (double t : o.at) {
    values.push_back({{"t", t}, {"value", eta(t)}});
    human << "eta(" << num(t) << ") = " << detail::format_17(eta(t)) << "\n";
  }
  report["values"] = std::move(values);
  int status = kHolds;
  if (o.check_l02) {
    const auto r = check_l02_conditions(eta, partition_samples(static_cast<std::size_t>(o.samples)), 1e-10);
    report["sufficiency"] = {{"holds", r.sufficiency_holds},
                             {"max_forward_error", r.max_forward_error},
                             {"max_inverse_error", r.max_inverse_error},
                             {"samples", r.samples}};
    Json nv = Json::array();
    for (const auto& s : r.necessity_violations) {
      nv.push_back({{"t1", s.t1}, {"forward", s.forward}, {"inverse", s.inverse}});
    }
    report["necessity"] = {{"holds", r.necessity_holds}, {"mode", r.necessity_mode}, {"violations", std::move(nv)}};
    human << "sufficiency equalities: " << (r.sufficiency_holds ? "HOLD" : "FAIL") << " (max errors "
          << num(r.max_forward_error) << ", " << num(r.max_inverse_error) << " over " << r.samples << " samples)\n";
    human << "necessity inequalities [" << r.necessity_mode << "]: " << (r.necessity_holds ? "HOLD" : "FAIL");
    if (!r.necessity_violations.empty()) {
      const auto& v = r.necessity_violations.front();
      human << " (first at t1 = " << num(v.t1) << ": eta(t1)+eta(t2) = " << num(v.forward)
            << ", 1/eta(1/t1)+1/eta(1/t2) = " << num(v.inverse) << ")";
    }
    human << "\n";
    status = r.sufficiency_holds ? kHolds : kFails;
  }
  return ss.finish("eta-k8", status, std::move(report), human.str(), Json{{"l02", 1e-10}});
}

inline int cmd_weaksim(Session& ss, const Options& o) {
  const SpacePtr X = ss.space(o.x_file);
  const SpacePtr Y = ss.space(o.y_file);
  const auto ws = o.oracle ? brute_force_weak_similarity(X, Y, ss.tol) : find_weak_similarity(X, Y, ss.tol);
  Json report;
  report["method"] = o.oracle ? "brute-force" : "search";
  report["weakly_similar"] = ws.has_value();
  std::ostringstream human;
  if (!ws) {
    human << "NOT WEAKLY SIMILAR\n";
    return ss.finish("weaksim", kFails, std::move(report), human.str(), Json{{"rank", ss.tol}});
  }
  human << "WEAKLY SIMILAR\n";
  Json assignment = Json::object();
  for (std::size_t i = 0; i < X->size(); ++i) {
    assignment[X->label(i)] = Y->label(ws->f(i));
    human << X->label(i) << " -> " << Y->label(ws->f(i)) << "\n";
  }
  Json phi = Json::array();
  for (std::size_t k = 0; k < ws->phi.from.size(); ++k) {
    phi.push_back({ws->phi.from[k], ws->phi.to[k]});
    human << detail::format_17(ws->phi.from[k]) << " -> " << detail::format_17(ws->phi.to[k]) << "\n";
  }
  report["assignment"] = std::move(assignment);
  report["phi"] = std::move(phi);
  report["realization_valid"] = verify_realization(*ws, ss.tol);
  return ss.finish("weaksim", kHolds, std::move(report), human.str(), Json{{"rank", ss.tol}});
}

inline ScalarGauge parse_scaler(const std::string& spec) {
  if (spec == "expm1") return expm1_scaler();
  const auto colon = spec.find(':');
  if (colon != std::string::npos) {
    const std::string head = spec.substr(0, colon);
    const std::string arg = spec.substr(colon + 1);
    const double args = detail::parse_number(arg, spec);
    if (head == "power") return power_scaler(args);
    if (head == "scale") return scale_scaler(args);
  }
  throw Error(ErrorKind::ParseError, "unknown transform '" + spec + "' (power:A, scale:L, expm1)");
}

inline int cmd_gen(Session& ss, const Options& o) {
  GeneratorParams p;
  p.n = o.n;
  p.dim = o.dim;
  p.s = o.s;
  p.t = o.t;
  if (!o.coords.empty()) {
    for (auto part : detail::split(o.coords, ',')) p.coordinates.push_back(detail::parse_number(part, o.coords));
  }
  const SpacePtr source = share(generate(parse_generator_kind(o.kind), p, ss.seed));
  SpacePtr result = source;
  if (!o.transform.empty()) result = share(transform_distances(*source, parse_scaler(o.transform)));
  std::vector<std::size_t> assignment(source->size());
  for (std::size_t i = 0; i < assignment.size(); ++i) assignment[i] = i;
  if (o.relabel) {
    // Shuffle the point order and rename, so the identity correspondence is hidden.
    Rng rng(ss.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(result->size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    const std::size_t n = order.size();
    std::vector<std::string> labels(n);
    std::vector<double> flat(n * n);
    for (std::size_t a = 0; a < n; ++a) {
      labels[a] = "q" + std::to_string(a);
      for (std::size_t b = 0; b < n; ++b) flat[a * n + b] = result->d(order[a], order[b]);
    }
    for (std::size_t a = 0; a < n; ++a) assignment[order[a]] = a;
    result = share(build_space_flat(std::move(labels), std::move(flat), 0.0, result->name() + "|relabeled"));
  }
  if (o.out_file.empty()) throw Error(ErrorKind::BadParams, "gen needs -o FILE");
  save_space(*result, o.out_file);
  if (!o.source_out.empty()) save_space(*source, o.source_out);
  if (!o.map_out.empty()) write_text_file(o.map_out, map_to_json(PointMap(source, result, assignment)));
  Json report{{"written", o.out_file}, {"name", result->name()}, {"points", result->size()}};
  return ss.finish("gen", kHolds, std::move(report), "wrote " + o.out_file + " (" + std::to_string(result->size()) +
                                                        " points)\n");
}

inline int cmd_fit_snowflake(Session& ss, const Options& o) {
  const PointMap f = ss.map_from(o.map_files, o.domain, o.codomain);
  const auto fit = fit_snowflake(f, ss.tol);
  if (!fit) return ss.finish("fit-snowflake", kFails, Json{{"fit", nullptr}}, "no snowflake fit\n");
  Json report{{"fit", {{"lambda", fit->lambda}, {"alpha", fit->alpha}, {"similarity", fit->similarity}}}};
  return ss.finish("fit-snowflake", kHolds, std::move(report),
                   "lambda = " + num(fit->lambda) + ", alpha = " + num(fit->alpha) +
                       (fit->similarity ? " (similarity)" : "") + "\n");
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite semimetric spaces and quasisymmetric maps"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  Options o;
  Session ss(out, err);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--tol", ss.tol, "Relative validation/comparison tolerance")->capture_default_str();
    sub->add_flag("--json", ss.json, "Emit a single JSON document");
    sub->add_option("--seed", ss.seed, "Seed for sampling and generators");
  };
  auto map_opts = [&](CLI::App* sub) {
    sub->add_option("--domain", o.domain, "Domain space file");
    sub->add_option("--codomain", o.codomain, "Codomain space file");
    sub->add_option("--map", o.map_files, "Map file, or DOMAIN CODOMAIN MAP")->expected(1, 3);
  };

  auto* check = app.add_subcommand("check", "Classify a space by triangle function or Ptolemy's inequality");
  check->add_option("space", o.space, "Space file")->required();
  check->add_option("--class", o.klass, "metric | ultrametric | bmetric | ptolemaic")->capture_default_str();
  check->add_option("--phi", o.phi, "Triangle function spec (additive, bmetric:K, max)");
  common(check);

  auto* modulus = app.add_subcommand("modulus", "Empirical modulus (minimal envelope) of a map");
  map_opts(modulus);
  modulus->add_option("-o", o.out_file, "Write the envelope as 't H' lines");
  common(modulus);

  auto* qs = app.add_subcommand("qs-check", "Verify eta-quasisymmetry of a map");
  map_opts(qs);
  qs->add_option("--eta", o.eta, "Modulus spec")->required();
  qs->add_flag("--ratios", o.ratios, "Also report eta(t) eta(1/t) at realized ratios");
  common(qs);

  auto* inv = app.add_subcommand("invert-eta", "Modulus of the inverse map");
  inv->add_option("--eta", o.eta, "Modulus spec")->required();
  inv->add_option("--at", o.at, "Evaluation points");
  map_opts(inv);
  common(inv);

  auto* transfer = app.add_subcommand("transfer", "Transfer of triangle functions");
  transfer->add_option("--phi1", o.phi1, "Domain triangle function")->capture_default_str();
  transfer->add_option("--phi2", o.phi2, "Codomain triangle function")->capture_default_str();
  transfer->add_option("--eta", o.eta, "Modulus spec")->required();
  transfer->add_option("--grid", o.grid, "Grid points per axis")->capture_default_str();
  transfer->add_option("--min-k2", o.min_k2, "Compute the minimal codomain coefficient for this K1");
  map_opts(transfer);
  common(transfer);

  auto* ptolemy = app.add_subcommand("ptolemy-transfer", "Transfer of Ptolemy's inequality");
  ptolemy->add_option("--eta", o.eta, "Modulus spec")->required();
  ptolemy->add_flag("--realized", o.realized, "Check the implication at realized ratios even for powers");
  map_opts(ptolemy);
  common(ptolemy);

  auto* distortion = app.add_subcommand("distortion", "Diameter distortion bounds");
  distortion->add_option("--eta", o.eta, "Modulus spec")->required();
  distortion->add_option("--phi1", o.phi1, "Domain triangle function")->capture_default_str();
  distortion->add_option("--phi2", o.phi2, "Codomain triangle function")->capture_default_str();
  distortion->add_option("--A", o.subset_a, "Subset A as i,j,...");
  distortion->add_option("--B", o.subset_b, "Subset B as i,j,... (default: all points)");
  distortion->add_flag("--pointwise", o.pointwise, "Pointwise bounds with B = X");
  map_opts(distortion);
  common(distortion);

  auto* between = app.add_subcommand("between", "Metric betweenness, pseudolinear quadruples, line embedding");
  between->add_option("--space", o.space, "Space file (the domain when a map is given)");
  between->add_option("--quadruple", o.quadruple, "Four point indices i,j,k,l");
  between->add_flag("--line", o.line, "Verdict: the space (or quadruple) embeds in the line");
  map_opts(between);
  common(between);

  auto* k8 = app.add_subcommand("eta-k8", "Betweenness-preserving modulus from x^n/2 generators");
  k8->add_option("--n1", o.n1, "Exponent of the first generator");
  k8->add_option("--n2", o.n2, "Exponent of the second generator");
  k8->add_option("--eta", o.eta, "Check an arbitrary modulus instead");
  k8->add_flag("--check-l02", o.check_l02, "Check the betweenness equalities");
  k8->add_option("--samples", o.samples, "Partition samples")->capture_default_str();
  k8->add_option("--at", o.at, "Evaluation points");
  common(k8);

  auto* weak = app.add_subcommand("weaksim", "Weak similarity between two spaces");
  weak->add_option("X", o.x_file, "First space")->required();
  weak->add_option("Y", o.y_file, "Second space")->required();
  weak->add_flag("--oracle", o.oracle, "Use the factorial brute-force search");
  common(weak);

  auto* gen = app.add_subcommand("gen", "Generate a space");
  gen->add_option("kind", o.kind, "euclidean | ultrametric | random_semimetric | pseudolinear | wilson | collinear")
      ->required();
  gen->add_option("--n", o.n, "Point count");
  gen->add_option("--dim", o.dim, "Dimension")->capture_default_str();
  gen->add_option("--s", o.s, "Pseudolinear s");
  gen->add_option("--t", o.t, "Pseudolinear t");
  gen->add_option("--coords", o.coords, "Collinear coordinates x1,x2,...");
  gen->add_option("--transform", o.transform, "Distance transform: power:A, scale:L, expm1");
  gen->add_flag("--relabel", o.relabel, "Shuffle and rename the output points");
  gen->add_option("--source-out", o.source_out, "Also write the untransformed space");
  gen->add_option("--map-out", o.map_out, "Also write the map source -> output");
  gen->add_option("-o", o.out_file, "Output file (.json or .csv)")->required();
  common(gen);

  auto* fit = app.add_subcommand("fit-snowflake", "Fit rho = lambda d^alpha");
  map_opts(fit);
  common(fit);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kUsage;
  }

  const std::map<CLI::App*, std::function<int(Session&, const Options&)>> handlers{
      {check, cmd_check},       {modulus, cmd_modulus},       {qs, cmd_qs_check},
      {inv, cmd_invert_eta},    {transfer, cmd_transfer},     {ptolemy, cmd_ptolemy_transfer},
      {distortion, cmd_distortion}, {between, cmd_between},   {k8, cmd_eta_k8},
      {weak, cmd_weaksim},      {gen, cmd_gen},               {fit, cmd_fit_snowflake}};
  try {
    for (const auto& [sub, handler] : handlers)
      if (sub->parsed()) return handler(ss, o);
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace qsmap::cli

#endif  // QSMAP_TOOLS_CLI_HPP
