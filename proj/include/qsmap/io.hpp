#ifndef QSMAP_IO_HPP
#define QSMAP_IO_HPP

// Flat-file formats (JSON and CSV spaces, JSON maps, envelope text) and the
// textual spec grammars for moduli and triangle functions.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qsmap/between.hpp"
#include "qsmap/error.hpp"
#include "qsmap/modulus.hpp"
#include "qsmap/numeric.hpp"
#include "qsmap/quasisymmetry.hpp"
#include "qsmap/space.hpp"
#include "qsmap/triangle.hpp"

namespace qsmap {

namespace detail {

inline std::string position(std::size_t line, std::size_t column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

/// 1-based line and column of a byte offset.
inline std::pair<std::size_t, std::size_t> locate(std::string_view text, std::size_t offset) {
  std::size_t line = 1, column = 1;
  for (std::size_t k = 0; k < offset && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

inline double parse_number(std::string_view text, const std::string& what) {
  double v = 0.0;
  if (!parse_double(text, v)) throw Error(ErrorKind::ParseError, "bad number '" + std::string(text) + "' in " + what);
  return v;
}

inline std::string format_17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ParseError, "cannot write '" + path + "'");
  out << text;
}

/// FNV-1a 64-bit, hex.
inline std::string content_hash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---- spaces ----

inline SemimetricSpace parse_space_json(const std::string& text, double tol = kDefaultTol) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = detail::locate(text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(ErrorKind::ParseError, detail::position(line, col) + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("points") || !doc.contains("matrix")) {
    throw Error(ErrorKind::ParseError, "space file needs \"points\" and \"matrix\"");
  }
  const auto& points = doc["points"];
  const auto& matrix = doc["matrix"];
  if (!points.is_array() || !matrix.is_array()) throw Error(ErrorKind::ParseError, "\"points\" and \"matrix\" must be arrays");
  std::vector<std::string> labels;
  for (const auto& p : points) {
    if (!p.is_string()) throw Error(ErrorKind::ParseError, "point labels must be strings");
    labels.push_back(p.get<std::string>());
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    const auto& row = matrix[i];
    if (!row.is_array()) throw Error(ErrorKind::ParseError, "matrix row " + std::to_string(i) + " is not an array");
    std::vector<double> values;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (!row[j].is_number()) {
        throw Error(ErrorKind::ParseError, "matrix entry (" + std::to_string(i) + ", " + std::to_string(j) +
                                               ") is not a number");
      }
      values.push_back(row[j].get<double>());
    }
    rows.push_back(std::move(values));
  }
  std::string name = doc.contains("name") && doc["name"].is_string() ? doc["name"].get<std::string>() : "";
  return build_space(std::move(labels), rows, tol, std::move(name));
}

/// Header row of labels, then one row of numbers per point.
inline SemimetricSpace parse_space_csv(const std::string& text, double tol = kDefaultTol, std::string name = "") {
  std::vector<std::string> labels;
  std::vector<double> flat;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split(line, ',');
    if (labels.empty()) {
      for (auto c : cells) labels.emplace_back(detail::trim(c));
      continue;
    }
    if (cells.size() != labels.size()) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                             std::to_string(labels.size()) + " values, found " +
                                             std::to_string(cells.size()));
    }
    std::size_t column = 1;
    for (auto c : cells) {
      double v = 0.0;
      if (!detail::parse_double(c, v)) {
        throw Error(ErrorKind::ParseError, detail::position(line_no, column) + ": bad number '" +
                                               std::string(detail::trim(c)) + "'");
      }
      flat.push_back(v);
      column += c.size() + 1;
    }
    ++rows;
  }
  if (labels.empty()) throw Error(ErrorKind::ParseError, "empty CSV file");
  if (rows != labels.size()) {
    throw Error(ErrorKind::ParseError, "header names " + std::to_string(labels.size()) + " points but " +
                                           std::to_string(rows) + " rows follow");
  }
  return build_space_flat(std::move(labels), std::move(flat), tol, std::move(name));
}

inline bool has_csv_extension(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

inline SemimetricSpace load_space(const std::string& path, double tol = kDefaultTol) {
  const std::string text = read_text_file(path);
  return has_csv_extension(path) ? parse_space_csv(text, tol, path) : parse_space_json(text, tol);
}

inline std::string space_to_json(const SemimetricSpace& S) {
  nlohmann::ordered_json doc;
  doc["name"] = S.name();
  doc["points"] = S.labels();
  auto matrix = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < S.size(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < S.size(); ++j) row.push_back(S.d(i, j));
    matrix.push_back(std::move(row));
  }
  doc["matrix"] = std::move(matrix);
  return doc.dump(1) + "\n";
}

inline std::string space_to_csv(const SemimetricSpace& S) {
  std::string out;
  for (std::size_t i = 0; i < S.size(); ++i) out += (i ? "," : "") + S.label(i);
  out += "\n";
  for (std::size_t i = 0; i < S.size(); ++i) {
    for (std::size_t j = 0; j < S.size(); ++j) out += (j ? "," : "") + detail::format_17(S.d(i, j));
    out += "\n";
  }
  return out;
}

inline void save_space(const SemimetricSpace& S, const std::string& path) {
  write_text_file(path, has_csv_extension(path) ? space_to_csv(S) : space_to_json(S));
}

// ---- maps ----

inline PointMap parse_map_json(const std::string& text, SpacePtr domain, SpacePtr codomain,
                               bool require_bijective = false) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = detail::locate(text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(ErrorKind::ParseError, detail::position(line, col) + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("assignment") || !doc["assignment"].is_object()) {
    throw Error(ErrorKind::ParseError, "map file needs an \"assignment\" object");
  }
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& [from, to] : doc["assignment"].items()) {
    if (!to.is_string()) throw Error(ErrorKind::ParseError, "image of '" + from + "' must be a label");
    pairs.emplace_back(from, to.get<std::string>());
  }
  return build_map(std::move(domain), std::move(codomain), pairs, require_bijective);
}

inline PointMap load_map(const std::string& path, SpacePtr domain, SpacePtr codomain, bool require_bijective = false) {
  return parse_map_json(read_text_file(path), std::move(domain), std::move(codomain), require_bijective);
}

inline std::string map_to_json(const PointMap& f) {
  nlohmann::ordered_json doc;
  doc["domain"] = f.domain().name();
  doc["codomain"] = f.codomain().name();
  nlohmann::ordered_json assignment = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < f.domain().size(); ++i) assignment[f.domain().label(i)] = f.codomain().label(f(i));
  doc["assignment"] = std::move(assignment);
  return doc.dump(1) + "\n";
}

// ---- envelopes ----

/// Ascending "t H" lines.
inline std::string envelope_to_text(const EmpiricalEnvelope& env) {
  std::string out;
  for (const auto& s : env.steps) out += detail::format_17(s.t) + " " + detail::format_17(s.H) + "\n";
  return out;
}

inline std::vector<EnvelopePoint> parse_envelope_text(const std::string& text) {
  std::vector<EnvelopePoint> pts;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::istringstream fields{std::string(body)};
    std::string a, b, extra;
    if (!(fields >> a >> b) || (fields >> extra)) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected \"t H\"");
    }
    double t = 0.0, h = 0.0;
    if (!detail::parse_double(a, t) || !detail::parse_double(b, h)) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": bad number");
    }
    pts.push_back({t, h});
  }
  return pts;
}

// ---- spec strings ----

/// "power:A", "linear:C", "bilip:L", "expratio", "k8:N1,N2", "empirical:FILE".
inline Modulus parse_eta_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto need_arg = [&]() {
    if (arg.empty()) throw Error(ErrorKind::ParseError, "modulus spec '" + spec + "' needs a parameter");
  };
  if (head == "power") {
    need_arg();
    return Modulus::power(detail::parse_number(arg, spec));
  }
  if (head == "linear") {
    need_arg();
    return Modulus::linear(detail::parse_number(arg, spec));
  }
  if (head == "bilip") {
    need_arg();
    return Modulus::bilip(detail::parse_number(arg, spec));
  }
  if (head == "expratio" && colon == std::string::npos) return Modulus::exp_ratio();
  if (head == "k8") {
    need_arg();
    const auto parts = detail::split(arg, ',');
    if (parts.size() != 2) throw Error(ErrorKind::ParseError, "k8 spec needs two exponents: '" + spec + "'");
    int n[2] = {0, 0};
    for (int k = 0; k < 2; ++k) {
      const auto p = detail::trim(parts[static_cast<std::size_t>(k)]);
      const auto res = std::from_chars(p.data(), p.data() + p.size(), n[k]);
      if (res.ec != std::errc() || res.ptr != p.data() + p.size()) {
        throw Error(ErrorKind::ParseError, "bad exponent in '" + spec + "'");
      }
    }
    return eta_from_generators(power_generator(n[0]), power_generator(n[1]));
  }
  if (head == "empirical") {
    need_arg();
    return Modulus::empirical(parse_envelope_text(read_text_file(arg)));
  }
  throw Error(ErrorKind::ParseError, "unknown modulus spec '" + spec + "'");
}

/// "additive", "bmetric:K", "max".
inline TriangleFunction parse_phi_spec(const std::string& spec) {
  if (spec == "additive") return TriangleFunction::additive();
  if (spec == "max") return TriangleFunction::max_gauge();
  if (spec.rfind("bmetric:", 0) == 0) return TriangleFunction::scaled_additive(detail::parse_number(spec.substr(8), spec));
  throw Error(ErrorKind::ParseError, "unknown triangle function '" + spec + "'");
}

/// "i,j,k" -> indices.
inline std::vector<std::size_t> parse_index_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (auto part : detail::split(text, ',')) {
    const auto p = detail::trim(part);
    std::size_t v = 0;
    const auto res = std::from_chars(p.data(), p.data() + p.size(), v);
    if (p.empty() || res.ec != std::errc() || res.ptr != p.data() + p.size()) {
      throw Error(ErrorKind::ParseError, "bad index '" + std::string(p) + "' in '" + text + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace qsmap

#endif  // QSMAP_IO_HPP
