#pragma once

// JSON readers and report writers. Rationals travel as strings ("3", "-1/2")
// or integer literals; floating-point input is rejected.

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ntheta/arcs.hpp"
#include "ntheta/curve.hpp"
#include "ntheta/errors.hpp"
#include "ntheta/expression.hpp"
#include "ntheta/family.hpp"
#include "ntheta/local_model.hpp"
#include "ntheta/multiplicity.hpp"
#include "ntheta/rational.hpp"

namespace ntheta::io {

using Json = nlohmann::json;

/// Accepts inline JSON (leading '{' or '[') or a path to a JSON file.
inline Json load_json(const std::string& text_or_path) {
  std::string text = text_or_path;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || (text[first] != '{' && text[first] != '[')) {
    std::ifstream in(text_or_path);
    detail::require(static_cast<bool>(in), "input-file", "cannot open '" + text_or_path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    text = buffer.str();
  }
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw PreconditionError("json-syntax", e.what());
  }
}

inline Rational rational_from_json(const Json& j) {
  if (j.is_number_integer()) return Rational(Integer(j.dump(), 10));
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw PreconditionError("rational-syntax", "expected an integer or a \"p/q\" string, got " + j.dump());
}

inline Json rational_to_json(const Rational& q) { return to_string(q); }

inline Json order_to_json(const Order& o) { return o ? Json(*o) : Json("infinite"); }

inline int int_field(const Json& j, const char* key) {
  detail::require(j.contains(key) && j.at(key).is_number_integer(), "json-schema",
                  std::string("expected integer field '") + key + "'");
  return j.at(key).get<int>();
}

// ---------------------------------------------------------------- models

/// "n=1,m=1" or {"n": 1, "m": 1}.
inline LocalModel model_from_string(const std::string& text) {
  const auto first = text.find_first_not_of(' ');
  if (first != std::string::npos && text[first] == '{') {
    const Json j = Json::parse(text);
    return LocalModel(int_field(j, "n"), int_field(j, "m"));
  }
  int n = -1, m = -1;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto eq = part.find('=');
    detail::require(eq != std::string::npos, "model-syntax", "expected n=<int>,m=<int>");
    std::string key = part.substr(0, eq);
    std::erase(key, ' ');
    int value = 0;
    try {
      value = std::stoi(part.substr(eq + 1));
    } catch (const std::exception&) {
      throw PreconditionError("model-syntax", "bad integer in '" + part + "'");
    }
    if (key == "n") n = value;
    else if (key == "m") m = value;
    else throw PreconditionError("model-syntax", "unknown model key '" + key + "'");
  }
  detail::require(n >= 0 && m >= 0, "model-syntax", "model needs both n and m");
  return LocalModel(n, m);
}

/// "x=u1,y=v1,z=w1"
inline AliasMap aliases_from_string(const std::string& text) {
  AliasMap out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::erase(part, ' ');
    if (part.empty()) continue;
    const auto eq = part.find('=');
    detail::require(eq != std::string::npos, "binding-syntax", "expected alias=variable in '" + part + "'");
    out[part.substr(0, eq)] = part.substr(eq + 1);
  }
  return out;
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::erase(part, ' ');
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

// ---------------------------------------------------------------- arcs

/// {"images": {"u1": "0", "v1": "t", ...}, "N": 16}; missing variables map to 0.
inline std::vector<PowerSeries> arc_images_from_json(const Json& j, const std::vector<std::string>& variables, int n,
                                                     const AliasMap& aliases = {}) {
  detail::require(j.contains("images") && j.at("images").is_object(), "json-schema", "arc needs an 'images' object");
  std::vector<PowerSeries> images(variables.size(), PowerSeries({"t"}, n));
  for (const auto& [name, expr] : j.at("images").items()) {
    std::string canonical = name;
    if (auto it = aliases.find(name); it != aliases.end()) canonical = it->second;
    auto pos = std::find(variables.begin(), variables.end(), canonical);
    detail::require(pos != variables.end(), "unknown-variable", "arc image for unknown variable '" + name + "'");
    detail::require(expr.is_string() || expr.is_number_integer(), "json-schema", "arc images are expression strings");
    const std::string text = expr.is_string() ? expr.get<std::string>() : expr.dump();
    images[static_cast<std::size_t>(pos - variables.begin())] = parse_series(text, {"t"}, n);
  }
  return images;
}

inline Json arc_images_to_json(const std::vector<std::string>& variables, const std::vector<PowerSeries>& images) {
  Json out = Json::object();
  for (std::size_t i = 0; i < variables.size(); ++i) out[variables[i]] = images[i].to_string();
  return out;
}

// ---------------------------------------------------------------- curves

inline ProjectivePoint point_from_json(const Json& j) {
  if (j.is_string() && (j.get<std::string>() == "inf" || j.get<std::string>() == "Infinity"))
    return ProjectivePoint::infinity();
  return ProjectivePoint::at(rational_from_json(j));
}

inline Json point_to_json(const ProjectivePoint& p) {
  if (p.infinite) return "inf";
  return rational_to_json(p.value);
}

/// {"nodes": [[0, 1], [2, 3]]}
inline RationalNodalCurve curve_from_json(const Json& j) {
  detail::require(j.contains("nodes") && j.at("nodes").is_array(), "json-schema", "curve needs a 'nodes' array");
  std::vector<RationalNodalCurve::Node> nodes;
  for (const auto& pair : j.at("nodes")) {
    detail::require(pair.is_array() && pair.size() == 2, "json-schema", "each node is a pair of points");
    nodes.emplace_back(point_from_json(pair[0]), point_from_json(pair[1]));
  }
  return RationalNodalCurve(std::move(nodes));
}

inline Json curve_to_json(const RationalNodalCurve& curve) {
  Json nodes = Json::array();
  for (const auto& [p, q] : curve.nodes()) nodes.push_back({point_to_json(p), point_to_json(q)});
  return {{"nodes", nodes}};
}

/// {"nonfree": [0], "dL": 0, "glue": {"1": 1}}
inline TFSheaf sheaf_from_json(const Json& j, const RationalNodalCurve& curve) {
  std::vector<int> nonfree;
  if (j.contains("nonfree")) nonfree = j.at("nonfree").get<std::vector<int>>();
  std::map<int, Rational> glue;
  if (j.contains("glue"))
    for (const auto& [key, value] : j.at("glue").items()) {
      int node = 0;
      try {
        node = std::stoi(key);
      } catch (const std::exception&) {
        throw PreconditionError("json-schema", "glue keys are node indices, got '" + key + "'");
      }
      glue[node] = rational_from_json(value);
    }
  return make_sheaf(curve, std::move(nonfree), int_field(j, "dL"), std::move(glue));
}

inline Json sheaf_to_json(const TFSheaf& sheaf) {
  Json glue = Json::object();
  for (const auto& [j, lambda] : sheaf.glue) glue[std::to_string(j)] = rational_to_json(lambda);
  return {{"nonfree", sheaf.nonfree}, {"dL", sheaf.line_degree}, {"glue", glue}};
}

inline TruncatedSeries series_from_json(const Json& j, int n) {
  detail::require(j.is_array(), "json-schema", "series are coefficient arrays [c0, c1, ...]");
  std::vector<Rational> coeffs;
  for (const auto& c : j) coeffs.push_back(rational_from_json(c));
  return TruncatedSeries(std::move(coeffs), n);
}

/// {"N": 16, "glue_series": {"0": ["1", "1"]}, "moving": [{"trajectory": ["3", "1"]}]}
/// Nodes without a glue_series entry keep their constant gluing.
inline SheafFamily family_from_json(const Json& j, const RationalNodalCurve& curve, const TFSheaf& sheaf, int n) {
  if (j.contains("N")) n = int_field(j, "N");
  SheafFamily family = constant_family(curve, sheaf, n);
  if (j.contains("glue_series"))
    for (const auto& [key, value] : j.at("glue_series").items()) {
      const int node = std::stoi(key);
      family.glue_series[node] = series_from_json(value, n);
    }
  if (j.contains("moving"))
    for (const auto& mp : j.at("moving")) {
      detail::require(mp.contains("trajectory"), "json-schema", "moving points need a 'trajectory'");
      const TruncatedSeries traj = series_from_json(mp.at("trajectory"), n);
      family.moving.push_back({traj[0], traj});
    }
  validate(curve, family);
  return family;
}

inline Json family_to_json(const SheafFamily& family) {
  Json glue = Json::object();
  for (const auto& [j, s] : family.glue_series) glue[std::to_string(j)] = s.to_strings();
  Json moving = Json::array();
  for (const auto& mp : family.moving) moving.push_back({{"trajectory", mp.trajectory.to_strings()}});
  return {{"N", family.precision}, {"glue_series", glue}, {"moving", moving}};
}

// ---------------------------------------------------------------- reports

inline Json hs_table_to_json(const HilbertSamuelTable& t) {
  Json out = {{"values", t.values}, {"stabilized", t.stabilized}};
  if (t.stabilized) {
    out["dimension"] = t.dimension;
    out["multiplicity"] = t.multiplicity;
    out["window_start"] = t.window_start;
  }
  return out;
}

inline Json theta_report_to_json(const ThetaReport& r) {
  Json out = {{"n", r.n},           {"h0", r.h0},
              {"h1", r.h1},         {"ord", r.ord},
              {"multJ", r.mult_j},  {"multTheta", r.mult_theta},
              {"onTheta", r.on_theta}, {"singular", r.singular}};
  if (r.exponents) out["exponents"] = *r.exponents;
  if (!r.random_family_orders.empty()) {
    Json orders = Json::array();
    for (const auto& o : r.random_family_orders) orders.push_back(order_to_json(o));
    out["random_family_orders"] = orders;
  }
  return out;
}

inline Json theta_class_to_json(const ThetaClass& c) {
  return {{"onTheta", c.on_theta}, {"inW1", c.in_w1}, {"inBoundary", c.in_boundary}, {"singular", c.singular}};
}

inline Json family_cohomology_to_json(const FamilyCohomology& fc) {
  Json exps = Json::array();
  for (const auto& e : fc.exponents) exps.push_back(order_to_json(e));
  Json aux = Json::array();
  for (const auto& p : fc.auxiliary) aux.push_back(rational_to_json(p));
  Json phi = Json::array();
  for (const auto& row : fc.phi) {
    Json r = Json::array();
    for (const auto& s : row) r.push_back(s.to_strings());
    phi.push_back(r);
  }
  Json out = {{"h0_rank", fc.h0_rank}, {"exponents", exps}, {"E", aux}, {"phi", phi}};
  if (fc.indeterminate()) out["theta_order"] = "IndeterminateAtTruncation";
  else out["theta_order"] = *fc.theta_order;
  return out;
}

} // namespace ntheta::io
