#pragma once

// JSON and CSV formats for measures, bodies, volumes and stability reports.

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "isozonoid/core.hpp"
#include "isozonoid/sphere_measures.hpp"
#include "isozonoid/stability_harness.hpp"
#include "isozonoid/zonoid_bodies.hpp"

namespace isozonoid::io {

using nlohmann::json;

inline json number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  return x;
}

inline double read_number(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "Infinity") return kInf;
    if (s == "-inf") return -kInf;
    throw Error(ErrorCode::InvalidArgument, "unrecognized number '" + s + "'");
  }
  require(j.is_number(), ErrorCode::InvalidArgument, "expected a number");
  return j.get<double>();
}

inline json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Vec vec_from_json(const json& j) {
  require(j.is_array() && !j.empty(), ErrorCode::InvalidArgument, "expected a nonempty array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = read_number(j[i]);
  return v;
}

// ---------------------------------------------------------------------------
// Measures: {"dim": n, "even": bool, "atoms": [{"u": [...], "c": w}, ...]}

inline json to_json(const AtomicMeasure& mu) {
  json atoms = json::array();
  for (const auto& a : mu.atoms()) atoms.push_back({{"u", to_json(a.u.coords())}, {"c", a.c}});
  return {{"dim", mu.dim()}, {"even", mu.even()}, {"atoms", atoms}};
}

inline AtomicMeasure measure_from_json(const json& j) {
  try {
    const int n = j.at("dim").get<int>();
    const bool even = j.value("even", true);
    std::vector<Atom> atoms;
    for (const auto& a : j.at("atoms")) {
      const Vec u = vec_from_json(a.at("u"));
      require(u.size() == n, ErrorCode::InvalidArgument, "atom dimension mismatch");
      atoms.push_back({SphereVector(u), read_number(a.at("c"))});
    }
    return AtomicMeasure(n, std::move(atoms), even);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed measure JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Bodies: {"dim": n, "kind": "V" | "H", "data": [[...], ...]}; H rows are [a_1, ..., a_n, b].

inline json to_json(const BodyRep& k) {
  require(k.is_polytope(), ErrorCode::InvalidArgument, "only polytopes serialize");
  json data = json::array();
  if (k.kind() == BodyKind::VRep) {
    for (const auto& v : k.vertices()) data.push_back(to_json(v));
    return {{"dim", k.dim()}, {"kind", "V"}, {"data", data}};
  }
  const auto [a, b] = k.halfspaces();
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    Vec row(a.cols() + 1);
    row << a.row(r).transpose(), b[r];
    data.push_back(to_json(row));
  }
  return {{"dim", k.dim()}, {"kind", "H"}, {"data", data}};
}

inline BodyRep body_from_json(const json& j) {
  try {
    const int n = j.at("dim").get<int>();
    const auto kind = j.at("kind").get<std::string>();
    const auto& data = j.at("data");
    require(data.is_array() && !data.empty(), ErrorCode::InvalidArgument, "body data must be a nonempty array");
    const bool sym = j.value("symmetric", true);
    if (kind == "V") {
      std::vector<Vec> v;
      for (const auto& row : data) {
        v.push_back(vec_from_json(row));
        require(v.back().size() == n, ErrorCode::InvalidArgument, "vertex dimension mismatch");
      }
      return BodyRep::from_vertices(v, sym);
    }
    if (kind == "H") {
      Mat a(static_cast<Eigen::Index>(data.size()), n);
      Vec b(static_cast<Eigen::Index>(data.size()));
      for (std::size_t r = 0; r < data.size(); ++r) {
        const Vec row = vec_from_json(data[r]);
        require(row.size() == n + 1, ErrorCode::InvalidArgument, "halfspace rows need n + 1 entries");
        a.row(static_cast<Eigen::Index>(r)) = row.head(n).transpose();
        b[static_cast<Eigen::Index>(r)] = row[n];
      }
      return BodyRep::from_halfspaces(a, b, sym);
    }
    throw Error(ErrorCode::InvalidArgument, "body kind must be \"V\" or \"H\"");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed body JSON: ") + e.what());
  }
}

inline json to_json(const VolumeResult& v) {
  return {{"value", v.value}, {"abs_error", v.abs_error}, {"method", to_string(v.method)}};
}

inline json read_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::InvalidArgument, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Stability reports

/// runtime_ms is left out unless asked for, so reruns produce identical bytes.
inline json to_json(const stability::StabilityReport& r, bool timing = false) {
  json j = {{"tag", r.tag},           {"label", r.label},         {"n", r.n},
            {"p", number(r.p)},       {"epsilon", number(r.epsilon)}, {"distance", r.distance},
            {"deficit", number(r.deficit)}, {"bound", number(r.bound)}, {"pass", r.pass},
            {"tolerance", number(r.tolerance)}, {"note", r.note}};
  if (timing) j["runtime_ms"] = r.runtime_ms;
  return j;
}

inline json to_json(const std::vector<stability::StabilityReport>& rows, bool timing = false) {
  json a = json::array();
  for (const auto& r : rows) a.push_back(to_json(r, timing));
  return a;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string csv_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

inline std::string to_csv(const std::vector<stability::StabilityReport>& rows, bool timing = false) {
  std::ostringstream s;
  s << "tag,label,n,p,epsilon,distance,deficit,bound,pass,tolerance," << (timing ? "runtime_ms," : "") << "note\n";
  for (const auto& r : rows) {
    s << csv_field(r.tag) << ',' << csv_field(r.label) << ',' << r.n << ',' << csv_number(r.p) << ','
      << csv_number(r.epsilon) << ',' << csv_field(r.distance) << ',' << csv_number(r.deficit) << ','
      << csv_number(r.bound) << ',' << (r.pass ? "true" : "false") << ',' << csv_number(r.tolerance) << ',';
    if (timing) s << csv_number(r.runtime_ms) << ',';
    s << csv_field(r.note) << '\n';
  }
  return s.str();
}

}  // namespace isozonoid::io
