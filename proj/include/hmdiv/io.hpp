#pragma once

// JSON serialization of shapes, states and hypergraphs.
//
// State:      {"shape": {"sizes": [2,2], "kinds": ["quantum","quantum"]},
//              "matrix": [[[re,im], ...], ...]}   or  "probabilities": [...]
// Hypergraph: {"N": 3, "generators": [[0,1],[1,2]]}  or  {"N": 3, "sets": [[], [0], ...]}
// Unit indices are 0-based.

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "hmdiv/errors.hpp"
#include "hmdiv/hierarchy.hpp"
#include "hmdiv/shape.hpp"
#include "hmdiv/state.hpp"

namespace hmdiv {

using Json = nlohmann::json;

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

namespace detail {

inline const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(where + ": missing \"" + key + "\"");
  return j.at(key);
}

inline double number_at(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  return j.get<double>();
}

inline int int_at(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ParseError(where + ": expected an integer");
  return j.get<int>();
}

}  // namespace detail

inline UnitKind parse_kind(const std::string& s) {
  if (s == "classical" || s == "c") return UnitKind::classical;
  if (s == "quantum" || s == "q") return UnitKind::quantum;
  throw ParseError("unknown unit kind '" + s + "' (expected classical or quantum)");
}

inline SystemShape shape_from_json(const Json& j, const std::string& where = "shape") {
  const Json& sizes = detail::require(j, "sizes", where);
  if (!sizes.is_array() || sizes.empty()) throw ParseError(where + ".sizes: expected a non-empty array");
  std::vector<int> n;
  for (std::size_t i = 0; i < sizes.size(); ++i)
    n.push_back(detail::int_at(sizes[i], where + ".sizes[" + std::to_string(i) + "]"));
  std::vector<UnitKind> kinds;
  if (j.contains("kinds")) {
    const Json& k = j.at("kinds");
    if (k.is_string()) {
      kinds.assign(n.size(), parse_kind(k.get<std::string>()));
    } else {
      if (!k.is_array()) throw ParseError(where + ".kinds: expected an array or a string");
      for (std::size_t i = 0; i < k.size(); ++i) {
        if (!k[i].is_string()) throw ParseError(where + ".kinds[" + std::to_string(i) + "]: expected a string");
        kinds.push_back(parse_kind(k[i].get<std::string>()));
      }
    }
  } else {
    kinds.assign(n.size(), UnitKind::quantum);
  }
  try {
    return SystemShape(n, kinds);
  } catch (const InvalidArgument& e) {
    throw ParseError(where + ": " + e.what());
  }
}

inline Json shape_to_json(const SystemShape& s) {
  Json kinds = Json::array();
  for (UnitKind k : s.kinds()) kinds.push_back(to_string(k));
  return Json{{"sizes", s.sizes()}, {"kinds", kinds}};
}

/// "2,2,2" with one kind for every unit.
inline SystemShape parse_shape_list(const std::string& list, UnitKind kind) {
  std::vector<int> sizes;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      sizes.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError("shape '" + list + "': '" + item + "' is not an integer");
    }
  }
  if (sizes.empty()) throw ParseError("shape '" + list + "' is empty");
  try {
    return SystemShape(sizes, std::vector<UnitKind>(sizes.size(), kind));
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("shape: ") + e.what());
  }
}

inline Json matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

/// Entries may be [re, im] pairs or plain real numbers.
inline CMatrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ParseError(where + ": expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array()) throw ParseError(where + "[0]: expected a row array");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::string rw = where + "[" + std::to_string(r) + "]";
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ParseError(rw + ": expected " + std::to_string(cols) + " entries");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const std::string ew = rw + "[" + std::to_string(c) + "]";
      const Json& e = row[static_cast<std::size_t>(c)];
      if (e.is_array()) {
        if (e.size() != 2) throw ParseError(ew + ": expected [re, im]");
        m(r, c) = cplx(detail::number_at(e[0], ew + "[0]"), detail::number_at(e[1], ew + "[1]"));
      } else {
        m(r, c) = detail::number_at(e, ew);
      }
    }
  }
  return m;
}

inline DensityMatrix state_from_json(const Json& j) {
  const SystemShape shape = shape_from_json(detail::require(j, "shape", "state"), "state.shape");
  if (j.contains("probabilities")) {
    const Json& p = j.at("probabilities");
    if (!p.is_array()) throw ParseError("state.probabilities: expected an array");
    if (!shape.all_classical()) throw InvalidState("state.probabilities requires all units to be classical");
    std::vector<double> v;
    for (std::size_t i = 0; i < p.size(); ++i)
      v.push_back(detail::number_at(p[i], "state.probabilities[" + std::to_string(i) + "]"));
    return DensityMatrix::from_probabilities(shape, v);
  }
  if (j.contains("matrix")) return DensityMatrix(shape, matrix_from_json(j.at("matrix"), "state.matrix"));
  throw ParseError("state: needs \"matrix\" or \"probabilities\"");
}

inline Json state_to_json(const DensityMatrix& rho) {
  Json j{{"shape", shape_to_json(rho.shape())}};
  if (rho.shape().all_classical()) {
    std::vector<double> p(rho.dim());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = rho.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    j["probabilities"] = p;
  } else {
    j["matrix"] = matrix_to_json(rho.matrix());
  }
  return j;
}

inline DensityMatrix read_state(const std::string& path) {
  const Json j = read_json_file(path);
  try {
    return state_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline Hypergraph hypergraph_from_json(const Json& j) {
  const int n = detail::int_at(detail::require(j, "N", "hypergraph"), "hypergraph.N");
  const bool gens = j.contains("generators");
  if (gens == j.contains("sets")) throw ParseError("hypergraph: give exactly one of \"generators\" and \"sets\"");
  const char* key = gens ? "generators" : "sets";
  const Json& list = j.at(key);
  if (!list.is_array()) throw ParseError(std::string("hypergraph.") + key + ": expected an array");
  std::vector<std::vector<int>> sets;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = std::string("hypergraph.") + key + "[" + std::to_string(i) + "]";
    if (!list[i].is_array()) throw ParseError(where + ": expected an array of unit indices");
    std::vector<int> s;
    for (std::size_t k = 0; k < list[i].size(); ++k)
      s.push_back(detail::int_at(list[i][k], where + "[" + std::to_string(k) + "]"));
    sets.push_back(std::move(s));
  }
  return validate_hypergraph(n, sets, gens);
}

inline Json hypergraph_to_json(const Hypergraph& u) {
  Json sets = Json::array();
  for (UnitSet v : u.sets()) sets.push_back(v.members());
  return Json{{"N", u.units()}, {"sets", sets}};
}

inline Hypergraph read_hypergraph(const std::string& path) {
  const Json j = read_json_file(path);
  try {
    return hypergraph_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << text;
}

}  // namespace hmdiv
