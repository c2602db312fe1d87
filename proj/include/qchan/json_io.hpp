#pragma once

#include <cstdio>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qchan/channels.hpp"
#include "qchan/common.hpp"
#include "qchan/recovery.hpp"

namespace qchan::jsonio {

// ============================================================================
// File formats. Parsing goes through nlohmann::json for diagnostics; writing
// is direct so that identical inputs always produce identical bytes, with
// doubles printed to 17 significant digits.
// ============================================================================

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

// ----------------------------------------------------------------------------
// Writers
// ----------------------------------------------------------------------------

/// {"rows": r, "cols": c, "entries": [[re, im], ...]} with row-major entries.
inline std::string matrix_to_json(const Matrix& m) {
  std::ostringstream os;
  os << "{\"rows\": " << m.rows() << ", \"cols\": " << m.cols()
     << ", \"entries\": [";
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (r != 0 || c != 0) os << ", ";
      os << '[' << format_double(m(r, c).real()) << ", "
         << format_double(m(r, c).imag()) << ']';
    }
  os << "]}";
  return os.str();
}

inline std::string kraus_to_json(const KrausSet& k) {
  std::ostringstream os;
  os << "{\"dim_in\": " << k.dim_in << ", \"dim_out\": " << k.dim_out
     << ", \"operators\": [";
  for (std::size_t i = 0; i < k.operators.size(); ++i) {
    if (i) os << ", ";
    os << matrix_to_json(k.operators[i]);
  }
  os << "], \"label\": \"" << escape(k.label) << "\"}";
  return os.str();
}

// ----------------------------------------------------------------------------
// Parsers
// ----------------------------------------------------------------------------

inline Matrix parse_matrix(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") ||
      !j.contains("entries"))
    throw MalformedInput("matrix: expected object with rows, cols, entries");
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  if (rows < 1 || cols < 1) throw MalformedInput("matrix: non-positive dimensions");
  const auto& entries = j.at("entries");
  if (!entries.is_array() ||
      static_cast<Eigen::Index>(entries.size()) != rows * cols)
    throw MalformedInput("matrix: entries length != rows*cols");
  Matrix m(rows, cols);
  Eigen::Index idx = 0;
  for (const auto& e : entries) {
    if (!e.is_array() || e.size() != 2)
      throw MalformedInput("matrix: entry " + std::to_string(idx) +
                           " is not [re, im]");
    m(idx / cols, idx % cols) = Complex(e[0].get<double>(), e[1].get<double>());
    ++idx;
  }
  if (!all_finite(m)) throw MalformedInput("matrix: non-finite entry");
  return m;
}

inline KrausSet parse_kraus(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("operators"))
    throw MalformedInput("kraus set: expected object with operators");
  std::vector<Matrix> ops;
  for (const auto& op : j.at("operators")) ops.push_back(parse_matrix(op));
  if (ops.empty()) throw MalformedInput("kraus set: empty operator list");
  KrausSet set = make_kraus(std::move(ops), j.value("label", std::string{}));
  if (j.contains("dim_in") && j.at("dim_in").get<int>() != set.dim_in)
    throw MalformedInput("kraus set: dim_in field disagrees with operators");
  if (j.contains("dim_out") && j.at("dim_out").get<int>() != set.dim_out)
    throw MalformedInput("kraus set: dim_out field disagrees with operators");
  set.non_trace_preserving = j.value("non_trace_preserving", false);
  return set;
}

/// {"n_sys": ..., "n_anc": ..., "projector": matrix, "encoder": matrix,
///  "description": "..."}
inline CodeSpec parse_code(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n_sys") || !j.contains("n_anc") ||
      !j.contains("projector") || !j.contains("encoder"))
    throw MalformedInput("code: expected n_sys, n_anc, projector, encoder");
  CodeSpec code;
  code.n_sys = j.at("n_sys").get<int>();
  code.n_anc = j.at("n_anc").get<int>();
  code.projector = parse_matrix(j.at("projector"));
  code.encoder = parse_matrix(j.at("encoder"));
  code.description = j.value("description", std::string{});
  code.validate();
  return code;
}

}  // namespace qchan::jsonio
