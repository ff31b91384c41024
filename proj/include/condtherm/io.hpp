#pragma once

#include <istream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "condtherm/core.hpp"
#include "condtherm/testkit.hpp"

namespace condtherm::io {

using Json = nlohmann::json;

/// Reads a JSON document, reporting the line of a syntax error.
inline Json read_json(std::istream& in, const std::string& name) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    fail(ErrorCode::ParseError, name + ":" + std::to_string(line) + ": " + e.what());
  }
}

inline Json parse_json(const std::string& text, const std::string& name = "<string>") {
  std::istringstream in(text);
  return read_json(in, name);
}

namespace detail {

inline void collect_numbers(const Json& node, bool& any_number, bool& any_string) {
  if (node.is_number()) any_number = true;
  if (node.is_string()) any_string = true;
  if (node.is_array() || node.is_object())
    for (const auto& child : node) collect_numbers(child, any_number, any_string);
}

}  // namespace detail

/// Rational mode is engaged when every numeric entry of the instance data is
/// written as a string ("a/b").
inline Mode detect_mode(const Json& doc) {
  bool any_number = false, any_string = false;
  for (const char* key : {"gibbs", "source", "target"})
    if (doc.contains(key)) detail::collect_numbers(doc[key], any_number, any_string);
  return (any_string && !any_number) ? Mode::Rational : Mode::Float;
}

/// Policy from the instance's "policy" object; the mode falls back to detect_mode.
inline NumericPolicy read_policy(const Json& doc) {
  NumericPolicy policy;
  policy.mode = detect_mode(doc);
  if (!doc.contains("policy")) return policy;
  const auto& p = doc["policy"];
  if (!p.is_object()) fail(ErrorCode::ValidationError, "\"policy\" must be an object");
  try {
    if (p.contains("mode")) {
      const auto mode = p["mode"].get<std::string>();
      if (mode == "float") {
        policy.mode = Mode::Float;
      } else if (mode == "rational") {
        policy.mode = Mode::Rational;
      } else {
        fail(ErrorCode::ValidationError, "policy.mode must be \"float\" or \"rational\"");
      }
    }
    if (p.contains("eps_cmp")) policy.eps_cmp = p["eps_cmp"].get<double>();
    if (p.contains("eps_lp")) policy.eps_lp = p["eps_lp"].get<double>();
    if (p.contains("eps_merge")) policy.eps_merge = p["eps_merge"].get<double>();
  } catch (const Json::exception& e) {
    fail(ErrorCode::ValidationError, std::string("policy: ") + e.what());
  }
  return policy;
}

template <class T>
T scalar_from_json(const Json& v, const std::string& where) {
  if (v.is_string()) {
    const Rational r = parse_rational(v.get<std::string>());
    if constexpr (is_exact_v<T>) {
      return r;
    } else {
      return to_double(r);
    }
  }
  if (v.is_number()) {
    if constexpr (is_exact_v<T>) {
      return parse_rational(v.dump());
    } else {
      return v.get<double>();
    }
  }
  fail(ErrorCode::ValidationError, where + ": expected a number or an \"a/b\" string");
}

template <class T>
Json scalar_to_json(const T& x) {
  if constexpr (is_exact_v<T>) {
    return format_scalar(x);
  } else {
    return x;
  }
}

template <class T>
std::vector<T> vector_from_json(const Json& v, const std::string& where) {
  if (!v.is_array()) fail(ErrorCode::ValidationError, where + ": expected an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(scalar_from_json<T>(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

template <class T>
Json vector_to_json(const std::vector<T>& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(scalar_to_json(x));
  return out;
}

template <class T>
Matrix<T> matrix_from_json(const Json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(ErrorCode::ValidationError, where + ": expected a non-empty array of rows");
  const auto first = vector_from_json<T>(v[0], where + "[0]");
  Matrix<T> m(v.size(), first.size());
  for (std::size_t r = 0; r < v.size(); ++r) {
    const auto row = vector_from_json<T>(v[r], where + "[" + std::to_string(r) + "]");
    if (row.size() != first.size()) fail(ErrorCode::ValidationError, where + ": ragged rows");
    for (std::size_t c = 0; c < row.size(); ++c) m(r, c) = row[c];
  }
  return m;
}

template <class T>
Json matrix_to_json(const Matrix<T>& m) {
  Json out = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(scalar_to_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

template <class T>
GibbsContext<T> context_from_json(const Json& doc, const NumericPolicy& policy) {
  if (!doc.contains("gibbs")) fail(ErrorCode::ValidationError, "missing \"gibbs\"");
  const auto& g = doc["gibbs"];
  if (!g.is_object()) fail(ErrorCode::ValidationError, "\"gibbs\" must be an object");
  if (g.contains("weights")) {
    return context_from_weights<T>(vector_from_json<T>(g["weights"], "gibbs.weights"), policy);
  }
  if (g.contains("energies")) {
    if constexpr (is_exact_v<T>) {
      fail(ErrorCode::ValidationError, "gibbs: rational mode needs explicit \"weights\" (exp(-beta E) is irrational)");
    } else {
      const double beta = g.contains("beta") ? scalar_from_json<double>(g["beta"], "gibbs.beta") : 1.0;
      return context_from_energies(vector_from_json<double>(g["energies"], "gibbs.energies"), beta, policy);
    }
  }
  fail(ErrorCode::ValidationError, "gibbs: needs \"weights\" or \"energies\"");
}

template <class T>
CQState<T> cq_from_json(const Json& v, const std::string& where) {
  if (!v.is_object() || !v.contains("columns"))
    fail(ErrorCode::ValidationError, where + ": expected {\"columns\": [...]}");
  const auto& cols = v["columns"];
  if (!cols.is_array() || cols.empty()) fail(ErrorCode::ValidationError, where + ".columns: expected a non-empty array");
  std::vector<StateVector<T>> out;
  for (std::size_t x = 0; x < cols.size(); ++x)
    out.emplace_back(vector_from_json<T>(cols[x], where + ".columns[" + std::to_string(x) + "]"));
  return CQState<T>(std::move(out));
}

template <class T>
Json cq_to_json(const CQState<T>& u) {
  Json cols = Json::array();
  for (const auto& c : u.columns()) cols.push_back(vector_to_json(c.values()));
  return Json{{"columns", std::move(cols)}};
}

template <class T>
struct ParsedInstance {
  GibbsContext<T> context;
  std::optional<CQState<T>> source;
  std::optional<CQState<T>> target;
};

/// Validated context and states. Missing required sections raise
/// ValidationError naming the section.
template <class T>
ParsedInstance<T> parse_instance(const Json& doc, NumericPolicy policy, bool need_source, bool need_target) {
  if (!doc.is_object()) fail(ErrorCode::ValidationError, "instance must be a JSON object");
  if constexpr (is_exact_v<T>) policy.mode = Mode::Rational;
  ParsedInstance<T> out;
  out.context = context_from_json<T>(doc, policy);
  auto read = [&](const char* key, bool needed, std::optional<CQState<T>>& slot) {
    if (!doc.contains(key)) {
      if (needed) fail(ErrorCode::ValidationError, std::string("missing \"") + key + "\"");
      return;
    }
    auto state = cq_from_json<T>(doc[key], key);
    try {
      validate_cq(state, out.context);
    } catch (const Error& e) {
      fail(ErrorCode::ValidationError, std::string(key) + ": " + e.what());
    }
    slot = canonicalize_cq(state, out.context.policy);
  };
  read("source", need_source, out.source);
  read("target", need_target, out.target);
  return out;
}

template <class T>
Json context_to_json(const GibbsContext<T>& ctx) {
  return Json{{"weights", vector_to_json(ctx.gibbs)}};
}

template <class T>
Json instance_to_json(const Instance<T>& inst) {
  Json out{{"gibbs", context_to_json(inst.context)},
           {"source", cq_to_json(inst.source)},
           {"target", cq_to_json(inst.target)}};
  out["policy"] = Json{{"mode", is_exact_v<T> ? "rational" : "float"}};
  return out;
}

/// {"R": [[...]], "T": {"x,y": [[...]]}} with 0-based x, y.
template <class T>
Json plan_to_json(const CTOPlan<T>& plan) {
  Json maps = Json::object();
  for (std::size_t x = 0; x < plan.sources(); ++x)
    for (std::size_t y = 0; y < plan.targets(); ++y)
      maps[std::to_string(x) + "," + std::to_string(y)] = matrix_to_json(plan.map(x, y).m);
  return Json{{"R", matrix_to_json(plan.control)}, {"T", std::move(maps)}};
}

template <class T>
CTOPlan<T> plan_from_json(const Json& doc, std::size_t d) {
  if (!doc.is_object() || !doc.contains("R") || !doc.contains("T"))
    fail(ErrorCode::ValidationError, "plan: expected {\"R\": ..., \"T\": ...}");
  CTOPlan<T> plan;
  plan.control = matrix_from_json<T>(doc["R"], "R");
  const auto& maps = doc["T"];
  if (!maps.is_object()) fail(ErrorCode::ValidationError, "plan.T must be an object keyed by \"x,y\"");
  plan.maps.assign(plan.sources() * plan.targets(), TOMatrix<T>::identity(d));
  for (auto it = maps.begin(); it != maps.end(); ++it) {
    const auto& key = it.key();
    const auto comma = key.find(',');
    std::size_t x = 0, y = 0;
    try {
      if (comma == std::string::npos) throw std::invalid_argument(key);
      x = std::stoul(key.substr(0, comma));
      y = std::stoul(key.substr(comma + 1));
    } catch (const std::exception&) {
      fail(ErrorCode::ValidationError, "plan.T: malformed key \"" + key + "\"");
    }
    if (x >= plan.sources() || y >= plan.targets())
      fail(ErrorCode::ValidationError, "plan.T: key \"" + key + "\" outside the control map");
    auto m = matrix_from_json<T>(it.value(), "T[" + key + "]");
    if (m.rows() != d || m.cols() != d) fail(ErrorCode::ValidationError, "plan.T[" + key + "]: wrong shape");
    plan.map(x, y) = TOMatrix<T>{std::move(m)};
  }
  return plan;
}

}  // namespace condtherm::io
