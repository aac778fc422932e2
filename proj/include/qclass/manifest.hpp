#pragma once

// JSON manifests and reports for the qclass tool.
//
// A manifest declares one Q-manifold (a builder or an explicit chart plus the
// components of Q), named connections and an ordered task list. Reports
// serialize tensors as sparse lists of [index-tuple, expression] pairs, with
// indices given by coordinate name, so every value can be parsed back.

#include "qclass/cohomology.hpp"
#include "qclass/expression.hpp"

#include "json.hpp"

#include <fstream>
#include <future>
#include <set>

namespace qclass {

using Json = nlohmann::ordered_json;

/// Load-time failure, located by a dotted path into the manifest.
class manifest_error : public std::runtime_error {
 public:
  manifest_error(const std::string& path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// ---------------------------------------------------------------------------
// Tensor <-> JSON

inline Json tensor_to_json(const TensorField& t) {
  const Chart& ch = *t.chart();
  Json comps = Json::array();
  for (const auto& [k, f] : t.components()) {
    Json idx = Json::array();
    for (auto i : k) idx.push_back(ch[i].name);
    comps.push_back(Json::array({std::move(idx), to_expression(f)}));
  }
  return Json{{"upper", t.n_upper()}, {"lower", t.m_lower()}, {"parity", to_string(t.parity())}, {"components", comps}};
}

inline Parity parse_parity(const Json& j, const std::string& path) {
  if (!j.is_string()) throw manifest_error(path, "parity must be \"even\" or \"odd\"");
  const auto s = j.get<std::string>();
  if (s == "even") return Parity::even;
  if (s == "odd") return Parity::odd;
  throw manifest_error(path, "parity must be \"even\" or \"odd\", got \"" + s + "\"");
}

inline SuperPolynomial parse_expression_at(const Json& j, const ChartPtr& chart, const std::string& path) {
  if (!j.is_string()) throw manifest_error(path, "expected an expression string");
  try {
    return parse_expression(j.get<std::string>(), chart);
  } catch (const parse_error& e) {
    throw manifest_error(path, e.what());
  } catch (const algebra_error& e) {
    throw manifest_error(path, e.what());
  }
}

inline std::uint8_t coordinate_at(const Json& j, const Chart& chart, const std::string& path) {
  if (!j.is_string()) throw manifest_error(path, "expected a coordinate name");
  const auto name = j.get<std::string>();
  const auto idx = chart.index_of(name);
  if (!idx) throw manifest_error(path, "unknown coordinate '" + name + "'");
  return static_cast<std::uint8_t>(*idx);
}

inline TensorField tensor_from_json(const Json& j, const ChartPtr& chart, const std::string& path = "tensor") {
  if (!j.is_object() || !j.contains("upper") || !j.contains("lower") || !j.contains("parity") ||
      !j.contains("components"))
    throw manifest_error(path, "tensor needs upper, lower, parity and components");
  const auto n = j.at("upper").get<unsigned>(), m = j.at("lower").get<unsigned>();
  TensorField t(chart, n, m, parse_parity(j.at("parity"), path + ".parity"));
  const auto& comps = j.at("components");
  for (std::size_t c = 0; c < comps.size(); ++c) {
    const std::string at = path + ".components[" + std::to_string(c) + "]";
    const auto& entry = comps[c];
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_array())
      throw manifest_error(at, "expected [index-tuple, expression]");
    IndexKey key;
    for (std::size_t s = 0; s < entry[0].size(); ++s)
      key.push_back(coordinate_at(entry[0][s], *chart, at + ".index[" + std::to_string(s) + "]"));
    if (key.size() != n + m) throw manifest_error(at, "index tuple has the wrong length");
    if (t.components().count(key)) throw manifest_error(at, "duplicate component");
    try {
      t.set(key, parse_expression_at(entry[1], chart, at));
    } catch (const algebra_error& e) {
      throw manifest_error(at, e.what());
    }
  }
  return t;
}

inline Json chart_to_json(const Chart& chart) {
  Json out = Json::array();
  for (const auto& c : chart.coordinates()) out.push_back(Json{{"name", c.name}, {"parity", to_string(c.parity)}});
  return out;
}

inline ChartPtr chart_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw manifest_error(path, "chart must be a non-empty list of coordinates");
  std::vector<Coordinate> coords;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string at = path + "[" + std::to_string(i) + "]";
    const auto& c = j[i];
    if (!c.is_object() || !c.contains("name") || !c.contains("parity") || !c.at("name").is_string())
      throw manifest_error(at, "coordinate needs a name and a parity");
    const auto name = c.at("name").get<std::string>();
    if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_') ||
        !std::all_of(name.begin(), name.end(), [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; }))
      throw manifest_error(at, "invalid coordinate name '" + name + "'");
    coords.push_back({name, parse_parity(c.at("parity"), at + ".parity")});
  }
  try {
    return make_chart(std::move(coords));
  } catch (const algebra_error& e) {
    throw manifest_error(path, e.what());
  }
}

// ---------------------------------------------------------------------------
// Manifest

enum class TaskKind { check_q, verify_relations, compute, exactness, transgression, cohomology_dims };

inline std::string to_string(TaskKind k) {
  switch (k) {
    case TaskKind::check_q: return "check-q";
    case TaskKind::verify_relations: return "verify-relations";
    case TaskKind::compute: return "compute";
    case TaskKind::exactness: return "exactness";
    case TaskKind::transgression: return "transgression";
    case TaskKind::cohomology_dims: return "cohomology-dims";
  }
  return "?";
}

struct ExactnessTarget {
  enum class Source { last_result, q, expression };
  Source source = Source::last_result;
  SuperPolynomial expression;
};

struct Task {
  TaskKind kind = TaskKind::check_q;
  std::string label;
  Series series = Series::C;
  unsigned order = 1;
  std::vector<std::string> connections;
  // verify-relations
  unsigned endomorphisms = 0;
  std::uint64_t seed = 0;
  // exactness
  ExactnessTarget target;
  unsigned degree_bound = 2;
  std::size_t max_unknowns = 200000;
  std::optional<bool> expect_exact;
  std::optional<std::size_t> depends_on;  // task whose value is the target
  // cohomology-dims
  std::optional<std::vector<std::size_t>> expect_dims;
};

struct Manifest {
  std::string name;
  ModelDescriptor model;
  std::string model_source;  // builder name or "chart"
  std::vector<std::pair<std::string, Connection>> connections;
  std::vector<Task> tasks;

  const Connection& connection(const std::string& name) const {
    for (const auto& [n, c] : connections)
      if (n == name) return c;
    throw manifest_error("connections", "unknown connection '" + name + "'");
  }
};

namespace detail {

inline void allow_keys(const Json& j, const std::string& path, std::initializer_list<std::string_view> keys) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
      throw manifest_error(path, "unknown field '" + it.key() + "'");
}

inline const Json& require(const Json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw manifest_error(path, "missing field '" + key + "'");
  return j.at(key);
}

template <class T>
T get_number(const Json& j, const std::string& path, T lo, T hi) {
  if (!j.is_number_integer()) throw manifest_error(path, "expected an integer");
  const auto v = j.get<long long>();
  if (v < static_cast<long long>(lo) || v > static_cast<long long>(hi))
    throw manifest_error(path, "value " + std::to_string(v) + " out of range [" + std::to_string(lo) + ", " +
                                   std::to_string(hi) + "]");
  return static_cast<T>(v);
}

inline std::uint64_t get_seed(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    throw manifest_error(path, "seed must be a non-negative integer");
  return j.get<std::uint64_t>();
}

inline Rational parse_constant(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  auto chart = make_chart({});
  auto f = parse_expression_at(j, chart, path);
  if (f.is_zero()) return 0;
  return f.constant_term();
}

inline std::string describe_nonzero(const TensorField& t) {
  std::string out;
  const Chart& ch = *t.chart();
  for (const auto& [k, f] : t.components()) {
    out += "\n  [Q,Q]^{";
    for (std::size_t s = 0; s < k.size(); ++s) out += (s ? "," : "") + ch[k[s]].name;
    out += "} = " + to_expression(f);
  }
  return out;
}

inline ModelDescriptor load_model(const Json& doc, std::string& source) {
  if (doc.contains("model")) {
    if (doc.contains("chart") || doc.contains("q")) throw manifest_error("model", "give either a builder or chart + q, not both");
    const auto& m = doc.at("model");
    if (!m.is_object()) throw manifest_error("model", "expected an object");
    const auto& b = require(m, "builder", "model");
    if (!b.is_string()) throw manifest_error("model.builder", "expected a string");
    source = b.get<std::string>();
    try {
      if (source == "odd-tangent") {
        allow_keys(m, "model", {"builder", "dim"});
        return build_odd_tangent(get_number<unsigned>(require(m, "dim", "model"), "model.dim", 1, kMaxCoordinates / 2));
      }
      if (source == "chevalley-eilenberg") {
        allow_keys(m, "model", {"builder", "dim", "structure_constants"});
        const auto dim = get_number<std::size_t>(require(m, "dim", "model"), "model.dim", 1, kMaxCoordinates);
        std::vector<StructureConstant> consts;
        if (m.contains("structure_constants")) {
          const auto& list = m.at("structure_constants");
          if (!list.is_array()) throw manifest_error("model.structure_constants", "expected a list");
          for (std::size_t e = 0; e < list.size(); ++e) {
            const std::string at = "model.structure_constants[" + std::to_string(e) + "]";
            const auto& s = list[e];
            if (!s.is_object()) throw manifest_error(at, "expected {k, i, j, value}");
            allow_keys(s, at, {"k", "i", "j", "value"});
            consts.push_back({get_number<std::size_t>(require(s, "k", at), at + ".k", 1, dim) - 1,
                              get_number<std::size_t>(require(s, "i", at), at + ".i", 1, dim) - 1,
                              get_number<std::size_t>(require(s, "j", at), at + ".j", 1, dim) - 1,
                              parse_constant(require(s, "value", at), at + ".value")});
          }
        }
        return build_chevalley_eilenberg(dim, consts);
      }
      if (source == "lie-algebroid") {
        allow_keys(m, "model", {"builder", "base_dim", "fiber_dim", "anchor", "structure"});
        const auto base = get_number<std::size_t>(require(m, "base_dim", "model"), "model.base_dim", 0, kMaxCoordinates);
        const auto fiber =
            get_number<std::size_t>(require(m, "fiber_dim", "model"), "model.fiber_dim", 1, kMaxCoordinates - base);
        auto chart = lie_algebroid_chart(base, fiber);
        const SuperPolynomial zero(chart);
        std::vector<std::vector<SuperPolynomial>> anchor(fiber, std::vector<SuperPolynomial>(base, zero));
        std::vector<std::vector<std::vector<SuperPolynomial>>> structure(
            fiber, std::vector<std::vector<SuperPolynomial>>(fiber, std::vector<SuperPolynomial>(fiber, zero)));
        if (m.contains("anchor")) {
          const auto& list = m.at("anchor");
          if (!list.is_array()) throw manifest_error("model.anchor", "expected a list");
          for (std::size_t e = 0; e < list.size(); ++e) {
            const std::string at = "model.anchor[" + std::to_string(e) + "]";
            allow_keys(list[e], at, {"a", "i", "value"});
            const auto a = get_number<std::size_t>(require(list[e], "a", at), at + ".a", 1, fiber) - 1;
            const auto i = get_number<std::size_t>(require(list[e], "i", at), at + ".i", 1, base) - 1;
            anchor[a][i] = parse_expression_at(require(list[e], "value", at), chart, at + ".value");
          }
        }
        if (m.contains("structure")) {
          const auto& list = m.at("structure");
          if (!list.is_array()) throw manifest_error("model.structure", "expected a list");
          std::set<std::tuple<std::size_t, std::size_t, std::size_t>> given;
          for (std::size_t e = 0; e < list.size(); ++e) {
            const std::string at = "model.structure[" + std::to_string(e) + "]";
            allow_keys(list[e], at, {"c", "a", "b", "value"});
            const auto c = get_number<std::size_t>(require(list[e], "c", at), at + ".c", 1, fiber) - 1;
            const auto a = get_number<std::size_t>(require(list[e], "a", at), at + ".a", 1, fiber) - 1;
            const auto b = get_number<std::size_t>(require(list[e], "b", at), at + ".b", 1, fiber) - 1;
            auto v = parse_expression_at(require(list[e], "value", at), chart, at + ".value");
            if (a == b && !v.is_zero()) throw manifest_error(at, "antisymmetry violated: C^c_{aa} must vanish");
            if ((given.count({c, a, b}) && !(structure[c][a][b] == v)) || (given.count({c, b, a}) && !(structure[c][b][a] == -v)))
              throw manifest_error(at, "antisymmetry violated: conflicting entries");
            given.insert({c, a, b});
            structure[c][b][a] = -v;
            structure[c][a][b] = std::move(v);
          }
        }
        return build_lie_algebroid(chart, base, anchor, structure);
      }
    } catch (const model_error& e) {
      std::string msg = e.what();
      if (!e.witness().is_zero()) msg += "; nonzero components:" + describe_nonzero(e.witness());
      throw manifest_error("model", msg);
    }
    throw manifest_error("model.builder", "unknown builder '" + source + "'");
  }
  source = "chart";
  auto chart = chart_from_json(require(doc, "chart", ""), "chart");
  for (const auto& c : chart->coordinates())
    if (is_reserved_name(c.name)) throw manifest_error("chart", "coordinate name '" + c.name + "' uses the reserved prefix '__'");
  const auto& qj = require(doc, "q", "");
  if (!qj.is_object()) throw manifest_error("q", "expected a map from coordinate name to expression");
  TensorField q(chart, 1, 0, Parity::odd);
  for (auto it = qj.begin(); it != qj.end(); ++it) {
    const std::string at = "q." + it.key();
    const auto idx = coordinate_at(Json(it.key()), *chart, at);
    auto v = parse_expression_at(it.value(), chart, at);
    try {
      q.set({idx}, std::move(v));
    } catch (const algebra_error&) {
      throw manifest_error(at, "Q must be odd: the coefficient of d/d" + it.key() + " must have parity " +
                                   to_string(chart->parity(idx) + Parity::odd));
    }
  }
  auto check = check_homological(q);
  if (!check.ok()) throw manifest_error("q", "[Q,Q] does not vanish; nonzero components:" + describe_nonzero(check.self_bracket));
  return build_custom(q, "explicit chart");
}

inline Connection load_connection(const Json& j, const ChartPtr& chart, const std::string& path) {
  if (j.is_string()) {
    if (j.get<std::string>() != "flat") throw manifest_error(path, "the only literal connection is \"flat\"");
    return Connection::trivial(chart);
  }
  if (!j.is_object()) throw manifest_error(path, "expected \"flat\", {\"christoffel\": [...]} or {\"random\": {...}}");
  if (j.contains("random")) {
    allow_keys(j, path, {"random"});
    const auto& r = j.at("random");
    const std::string at = path + ".random";
    if (!r.is_object()) throw manifest_error(at, "expected an object");
    allow_keys(r, at, {"seed", "max_degree", "max_terms", "max_coeff", "density"});
    RandomConnectionOptions opt;
    const auto seed = get_seed(require(r, "seed", at), at + ".seed");
    if (r.contains("max_degree")) opt.max_degree = get_number<unsigned>(r.at("max_degree"), at + ".max_degree", 0, 8);
    if (r.contains("max_terms")) opt.max_terms = get_number<unsigned>(r.at("max_terms"), at + ".max_terms", 1, 16);
    if (r.contains("max_coeff")) opt.max_coeff = get_number<int>(r.at("max_coeff"), at + ".max_coeff", 1, 1000);
    if (r.contains("density")) {
      const auto& d = r.at("density");
      if (!d.is_array() || d.size() != 2) throw manifest_error(at + ".density", "expected [numerator, denominator]");
      opt.density_den = get_number<int>(d[1], at + ".density[1]", 1, 1000);
      opt.density_num = get_number<int>(d[0], at + ".density[0]", 0, opt.density_den);
    }
    return random_connection(chart, seed, opt);
  }
  allow_keys(j, path, {"christoffel"});
  const auto& list = require(j, "christoffel", path);
  if (!list.is_array()) throw manifest_error(path + ".christoffel", "expected a list of {k, i, j, value}");
  const std::size_t n = chart->dim();
  Connection::Table g(n, std::vector<std::vector<SuperPolynomial>>(n, std::vector<SuperPolynomial>(n, SuperPolynomial(chart))));
  std::map<std::tuple<int, int, int>, std::string> given;
  const Chart& ch = *chart;
  for (std::size_t e = 0; e < list.size(); ++e) {
    const std::string at = path + ".christoffel[" + std::to_string(e) + "]";
    const auto& entry = list[e];
    if (!entry.is_object()) throw manifest_error(at, "expected {k, i, j, value}");
    allow_keys(entry, at, {"k", "i", "j", "value"});
    const auto k = coordinate_at(require(entry, "k", at), ch, at + ".k");
    const auto i = coordinate_at(require(entry, "i", at), ch, at + ".i");
    const auto jj = coordinate_at(require(entry, "j", at), ch, at + ".j");
    auto v = parse_expression_at(require(entry, "value", at), chart, at + ".value");
    const std::string where = "(" + ch[k].name + "," + ch[i].name + "," + ch[jj].name + ")";
    const Parity expected = ch.parity(k) + ch.parity(i) + ch.parity(jj);
    if (!v.is_zero() && poly_parity(v) != expected)
      throw manifest_error(at, "Christoffel symbol " + where + " violates the parity rule: expected " + to_string(expected));
    const bool swap_odd = koszul(ch.parity(i), ch.parity(jj)) < 0;
    if (i == jj && swap_odd && !v.is_zero())
      throw manifest_error(at, "Christoffel symbol " + where + " violates graded symmetry: it must vanish");
    const auto partner = swap_odd ? -v : v;
    if (given.count({k, i, jj}) && !(g[k][i][jj] == v))
      throw manifest_error(at, "Christoffel symbol " + where + " given twice with different values");
    if (given.count({k, jj, i}) && !(g[k][jj][i] == partner))
      throw manifest_error(at, "Christoffel symbol " + where + " violates graded symmetry against " + given.at({k, jj, i}));
    given[{k, i, jj}] = at;
    g[k][jj][i] = partner;
    g[k][i][jj] = std::move(v);
  }
  try {
    return Connection(chart, std::move(g));
  } catch (const algebra_error& e) {
    throw manifest_error(path, e.what());
  }
}

inline unsigned load_order(const Json& t, const std::string& at, Series s) {
  const unsigned lo = (s == Series::C || s == Series::P || s == Series::Qpow) ? 1u : 0u;
  return get_number<unsigned>(require(t, "order", at), at + ".order", lo, 64);
}

inline Series load_series(const Json& t, const std::string& at) {
  const auto& s = require(t, "series", at);
  if (!s.is_string()) throw manifest_error(at + ".series", "expected a series name");
  auto r = parse_series(s.get<std::string>());
  if (!r) throw manifest_error(at + ".series", "unknown series '" + s.get<std::string>() + "' (A, B, C, P, Qpow)");
  return *r;
}

inline Task load_task(const Json& t, const std::string& at, const Manifest& m, std::optional<std::size_t> last_value) {
  if (!t.is_object()) throw manifest_error(at, "expected a task object");
  const auto& kind_j = require(t, "kind", at);
  if (!kind_j.is_string()) throw manifest_error(at + ".kind", "expected a string");
  const auto kind = kind_j.get<std::string>();
  Task task;
  if (t.contains("label")) {
    if (!t.at("label").is_string()) throw manifest_error(at + ".label", "expected a string");
    task.label = t.at("label").get<std::string>();
  }
  auto connection_name = [&](const Json& j, const std::string& p) {
    if (!j.is_string()) throw manifest_error(p, "expected a connection name");
    const auto name = j.get<std::string>();
    try {
      (void)m.connection(name);
    } catch (const manifest_error&) {
      throw manifest_error(p, "unknown connection '" + name + "'");
    }
    return name;
  };
  if (kind == "check-q") {
    allow_keys(t, at, {"kind", "label"});
    task.kind = TaskKind::check_q;
  } else if (kind == "verify-relations") {
    allow_keys(t, at, {"kind", "label", "connection", "endomorphisms", "seed"});
    task.kind = TaskKind::verify_relations;
    task.connections.push_back(connection_name(require(t, "connection", at), at + ".connection"));
    if (t.contains("endomorphisms")) task.endomorphisms = get_number<unsigned>(t.at("endomorphisms"), at + ".endomorphisms", 0, 1000);
    if (task.endomorphisms > 0) task.seed = get_seed(require(t, "seed", at), at + ".seed");
  } else if (kind == "compute") {
    allow_keys(t, at, {"kind", "label", "series", "order", "connection"});
    task.kind = TaskKind::compute;
    task.series = load_series(t, at);
    task.order = load_order(t, at, task.series);
    if (task.series == Series::Qpow) {
      if (t.contains("connection")) task.connections.push_back(connection_name(t.at("connection"), at + ".connection"));
    } else {
      task.connections.push_back(connection_name(require(t, "connection", at), at + ".connection"));
    }
  } else if (kind == "exactness") {
    allow_keys(t, at, {"kind", "label", "target", "degree_bound", "max_unknowns", "expect"});
    task.kind = TaskKind::exactness;
    const auto& target = require(t, "target", at);
    if (target.is_string() && target.get<std::string>() == "last-result") {
      task.target.source = ExactnessTarget::Source::last_result;
      if (!last_value) throw manifest_error(at + ".target", "no earlier compute task to take the last result from");
      task.depends_on = last_value;
    } else if (target.is_string() && target.get<std::string>() == "q") {
      task.target.source = ExactnessTarget::Source::q;
    } else if (target.is_object() && target.contains("expression")) {
      allow_keys(target, at + ".target", {"expression"});
      task.target.source = ExactnessTarget::Source::expression;
      task.target.expression = parse_expression_at(target.at("expression"), m.model.chart(), at + ".target.expression");
      if (!poly_parity(task.target.expression))
        throw manifest_error(at + ".target.expression", "target must have a definite parity");
    } else {
      throw manifest_error(at + ".target", "expected \"last-result\", \"q\" or {\"expression\": ...}");
    }
    if (t.contains("degree_bound")) task.degree_bound = get_number<unsigned>(t.at("degree_bound"), at + ".degree_bound", 0, 64);
    if (t.contains("max_unknowns"))
      task.max_unknowns = get_number<std::size_t>(t.at("max_unknowns"), at + ".max_unknowns", 1, 100000000);
    if (t.contains("expect")) {
      const auto& e = t.at("expect");
      if (e == "exact") task.expect_exact = true;
      else if (e == "not-exact") task.expect_exact = false;
      else throw manifest_error(at + ".expect", "expected \"exact\" or \"not-exact\"");
    }
  } else if (kind == "transgression") {
    allow_keys(t, at, {"kind", "label", "series", "order", "connections"});
    task.kind = TaskKind::transgression;
    task.series = load_series(t, at);
    if (task.series == Series::A) throw manifest_error(at + ".series", "transgression is not available for the A series");
    task.order = load_order(t, at, task.series);
    const auto& pair = require(t, "connections", at);
    if (!pair.is_array() || pair.size() != 2) throw manifest_error(at + ".connections", "expected [from, to]");
    task.connections.push_back(connection_name(pair[0], at + ".connections[0]"));
    task.connections.push_back(connection_name(pair[1], at + ".connections[1]"));
  } else if (kind == "cohomology-dims") {
    allow_keys(t, at, {"kind", "label", "expect"});
    task.kind = TaskKind::cohomology_dims;
    if (m.model.chart()->even_count() != 0)
      throw manifest_error(at, "cohomology-dims needs a chart without even coordinates");
    if (t.contains("expect")) {
      const auto& e = t.at("expect");
      if (!e.is_array()) throw manifest_error(at + ".expect", "expected a list of dimensions");
      std::vector<std::size_t> dims;
      for (std::size_t k = 0; k < e.size(); ++k)
        dims.push_back(get_number<std::size_t>(e[k], at + ".expect[" + std::to_string(k) + "]", 0, 1u << 16));
      task.expect_dims = std::move(dims);
    }
  } else {
    throw manifest_error(at + ".kind", "unknown task kind '" + kind + "'");
  }
  return task;
}

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace detail

inline Json parse_json_text(std::string_view text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, col] = detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw manifest_error(source, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": invalid JSON");
  }
}

inline Manifest load_manifest_json(const Json& doc) {
  if (!doc.is_object()) throw manifest_error("", "manifest must be a JSON object");
  detail::allow_keys(doc, "", {"name", "description", "model", "chart", "q", "connections", "tasks"});
  std::string name, source;
  if (doc.contains("name")) {
    if (!doc.at("name").is_string()) throw manifest_error("name", "expected a string");
    name = doc.at("name").get<std::string>();
  }
  auto model = detail::load_model(doc, source);
  Manifest m{std::move(name), std::move(model), std::move(source), {}, {}};
  m.connections.emplace_back("flat", Connection::trivial(m.model.chart()));
  if (doc.contains("connections")) {
    const auto& cs = doc.at("connections");
    if (!cs.is_object()) throw manifest_error("connections", "expected a map from name to connection");
    for (auto it = cs.begin(); it != cs.end(); ++it) {
      const std::string at = "connections." + it.key();
      if (it.key() == "flat") {
        if (!(it.value() == "flat")) throw manifest_error(at, "the name \"flat\" is reserved for the zero connection");
        continue;
      }
      m.connections.emplace_back(it.key(), detail::load_connection(it.value(), m.model.chart(), at));
    }
  }
  const auto& tasks = detail::require(doc, "tasks", "");
  if (!tasks.is_array()) throw manifest_error("tasks", "expected a list");
  std::optional<std::size_t> last_value;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    m.tasks.push_back(detail::load_task(tasks[i], "tasks[" + std::to_string(i) + "]", m, last_value));
    if (m.tasks.back().kind == TaskKind::compute) last_value = i;
  }
  return m;
}

inline Manifest load_manifest_text(std::string_view text, const std::string& source = "manifest") {
  return load_manifest_json(parse_json_text(text, source));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw manifest_error(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Manifest load_manifest(const std::string& path) { return load_manifest_text(read_file(path), path); }

// ---------------------------------------------------------------------------
// Running tasks

struct RunOptions {
  bool parallel = false;
  unsigned max_order = 4;
};

enum class TaskStatus { pass, fail, error };

inline std::string to_string(TaskStatus s) {
  switch (s) {
    case TaskStatus::pass: return "pass";
    case TaskStatus::fail: return "fail";
    case TaskStatus::error: return "error";
  }
  return "?";
}

struct TaskOutcome {
  TaskStatus status = TaskStatus::pass;
  Json record;
  std::optional<TensorField> value;  // compute result, for later exactness tasks
  std::string summary;
};

struct RunResult {
  Json report;
  std::vector<TaskOutcome> outcomes;
  int exit_code = 0;
};

namespace detail {

inline std::string describe_task(const Task& t) {
  switch (t.kind) {
    case TaskKind::compute: return "compute " + to_string(t.series) + "_" + std::to_string(t.order) +
                                   (t.connections.empty() ? "" : " with " + t.connections[0]);
    case TaskKind::transgression:
      return "transgression " + to_string(t.series) + "_" + std::to_string(t.order) + " " + t.connections[0] + " -> " +
             t.connections[1];
    case TaskKind::verify_relations: return "verify-relations with " + t.connections[0];
    default: return to_string(t.kind);
  }
}

inline void check_order(const Task& t, const RunOptions& opt) {
  if (t.order > opt.max_order)
    throw algebra_error("order " + std::to_string(t.order) + " exceeds the cap " + std::to_string(opt.max_order) +
                        " (raise it with --max-order)");
}

inline Json residual_entries(const ResidualReport& rep, bool& all_zero) {
  Json out = Json::array();
  for (const auto& e : rep.entries) {
    const bool zero = e.residual.is_zero();
    all_zero = all_zero && zero;
    Json r{{"name", e.name}, {"zero", zero}};
    if (!zero) r["residual"] = tensor_to_json(e.residual);
    out.push_back(std::move(r));
  }
  return out;
}

inline TaskOutcome run_task(const Manifest& m, const Task& t, const RunOptions& opt, const TaskOutcome* dependency) {
  TaskOutcome out;
  Json& rec = out.record;
  rec["kind"] = to_string(t.kind);
  if (!t.label.empty()) rec["label"] = t.label;
  const auto& q = m.model.q;
  try {
    switch (t.kind) {
      case TaskKind::check_q: {
        const auto qq = bracket(q.field(), q.field());
        rec["self_bracket_zero"] = qq.is_zero();
        out.status = qq.is_zero() ? TaskStatus::pass : TaskStatus::fail;
        out.summary = "[Q,Q] = 0";
        break;
      }
      case TaskKind::verify_relations: {
        const auto& c = m.connection(t.connections[0]);
        rec["connection"] = t.connections[0];
        bool ok = true;
        rec["relations"] = residual_entries(verify_structural_relations(c, q), ok);
        Json endos = Json::array();
        if (t.endomorphisms > 0) {
          rec["seed"] = t.seed;
          Rng rng(t.seed);
          for (unsigned e = 0; e < t.endomorphisms; ++e) {
            auto a = random_tensor(rng, q.chart(), 1, 1, parity_of(rng.uniform(0, 1)), {2, 2, 2}, 1, 3);
            bool zero = true;
            residual_entries(verify_cov_lie_relation(c, q, a), zero);
            ok = ok && zero;
            endos.push_back(zero);
          }
        }
        rec["endomorphism_checks"] = endos;
        out.status = ok ? TaskStatus::pass : TaskStatus::fail;
        out.summary = ok ? "all residuals vanish" : "nonzero residuals";
        break;
      }
      case TaskKind::compute: {
        check_order(t, opt);
        const Connection& c = t.connections.empty() ? m.connection("flat") : m.connection(t.connections[0]);
        if (!t.connections.empty()) rec["connection"] = t.connections[0];
        rec["series"] = to_string(t.series);
        rec["order"] = t.order;
        auto r = make_cocycle_report(t.series, t.order, c, q);
        rec["value"] = tensor_to_json(r.value);
        rec["closed"] = r.closed();
        if (!r.closed()) rec["closedness_residual"] = tensor_to_json(r.closedness_residual);
        out.status = r.closed() ? TaskStatus::pass : TaskStatus::fail;
        out.summary = std::to_string(r.value.components().size()) + " nonzero components, " +
                      (r.closed() ? "closed" : "NOT closed");
        out.value = std::move(r.value);
        break;
      }
      case TaskKind::exactness: {
        TensorField target;
        switch (t.target.source) {
          case ExactnessTarget::Source::last_result:
            if (!dependency || !dependency->value) throw algebra_error("the referenced compute task produced no value");
            target = *dependency->value;
            rec["target"] = "last-result";
            rec["target_task"] = *t.depends_on;
            break;
          case ExactnessTarget::Source::q:
            target = q.field();
            rec["target"] = "q";
            break;
          case ExactnessTarget::Source::expression:
            target = TensorField::scalar(t.target.expression).with_parity(*poly_parity(t.target.expression));
            rec["target"] = to_expression(t.target.expression);
            break;
        }
        auto v = exactness_witness(q, target, t.degree_bound, t.max_unknowns);
        rec["verdict"] = to_string(v.status);
        rec["degree_bound"] = v.bound;
        rec["conclusive"] = v.conclusive;
        rec["unknowns"] = v.unknowns;
        if (v.witness) rec["witness"] = tensor_to_json(*v.witness);
        bool ok = v.status != ExactnessVerdict::Status::not_closed;
        if (t.expect_exact) {
          rec["expect"] = *t.expect_exact ? "exact" : "not-exact";
          const bool exact = v.status == ExactnessVerdict::Status::exact_with_witness;
          const bool negative = v.status == ExactnessVerdict::Status::not_exact_within_bound;
          ok = ok && (*t.expect_exact ? exact : negative);
        }
        out.status = ok ? TaskStatus::pass : TaskStatus::fail;
        out.summary = to_string(v.status) + " (degree bound " + std::to_string(v.bound) +
                      (v.conclusive ? ", conclusive" : "") + ")";
        break;
      }
      case TaskKind::transgression: {
        check_order(t, opt);
        rec["series"] = to_string(t.series);
        rec["order"] = t.order;
        rec["connections"] = t.connections;
        auto r = transgression(t.series, t.order, q, m.connection(t.connections[0]), m.connection(t.connections[1]));
        rec["psi"] = tensor_to_json(r.psi);
        rec["difference"] = tensor_to_json(r.difference);
        rec["residual_zero"] = r.ok();
        if (!r.ok()) rec["residual"] = tensor_to_json(r.residual);
        out.status = r.ok() ? TaskStatus::pass : TaskStatus::fail;
        out.summary = r.ok() ? "delta Psi = C1 - C0 exactly" : "nonzero residual";
        break;
      }
      case TaskKind::cohomology_dims: {
        auto r = function_cohomology_dims(q);
        rec["dims"] = r.dims;
        rec["degree_shift"] = r.shift;
        bool ok = true;
        if (t.expect_dims) {
          rec["expect"] = *t.expect_dims;
          ok = *t.expect_dims == r.dims;
        }
        out.status = ok ? TaskStatus::pass : TaskStatus::fail;
        std::string dims;
        for (auto d : r.dims) dims += (dims.empty() ? "" : ",") + std::to_string(d);
        out.summary = "dims [" + dims + "]";
        break;
      }
    }
  } catch (const std::exception& e) {
    out.status = TaskStatus::error;
    rec["error"] = e.what();
    out.summary = std::string("error: ") + e.what();
  }
  rec["status"] = to_string(out.status);
  return out;
}

}  // namespace detail

inline Json model_to_json(const Manifest& m) {
  return Json{{"source", m.model_source},
              {"kind", to_string(m.model.kind)},
              {"description", m.model.description},
              {"chart", chart_to_json(*m.model.chart())},
              {"q", tensor_to_json(m.model.q.field())}};
}

/// Runs every task in manifest order. With opt.parallel, tasks that do not
/// depend on each other run concurrently; the report is identical either way.
inline RunResult run_tasks(const Manifest& m, const RunOptions& opt = {}) {
  RunResult result;
  const std::size_t n = m.tasks.size();
  result.outcomes.resize(n);
  // chains: a compute task followed by the exactness tasks reading its value
  std::vector<std::vector<std::size_t>> chains;
  std::vector<std::size_t> chain_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (m.tasks[i].depends_on) {
      const auto c = chain_of[*m.tasks[i].depends_on];
      chains[c].push_back(i);
      chain_of[i] = c;
    } else {
      chain_of[i] = chains.size();
      chains.push_back({i});
    }
  }
  auto run_chain = [&](const std::vector<std::size_t>& chain) {
    for (auto i : chain) {
      const auto& t = m.tasks[i];
      const TaskOutcome* dep = t.depends_on ? &result.outcomes[*t.depends_on] : nullptr;
      result.outcomes[i] = detail::run_task(m, t, opt, dep);
    }
  };
  if (opt.parallel) {
    std::vector<std::future<void>> jobs;
    for (const auto& chain : chains) jobs.push_back(std::async(std::launch::async, run_chain, std::cref(chain)));
    for (auto& j : jobs) j.get();
  } else {
    for (const auto& chain : chains) run_chain(chain);
  }
  Json tasks = Json::array();
  std::size_t passed = 0, failed = 0, errors = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Json rec{{"index", i}};
    rec.update(result.outcomes[i].record);
    tasks.push_back(std::move(rec));
    switch (result.outcomes[i].status) {
      case TaskStatus::pass: ++passed; break;
      case TaskStatus::fail: ++failed; break;
      case TaskStatus::error: ++errors; break;
    }
  }
  result.exit_code = (failed + errors) == 0 ? 0 : 1;
  result.report = Json{{"format", "qclass-report/1"},
                       {"manifest", m.name},
                       {"model", model_to_json(m)},
                       {"tasks", std::move(tasks)},
                       {"summary", Json{{"passed", passed}, {"failed", failed}, {"errors", errors}, {"exit_code", result.exit_code}}}};
  return result;
}

/// Human-readable one line per task.
inline std::string format_summary(const Manifest& m, const RunResult& r) {
  std::ostringstream os;
  os << "model: " << m.model.description << "\n";
  for (std::size_t i = 0; i < m.tasks.size(); ++i) {
    const auto& o = r.outcomes[i];
    std::string status = to_string(o.status);
    std::transform(status.begin(), status.end(), status.begin(), [](unsigned char c) { return std::toupper(c); });
    os << "[" << status << "] task " << i << ": " << detail::describe_task(m.tasks[i]);
    if (!m.tasks[i].label.empty()) os << " (" << m.tasks[i].label << ")";
    os << ": " << o.summary << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Reading reports back

struct ParsedReport {
  ChartPtr chart;
  TensorField q;
  std::vector<std::pair<std::string, TensorField>> tensors;  // "tasks[i].field"
};

/// Re-reads every tensor in a report against the chart recorded in it.
inline ParsedReport parse_report(const Json& report) {
  ParsedReport r;
  const auto& model = detail::require(report, "model", "");
  r.chart = chart_from_json(detail::require(model, "chart", "model"), "model.chart");
  r.q = tensor_from_json(detail::require(model, "q", "model"), r.chart, "model.q");
  const auto& tasks = detail::require(report, "tasks", "");
  for (std::size_t i = 0; i < tasks.size(); ++i)
    for (const char* field : {"value", "witness", "psi", "difference", "residual", "closedness_residual"})
      if (tasks[i].contains(field)) {
        const std::string at = "tasks[" + std::to_string(i) + "]." + field;
        r.tensors.emplace_back(at, tensor_from_json(tasks[i].at(field), r.chart, at));
      }
  return r;
}

}  // namespace qclass
