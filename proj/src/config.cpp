#include "detline/config.hpp"

#include "json.hpp"

#include <fmt/format.h>

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace detline {

using nlohmann::json;

ConfigError::ConfigError(std::string field, const std::string& message)
    : InputError(fmt::format("{}: {}", field, message)), field_(std::move(field)) {}

std::string to_string(ZeroModeHint hint) {
  switch (hint) {
    case ZeroModeHint::Auto: return "auto";
    case ZeroModeHint::Force: return "force";
    case ZeroModeHint::Off: return "off";
  }
  return "auto";
}

double default_rtol() {
  const char* env = std::getenv("DETLINE_RTOL");
  if (env == nullptr || *env == '\0') return Controls{}.rtol;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (end == env || *end != '\0' || !std::isfinite(v))
    throw ConfigError("DETLINE_RTOL", fmt::format("'{}' is not a number", env));
  return v;
}

namespace {

void check_keys(const json& obj, const std::string& where, std::set<std::string> allowed) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.contains(key))
      throw ConfigError(where.empty() ? key : where + "." + key, "unknown field");
}

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(field, "must be finite");
  return v;
}

complex get_complex(const json& j, const std::string& field) {
  if (j.is_number()) return get_number(j, field);
  if (j.is_array() && j.size() == 2)
    return {get_number(j[0], field + "[0]"), get_number(j[1], field + "[1]")};
  throw ConfigError(field, "expected a number or a [re, im] pair");
}

CMatrix get_matrix(const json& j, int n, const std::string& field) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw ConfigError(field, fmt::format("expected {} rows for a {}x{} matrix", n, n, n));
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    const json& row = j[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw ConfigError(fmt::format("{}[{}]", field, i), fmt::format("expected {} entries", n));
    for (int k = 0; k < n; ++k) m(i, k) = get_complex(row[k], fmt::format("{}[{}][{}]", field, i, k));
  }
  return m;
}

std::string expression_text(const json& j, const std::string& field) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return fmt::format("{}", j.get<double>());
  throw ConfigError(field, "expected an expression string");
}

std::vector<std::vector<std::string>> get_potential(const json& j, int r, const std::string& field) {
  std::vector<std::vector<std::string>> rows;
  if (j.is_string() || j.is_number()) {
    if (r != 1) throw ConfigError(field, fmt::format("expected a {}x{} array of expressions", r, r));
    rows = {{expression_text(j, field)}};
  } else if (j.is_array()) {
    if (static_cast<int>(j.size()) != r)
      throw ConfigError(field, fmt::format("expected {} rows", r));
    for (int i = 0; i < r; ++i) {
      const json& row = j[i];
      if (!row.is_array() || static_cast<int>(row.size()) != r)
        throw ConfigError(fmt::format("{}[{}]", field, i), fmt::format("expected {} entries", r));
      std::vector<std::string> out;
      for (int k = 0; k < r; ++k)
        out.push_back(expression_text(row[k], fmt::format("{}[{}][{}]", field, i, k)));
      rows.push_back(std::move(out));
    }
  } else {
    throw ConfigError(field, "expected an expression string or matrix");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      try {
        expr::parse(rows[i][k]);
      } catch (const expr::ParseError& e) {
        throw ConfigError(r == 1 ? field : fmt::format("{}[{}][{}]", field, i, k), e.what());
      }
    }
  }
  return rows;
}

BoundaryKind parse_kind(const json& j) {
  if (!j.is_string()) throw ConfigError("boundary.kind", "expected a string");
  const std::string s = j.get<std::string>();
  for (BoundaryKind k : {BoundaryKind::Dirichlet, BoundaryKind::Neumann, BoundaryKind::Robin,
                         BoundaryKind::Periodic, BoundaryKind::Twisted, BoundaryKind::Custom})
    if (to_string(k) == s) return k;
  throw ConfigError("boundary.kind",
                    fmt::format("unknown kind '{}' (dirichlet, neumann, robin, periodic, "
                                "twisted, custom)",
                                s));
}

BoundarySpec parse_boundary(const json& j, const ProblemConfig& cfg) {
  if (!j.is_object()) throw ConfigError("boundary", "expected an object");
  check_keys(j, "boundary", {"kind", "A", "B", "C", "D", "mu", "l", "M", "N"});
  if (!j.contains("kind")) throw ConfigError("boundary.kind", "missing");
  const BoundaryKind kind = parse_kind(j["kind"]);
  switch (kind) {
    case BoundaryKind::Custom: check_keys(j, "boundary", {"kind", "M", "N"}); break;
    case BoundaryKind::Robin: check_keys(j, "boundary", {"kind", "A", "B", "C", "D"}); break;
    case BoundaryKind::Twisted: check_keys(j, "boundary", {"kind", "mu", "l"}); break;
    default: check_keys(j, "boundary", {"kind"});
  }
  try {
    switch (kind) {
      case BoundaryKind::Custom: {
        if (!j.contains("M")) throw ConfigError("boundary.M", "missing for custom boundary");
        if (!j.contains("N")) throw ConfigError("boundary.N", "missing for custom boundary");
        CMatrix m = get_matrix(j["M"], 2 * cfg.r, "boundary.M");
        CMatrix n = get_matrix(j["N"], 2 * cfg.r, "boundary.N");
        return BoundarySpec(std::move(m), std::move(n));
      }
      case BoundaryKind::Robin: {
        std::map<std::string, complex> p;
        for (const char* name : {"A", "B", "C", "D"}) {
          if (!j.contains(name))
            throw ConfigError(std::string("boundary.") + name, "missing for robin boundary");
          p[name] = get_complex(j[name], std::string("boundary.") + name);
        }
        return named_bc(kind, p, cfg.r);
      }
      case BoundaryKind::Twisted: {
        std::map<std::string, complex> p;
        for (const char* name : {"mu", "l"}) {
          const std::string field = std::string("boundary.") + name;
          if (j.contains(name)) {
            p[name] = get_complex(j[name], field);
          } else if (auto it = cfg.parameters.find(name); it != cfg.parameters.end()) {
            p[name] = it->second;
          } else {
            throw ConfigError(field, "missing (set it here or in parameters)");
          }
        }
        const double l = p["l"].real();
        if (std::abs((cfg.b - cfg.a) - l) > 1e-12 * std::max(1.0, std::abs(l)))
          throw ConfigError("boundary.l",
                            fmt::format("interval length b - a = {} differs from l = {}",
                                        cfg.b - cfg.a, l));
        return named_bc(kind, p, cfg.r);
      }
      default:
        return named_bc(kind, {}, cfg.r);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const InputError& e) {
    throw ConfigError("boundary", e.what());
  }
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t k = 0; k < std::min(byte, text.size()); ++k)
    if (text[k] == '\n') ++line;
  return line;
}

}  // namespace

ProblemConfig parse_problem(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}:{}", source, line_of(text, e.byte)), e.what());
  }
  if (!j.is_object()) throw ConfigError("<root>", "expected a JSON object");
  check_keys(j, "", {"a", "b", "interval", "r", "potential1", "potential2", "parameters",
                     "boundary", "solver", "task"});

  ProblemConfig cfg;
  cfg.source = source;
  if (j.contains("interval")) {
    const json& iv = j["interval"];
    if (!iv.is_object()) throw ConfigError("interval", "expected an object {a, b}");
    check_keys(iv, "interval", {"a", "b"});
    if (j.contains("a") || j.contains("b"))
      throw ConfigError("interval", "give a, b either at top level or inside interval");
    if (!iv.contains("a")) throw ConfigError("interval.a", "missing");
    if (!iv.contains("b")) throw ConfigError("interval.b", "missing");
    cfg.a = get_number(iv["a"], "interval.a");
    cfg.b = get_number(iv["b"], "interval.b");
  } else {
    if (!j.contains("a")) throw ConfigError("a", "missing");
    if (!j.contains("b")) throw ConfigError("b", "missing");
    cfg.a = get_number(j["a"], "a");
    cfg.b = get_number(j["b"], "b");
  }
  if (!(cfg.a < cfg.b)) throw ConfigError("interval", "requires a < b");

  if (j.contains("r")) {
    if (!j["r"].is_number_integer() || j["r"].get<int>() < 1)
      throw ConfigError("r", "expected a positive integer");
    cfg.r = j["r"].get<int>();
  }

  if (j.contains("parameters")) {
    const json& ps = j["parameters"];
    if (!ps.is_object()) throw ConfigError("parameters", "expected an object");
    for (const auto& [name, value] : ps.items()) {
      const std::string field = "parameters." + name;
      if (name == "x" || name == "i" || name == "pi")
        throw ConfigError(field, "reserved name");
      if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_'))
        throw ConfigError(field, "not an identifier");
      cfg.parameters[name] = get_complex(value, field);
    }
  }

  for (const char* name : {"potential1", "potential2"})
    if (!j.contains(name)) throw ConfigError(name, "missing");
  cfg.potential1 = get_potential(j["potential1"], cfg.r, "potential1");
  cfg.potential2 = get_potential(j["potential2"], cfg.r, "potential2");

  if (!j.contains("boundary")) throw ConfigError("boundary", "missing");
  cfg.boundary = parse_boundary(j["boundary"], cfg);

  cfg.controls.rtol = default_rtol();
  if (j.contains("solver")) {
    const json& s = j["solver"];
    if (!s.is_object()) throw ConfigError("solver", "expected an object");
    check_keys(s, "solver", {"rtol", "atol", "max_step"});
    if (s.contains("rtol")) cfg.controls.rtol = get_number(s["rtol"], "solver.rtol");
    if (s.contains("atol")) cfg.controls.atol = get_number(s["atol"], "solver.atol");
    if (s.contains("max_step")) cfg.controls.max_step = get_number(s["max_step"], "solver.max_step");
  }
  if (!(cfg.controls.rtol >= 1e-14 && cfg.controls.rtol <= 1e-4))
    throw ConfigError("solver.rtol", fmt::format("{:g} outside [1e-14, 1e-4]", cfg.controls.rtol));
  if (!(cfg.controls.atol > 0)) throw ConfigError("solver.atol", "must be positive");
  if (cfg.controls.max_step < 0) throw ConfigError("solver.max_step", "must be non-negative");

  if (j.contains("task")) {
    const json& t = j["task"];
    if (!t.is_object()) throw ConfigError("task", "expected an object");
    check_keys(t, "task", {"extract_zero_mode", "oracle_check", "designated_row"});
    if (t.contains("extract_zero_mode")) {
      const json& z = t["extract_zero_mode"];
      const std::string v = z.is_string() ? z.get<std::string>() : "";
      if (v == "auto") cfg.extract_zero_mode = ZeroModeHint::Auto;
      else if (v == "force") cfg.extract_zero_mode = ZeroModeHint::Force;
      else if (v == "off") cfg.extract_zero_mode = ZeroModeHint::Off;
      else throw ConfigError("task.extract_zero_mode", "expected auto, force or off");
    }
    if (t.contains("oracle_check")) {
      const json& o = t["oracle_check"];
      if (o.is_string() && o.get<std::string>() == "off") cfg.oracle_check = 0;
      else if (o.is_number_integer() && o.get<int>() > 0) cfg.oracle_check = o.get<int>();
      else throw ConfigError("task.oracle_check", "expected \"off\" or a positive integer");
    }
    if (t.contains("designated_row")) {
      const json& d = t["designated_row"];
      if (!d.is_number_integer() || d.get<int>() < 0 || d.get<int>() >= 2 * cfg.r)
        throw ConfigError("task.designated_row", fmt::format("expected an integer in 0..{}", 2 * cfg.r - 1));
      cfg.designated_row = d.get<int>();
    }
  }

  // bind parameters now so unbound names are reported at load time
  try {
    cfg.problem1();
  } catch (const InputError& e) {
    throw ConfigError("potential1", e.what());
  }
  try {
    cfg.problem2();
  } catch (const InputError& e) {
    throw ConfigError("potential2", e.what());
  }
  return cfg;
}

ProblemConfig load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str(), path);
}

Problem ProblemConfig::problem1() const {
  return Problem(a, b, Potential::matrix(potential1), parameters);
}

Problem ProblemConfig::problem2() const {
  return Problem(a, b, Potential::matrix(potential2), parameters);
}

}  // namespace detline
