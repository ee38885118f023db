#include "harmavg/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "harmavg/expression.hpp"
#include "harmavg/problem.hpp"

namespace harmavg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

double to_double(const std::string& s) {
  const std::string t = trim(s);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
    throw ConfigError("expected a number, got '" + t + "'");
  }
  return v;
}

long long to_integer(const std::string& s) {
  const std::string t = trim(s);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
    throw ConfigError("expected an integer, got '" + t + "'");
  }
  return v;
}

int to_int(const std::string& s) {
  const long long v = to_integer(s);
  if (v < -2147483647LL || v > 2147483647LL) throw ConfigError("integer out of range");
  return static_cast<int>(v);
}

std::uint64_t to_seed(const std::string& s) {
  const long long v = to_integer(s);
  if (v < 0) throw ConfigError("seed must be >= 0");
  return static_cast<std::uint64_t>(v);
}

bool to_bool(const std::string& s) {
  const std::string t = trim(s);
  if (t == "true") return true;
  if (t == "false") return false;
  throw ConfigError("expected true or false, got '" + t + "'");
}

std::vector<double> to_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(item));
  if (out.empty() || out.size() > static_cast<std::size_t>(kMaxDim)) {
    throw ConfigError("expected 1 to 3 comma-separated numbers, got '" + trim(s) + "'");
  }
  return out;
}

Point to_point(const std::string& s) {
  const std::vector<double> v = to_list(s);
  Point p{};
  std::copy(v.begin(), v.end(), p.begin());
  return p;
}

std::string one_of(const std::string& s, std::initializer_list<const char*> allowed) {
  const std::string t = unquote(trim(s));
  for (const char* a : allowed) {
    if (t == a) return t;
  }
  std::string msg = "'" + t + "' is not one of:";
  for (const char* a : allowed) msg += std::string(" ") + a;
  throw ConfigError(msg);
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"schema_version",
       [](RunConfig&, const std::string& v) {
         if (to_int(v) != kSchemaVersion) {
           throw ConfigError("unsupported schema_version " + trim(v));
         }
       }},
      {"domain.kind",
       [](RunConfig& c, const std::string& v) {
         c.domain.kind = one_of(v, {"interval", "ball", "ellipse", "superellipse", "box"});
       }},
      {"domain.dimension", [](RunConfig& c, const std::string& v) { c.domain.dimension = to_int(v); }},
      {"domain.center", [](RunConfig& c, const std::string& v) { c.domain.center = to_point(v); }},
      {"domain.radius", [](RunConfig& c, const std::string& v) { c.domain.radius = to_double(v); }},
      {"domain.semi_axes", [](RunConfig& c, const std::string& v) { c.domain.semi_axes = to_point(v); }},
      {"domain.exponent", [](RunConfig& c, const std::string& v) { c.domain.exponent = to_double(v); }},
      {"domain.half_widths", [](RunConfig& c, const std::string& v) { c.domain.half_widths = to_point(v); }},
      {"domain.lo", [](RunConfig& c, const std::string& v) { c.domain.lo = to_double(v); }},
      {"domain.hi", [](RunConfig& c, const std::string& v) { c.domain.hi = to_double(v); }},
      {"grid.nodes",
       [](RunConfig& c, const std::string& v) {
         std::vector<int> n;
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) n.push_back(to_int(item));
         if (n.empty() || n.size() > static_cast<std::size_t>(kMaxDim)) {
           throw ConfigError("grid.nodes expects 1 to 3 integers");
         }
         for (int a = 0; a < kMaxDim; ++a) {
           c.grid.nodes[a] = n[std::min<std::size_t>(a, n.size() - 1)];
         }
       }},
      {"grid.min", [](RunConfig& c, const std::string& v) { c.grid.min = to_point(v); }},
      {"grid.max", [](RunConfig& c, const std::string& v) { c.grid.max = to_point(v); }},
      {"radius.kind",
       [](RunConfig& c, const std::string& v) {
         c.radius.kind = one_of(v, {"distance_fraction", "capped_fraction"}) == "capped_fraction"
                             ? RadiusSpec::Kind::capped_fraction
                             : RadiusSpec::Kind::distance_fraction;
       }},
      {"radius.c", [](RunConfig& c, const std::string& v) { c.radius.fraction = to_double(v); }},
      {"radius.cap", [](RunConfig& c, const std::string& v) { c.radius.cap = to_double(v); }},
      {"quadrature.kind",
       [](RunConfig& c, const std::string& v) {
         c.quadrature.kind = one_of(v, {"product_midpoint", "monte_carlo"}) == "monte_carlo"
                                 ? QuadratureSpec::Kind::monte_carlo
                                 : QuadratureSpec::Kind::product_midpoint;
       }},
      {"quadrature.samples_per_axis",
       [](RunConfig& c, const std::string& v) { c.quadrature.samples_per_axis = to_int(v); }},
      {"quadrature.samples", [](RunConfig& c, const std::string& v) { c.quadrature.samples = to_int(v); }},
      {"quadrature.seed", [](RunConfig& c, const std::string& v) { c.quadrature.seed = to_seed(v); }},
      {"oracle.kind",
       [](RunConfig& c, const std::string& v) {
         c.oracle.kind = one_of(v, {"none", "harmonic_poly", "poisson_integral", "linear_1d",
                                    "fundamental_shifted"});
       }},
      {"oracle.degree", [](RunConfig& c, const std::string& v) { c.oracle.degree = to_int(v); }},
      {"oracle.pole", [](RunConfig& c, const std::string& v) { c.oracle.pole = to_point(v); }},
      {"boundary.expression",
       [](RunConfig& c, const std::string& v) { c.boundary_expression = unquote(trim(v)); }},
      {"init.kind",
       [](RunConfig& c, const std::string& v) {
         c.init.kind = one_of(v, {"zero", "oracle", "oracle_plus_bump", "expression", "random"});
       }},
      {"init.expression", [](RunConfig& c, const std::string& v) { c.init.expression = unquote(trim(v)); }},
      {"init.bump_center", [](RunConfig& c, const std::string& v) { c.init.bump_center = to_point(v); }},
      {"init.bump_width", [](RunConfig& c, const std::string& v) { c.init.bump_width = to_double(v); }},
      {"init.bump_height", [](RunConfig& c, const std::string& v) { c.init.bump_height = to_double(v); }},
      {"init.seed", [](RunConfig& c, const std::string& v) { c.init.seed = to_seed(v); }},
      {"stop.tol", [](RunConfig& c, const std::string& v) { c.stop.tol = to_double(v); }},
      {"stop.max_iter", [](RunConfig& c, const std::string& v) { c.stop.max_iter = to_int(v); }},
      {"stop.stall_window", [](RunConfig& c, const std::string& v) { c.stop.stall_window = to_int(v); }},
      {"output.field", [](RunConfig& c, const std::string& v) { c.output.field = unquote(trim(v)); }},
      {"output.report", [](RunConfig& c, const std::string& v) { c.output.report = unquote(trim(v)); }},
      {"output.image", [](RunConfig& c, const std::string& v) { c.output.image = unquote(trim(v)); }},
      {"output.study", [](RunConfig& c, const std::string& v) { c.output.study = unquote(trim(v)); }},
      {"report.wall_time", [](RunConfig& c, const std::string& v) { c.report_wall_time = to_bool(v); }},
      {"verify.fields", [](RunConfig& c, const std::string& v) { c.verify.fields = to_int(v); }},
      {"verify.pairs", [](RunConfig& c, const std::string& v) { c.verify.pairs = to_int(v); }},
      {"verify.queries", [](RunConfig& c, const std::string& v) { c.verify.queries = to_int(v); }},
      {"verify.samples", [](RunConfig& c, const std::string& v) { c.verify.samples = to_int(v); }},
      {"verify.seed", [](RunConfig& c, const std::string& v) { c.verify.seed = to_seed(v); }},
      {"verify.fixedpoint_tol",
       [](RunConfig& c, const std::string& v) { c.verify.fixedpoint_tol = to_double(v); }},
      {"verify.eq8_spread", [](RunConfig& c, const std::string& v) { c.verify.eq8_spread = to_double(v); }},
  };
  return table;
}

}  // namespace

void set_config_value(RunConfig& cfg, const std::string& key,
                      const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown key '" + key + "'");
  try {
    it->second(cfg, value);
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
  cfg.echo[key] = unquote(trim(value));
}

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // '#' starts a comment unless it sits inside a quoted value.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (!seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    try {
      set_config_value(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!seen.count("schema_version")) throw ConfigError("missing schema_version");
  validate(cfg);
  return cfg;
}

RunConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in);
}

void validate(const RunConfig& cfg) {
  try {
    cfg.radius.validate();
    cfg.quadrature.validate();
    cfg.stop.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (cfg.domain.dimension < 1 || cfg.domain.dimension > kMaxDim) {
    throw ConfigError("domain.dimension must be 1, 2 or 3");
  }
  for (int a = 0; a < cfg.domain.dimension; ++a) {
    if (cfg.grid.nodes[a] < 3) throw ConfigError("grid.nodes must be >= 3 per axis");
  }
  if (cfg.grid.min.has_value() != cfg.grid.max.has_value()) {
    throw ConfigError("grid.min and grid.max must be given together");
  }
  if (cfg.verify.fields < 1 || cfg.verify.pairs < 1 || cfg.verify.queries < 1 ||
      cfg.verify.samples < 1) {
    throw ConfigError("verify counts must be >= 1");
  }
  if (!(cfg.verify.eq8_spread > 0.0)) throw ConfigError("verify.eq8_spread must be > 0");
  if (!(cfg.init.bump_width > 0.0)) throw ConfigError("init.bump_width must be > 0");
  try {
    if (!cfg.boundary_expression.empty()) Expression::parse(cfg.boundary_expression);
    if (cfg.init.kind == "expression") Expression::parse(cfg.init.expression);
  } catch (const ExpressionError& e) {
    throw ConfigError(e.what());
  }
  if (cfg.boundary_expression.empty() && cfg.oracle.kind == "none") {
    throw ConfigError("boundary data needs boundary.expression or an oracle");
  }
  if ((cfg.init.kind == "oracle" || cfg.init.kind == "oracle_plus_bump") &&
      cfg.oracle.kind == "none") {
    throw ConfigError("init.kind = " + cfg.init.kind + " needs an oracle");
  }
  if (cfg.oracle.kind == "poisson_integral" && cfg.boundary_expression.empty()) {
    throw ConfigError("poisson_integral oracle needs boundary.expression");
  }
  // Domain, grid and oracle parameters are checked by constructing them.
  try {
    const Domain d = make_domain(cfg);
    (void)make_grid(cfg, d);
    if (cfg.oracle.kind != "none") (void)make_oracle(cfg, d);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace harmavg
