#include "harmavg/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace harmavg {

namespace {

using Json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ostream& out_stream(const CommandOptions& o) { return o.out ? *o.out : std::cout; }
std::ostream& err_stream(const CommandOptions& o) { return o.err ? *o.err : std::cerr; }

template <typename Writer>
void write_file(const std::string& path, Writer&& writer) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  writer(f);
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json config_echo(const RunConfig& cfg) {
  Json c = Json::object();
  for (const auto& [k, v] : cfg.echo) c[k] = v;
  return c;
}

// Scaled barrier K h for the solve monitors; empty when the domain has no
// closed-form barrier or the initial field disagrees with the oracle on
// the boundary.
std::optional<GridField> scaled_barrier(const Problem& p) {
  if (!p.oracle_field) return std::nullopt;
  const DomainKind k = p.lattice->domain().kind();
  if (k != DomainKind::ball && k != DomainKind::interval) return std::nullopt;
  const Barrier h(p.lattice->domain());
  GridField hf = h.sample(p.lattice);
  BarrierConstant K;
  try {
    K = barrier_constant(p.init, *p.oracle_field, hf);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
  for (double& v : hf.values()) v *= K.K;
  return hf;
}

}  // namespace

std::string report_json(const IterationReport& report, const RunConfig& cfg,
                        Convexity convexity) {
  Json j;
  j["iterations"] = report.iterations;
  j["verdict"] = to_string(report.verdict);
  j["sup_diff_history"] = report.sup_diff_history;
  j["oracle_error_history"] = report.oracle_error_history;
  j["barrier_margin_history"] = report.barrier_margin_history;
  j["final_oracle_error"] = number_or_null(report.final_oracle_error);
  j["oracle_error_infimum"] = number_or_null(report.oracle_error_infimum());
  j["wall_time_seconds"] =
      cfg.report_wall_time ? Json(report.wall_time_seconds) : Json(nullptr);
  j["domain_convexity"] = to_string(convexity);
  j["theorem_hypotheses"] = convexity == Convexity::strongly_convex
                                ? "satisfied"
                                : "outside theorem hypotheses";
  j["config"] = config_echo(cfg);
  return j.dump(2) + "\n";
}

void write_pgm(const GridField& field, std::ostream& out) {
  const Lattice& lat = field.lattice();
  const GridSpec& g = lat.grid();
  const NodeMask& mask = lat.mask();
  const int dim = g.dim();
  const int width = g.nodes(0);
  const int height = dim >= 2 ? g.nodes(1) : 1;
  const int slice = dim == 3 ? g.nodes(2) / 2 : 0;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      const std::size_t idx = g.index({i, j, slice});
      if (mask.is_exterior(idx)) continue;
      lo = std::min(lo, field[idx]);
      hi = std::max(hi, field[idx]);
    }
  }
  out << "P2\n" << width << ' ' << height << "\n255\n";
  for (int r = 0; r < height; ++r) {
    const int j = height - 1 - r;
    for (int i = 0; i < width; ++i) {
      const std::size_t idx = g.index({i, j, slice});
      int level = 0;
      if (!mask.is_exterior(idx)) {
        // Non-exterior values use 1..255 so they never read as exterior.
        const double t = hi > lo ? (field[idx] - lo) / (hi - lo) : 1.0;
        level = 1 + static_cast<int>(std::lround(254.0 * t));
      }
      out << level << (i + 1 < width ? ' ' : '\n');
    }
  }
}

int cmd_solve(const RunConfig& cfg, const CommandOptions& opts) {
  try {
    const Problem p = build_problem(cfg);
    Monitors mon;
    if (p.oracle_field) {
      mon.oracle = *p.oracle_field;
      mon.scaled_barrier = scaled_barrier(p);
    }
    const IterationResult res = run(p.init, *p.stencils, p.boundary, cfg.stop, mon);
    const Convexity convexity = p.lattice->domain().classify();

    if (!cfg.output.field.empty()) {
      write_file(cfg.output.field, [&](std::ostream& o) { write_csv(res.field, o); });
    }
    if (!cfg.output.report.empty()) {
      write_file(cfg.output.report,
                 [&](std::ostream& o) { o << report_json(res.report, cfg, convexity); });
    }
    if (!cfg.output.image.empty()) {
      write_file(cfg.output.image, [&](std::ostream& o) { write_pgm(res.field, o); });
    }
    if (!opts.quiet) {
      std::ostream& o = out_stream(opts);
      o << "verdict " << to_string(res.report.verdict) << " after "
        << res.report.iterations << " iterations";
      if (!res.report.sup_diff_history.empty()) {
        o << ", last sup_diff " << format_number(res.report.sup_diff_history.back());
      }
      if (std::isfinite(res.report.final_oracle_error)) {
        o << ", oracle error " << format_number(res.report.final_oracle_error);
      }
      if (convexity != Convexity::strongly_convex) o << " (outside theorem hypotheses)";
      o << "\n";
      if (!cfg.report_wall_time) {
        err_stream(opts) << "wall time " << res.report.wall_time_seconds << " s\n";
      }
    }
    switch (res.report.verdict) {
      case Verdict::converged: return kExitOk;
      case Verdict::max_iter: return kExitMaxIter;
      case Verdict::stalled: return kExitStalled;
    }
    return kExitError;
  } catch (const ConfigError& e) {
    err_stream(opts) << "config error: " << e.what() << "\n";
  } catch (const IoError& e) {
    err_stream(opts) << "io error: " << e.what() << "\n";
  }
  return kExitError;
}

std::string suite_json(const SuiteResult& result, const RunConfig& cfg) {
  Json j;
  j["suite"] = result.suite;
  j["pass"] = result.pass;
  j["informational"] = result.informational;
  Json checks = Json::array();
  for (const SuiteCheck& c : result.checks) {
    Json e;
    e["name"] = c.name;
    e["value"] = number_or_null(c.value);
    e["bound"] = number_or_null(c.bound);
    e["pass"] = c.pass;
    checks.push_back(e);
  }
  j["checks"] = checks;
  j["note"] = result.note;
  j["config"] = config_echo(cfg);
  return j.dump(2) + "\n";
}

int cmd_verify(const RunConfig& cfg, const std::string& suite,
               const CommandOptions& opts) {
  try {
    const Problem p = build_problem(cfg);
    const SuiteResult r = run_suite(p, suite);
    if (!cfg.output.report.empty()) {
      write_file(cfg.output.report, [&](std::ostream& o) { o << suite_json(r, cfg); });
    }
    if (!opts.quiet) {
      std::ostream& o = out_stream(opts);
      for (const SuiteCheck& c : r.checks) {
        o << (c.pass ? "PASS " : "FAIL ") << c.name << " value " << format_number(c.value)
          << " bound " << format_number(c.bound) << "\n";
      }
      o << suite << ": " << (r.pass ? "pass" : "fail")
        << (r.informational ? " (informational)" : "") << "\n";
      if (!r.note.empty()) o << r.note << "\n";
    }
    return r.pass || r.informational ? kExitOk : kExitAssertion;
  } catch (const ConfigError& e) {
    err_stream(opts) << "config error: " << e.what() << "\n";
  } catch (const IoError& e) {
    err_stream(opts) << "io error: " << e.what() << "\n";
  }
  return kExitError;
}

Sweep parse_sweep(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw ConfigError("sweep must look like key=v1,v2,...");
  Sweep s;
  s.key = spec.substr(0, eq);
  static const char* kAllowed[] = {"grid.nodes", "radius.c", "quadrature.samples_per_axis",
                                   "quadrature.samples"};
  if (std::find_if(std::begin(kAllowed), std::end(kAllowed),
                   [&](const char* k) { return s.key == k; }) == std::end(kAllowed)) {
    throw ConfigError("cannot sweep '" + s.key + "'");
  }
  std::stringstream ss(spec.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    if (b == std::string::npos) throw ConfigError("empty value in sweep");
    s.values.push_back(item.substr(b, item.find_last_not_of(' ') - b + 1));
  }
  if (s.values.empty()) throw ConfigError("empty sweep list");
  return s;
}

int cmd_study(const RunConfig& cfg, const std::string& sweep,
              const CommandOptions& opts) {
  try {
    const Sweep s = parse_sweep(sweep);
    std::ostringstream table;
    table << "parameter,value,iterations,verdict,final_oracle_error,one_step_residual\n";
    for (const std::string& v : s.values) {
      RunConfig c = cfg;
      set_config_value(c, s.key, v);
      const Problem p = build_problem(c);
      const IterationResult res = run(p.init, *p.stencils, p.boundary, c.stop,
                                      p.oracle_field ? Monitors{*p.oracle_field, {}} : Monitors{});
      const double residual =
          p.oracle_field ? fixed_point_residual(*p.oracle_field, *p.stencils, p.boundary)
                         : fixed_point_residual(res.field, *p.stencils, p.boundary);
      table << s.key << ',' << v << ',' << res.report.iterations << ','
            << to_string(res.report.verdict) << ','
            << format_number(res.report.final_oracle_error) << ',' << format_number(residual)
            << "\n";
      if (!opts.quiet) {
        err_stream(opts) << s.key << " = " << v << ": " << to_string(res.report.verdict)
                         << " after " << res.report.iterations << " iterations\n";
      }
    }
    if (cfg.output.study.empty()) {
      out_stream(opts) << table.str();
    } else {
      write_file(cfg.output.study, [&](std::ostream& o) { o << table.str(); });
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err_stream(opts) << "config error: " << e.what() << "\n";
  } catch (const IoError& e) {
    err_stream(opts) << "io error: " << e.what() << "\n";
  }
  return kExitError;
}

}  // namespace harmavg
