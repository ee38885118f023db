#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "harmavg/averaging.hpp"
#include "harmavg/iteration.hpp"

namespace harmavg {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kSchemaVersion = 1;

/// One run, parsed from a `section.key = value` text file. See README for
/// the full key table.
struct RunConfig {
  struct DomainConfig {
    std::string kind = "ball";  // interval | ball | ellipse | superellipse | box
    int dimension = 2;
    Point center{};
    double radius = 1.0;            // ball
    Point semi_axes{1.0, 1.0, 1.0};  // ellipse, superellipse (a, b)
    double exponent = 4.0;          // superellipse
    Point half_widths{1.0, 1.0, 1.0};  // box
    double lo = 0.0;                // interval
    double hi = 1.0;
  } domain;

  struct GridConfig {
    std::array<int, kMaxDim> nodes{65, 65, 65};
    std::optional<Point> min;  // default: fitted to the domain
    std::optional<Point> max;
  } grid;

  RadiusSpec radius;
  QuadratureSpec quadrature;

  struct OracleConfig {
    std::string kind = "none";  // none | harmonic_poly | poisson_integral | linear_1d | fundamental_shifted
    int degree = 2;
    Point pole{};
  } oracle;

  /// Boundary data expression; empty means "use the oracle".
  std::string boundary_expression;

  struct InitConfig {
    std::string kind = "zero";  // zero | oracle | oracle_plus_bump | expression | random
    std::string expression;
    Point bump_center{};
    double bump_width = 0.5;
    double bump_height = 0.1;
    std::uint64_t seed = 1;
  } init;

  StopRule stop;

  struct OutputConfig {
    std::string field;   // CSV
    std::string report;  // JSON
    std::string image;   // PGM
    std::string study;   // CSV
  } output;

  bool report_wall_time = true;

  struct VerifyConfig {
    int fields = 100;
    int pairs = 500;
    int queries = 100;
    int samples = 2000;
    std::uint64_t seed = 1;
    double fixedpoint_tol = 1e-12;
    /// Allowed relative spread of the empirical constant across fields.
    double eq8_spread = 0.25;
  } verify;

  /// Every key as written, for echoing into reports.
  std::map<std::string, std::string> echo;
};

/// Parses and validates. Throws ConfigError naming the line on failure.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

/// Applies `key = value` on top of an existing config (used by sweeps).
void set_config_value(RunConfig& cfg, const std::string& key,
                      const std::string& value);

/// Cross-field checks (domain parameters, radius, quadrature, stop rule).
void validate(const RunConfig& cfg);

}  // namespace harmavg
