#pragma once

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypervekua/errors.hpp"
#include "hypervekua/fields.hpp"
#include "hypervekua/formal_powers.hpp"

namespace hypervekua::cli {

/// Raised for malformed or inconsistent run configurations.
class ConfigInvalid : public Error {
 public:
  explicit ConfigInvalid(const std::string& what) : Error("CONFIG_INVALID", what) {}
};

class CenterOutOfDomain : public Error {
 public:
  explicit CenterOutOfDomain(const std::string& what) : Error("CENTER_OUT_OF_DOMAIN", what) {}
};

struct Tolerances {
  double residual = 5e-5;      ///< max Vekua / transport residual
  double closed_form = 1e-6;   ///< closed form vs generic, n <= 1
  double integration = 1e-12;  ///< formal-power panel refinement
  double drift = 1e-8;         ///< spectral conservation per unit x
};

struct SpectralConfig {
  std::vector<double> k{0.5, 1.0, 2.0};
  double x_min = -1.0;
  double x_max = 2.0;
  double step = 1e-3;
  std::complex<double> n1{1.0, 0.0};
  std::complex<double> n2{0.0, 0.5};
};

struct RunConfig {
  std::string potential = "sech:1:1";
  GridDomain domain = GridDomain::make(0.0, 1.0, 0.0, 1.0, 21, 21);
  hnum center{0.5, 0.5};
  hnum coefficient{1.0};
  int m = 0;
  int n_min = 0;
  int n_max = 2;
  PathKind path = PathKind::straight;
  double fd_step = 1e-3;
  Tolerances tol;
  SpectralConfig spectral;
  std::filesystem::path out = "hypervekua_out";
  /// Directory that relative paths in the config resolve against.
  std::filesystem::path base_dir = ".";

  /// Overlays the keys present in `j` on the defaults. Unknown keys and
  /// invalid values throw ConfigInvalid.
  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static RunConfig load(const std::filesystem::path& file);

  /// Full effective configuration, suitable for echoing into summaries.
  nlohmann::json to_json() const;

  /// Throws ConfigInvalid on non-positive tolerances, bad ranges, etc.
  void validate() const;

  FormalPowerOptions power_options() const;
};

}  // namespace hypervekua::cli
