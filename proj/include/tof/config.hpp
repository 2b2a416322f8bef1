#pragma once

// Run configuration documents. One JSON object with exactly one top-level key
// naming the workflow:
//
//   {"generic-tf": {"hbar": 1, "H": [[{"re": 0, "im": 0}, ...], ...],
//                   "rho0": [[...]], "M": [[...]],
//                   "grid": {"t0": 0, "tf": 3.14, "n": 2001}}}
//
// Complex entries are {"re": x, "im": y}; matrices are row-major nested
// arrays. Unknown keys are rejected, and every error names the offending
// location as a JSON pointer.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "tof/errors.hpp"
#include "tof/matterwave.hpp"
#include "tof/protocol.hpp"
#include "tof/quantum_core.hpp"
#include "tof/three_level.hpp"
#include "tof/time_grid.hpp"

namespace tof {

class ConfigError : public ValidationError {
 public:
  ConfigError(const std::string& pointer, const std::string& what)
      : ValidationError((pointer.empty() ? std::string("/") : pointer) + ": " + what), pointer_(pointer) {}

  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

/// A closed system: H, the initial state and the measurement projector.
struct SystemConfig {
  double hbar = 1.0;
  Hamiltonian h;
  DensityMatrix rho0;
  Projector m;

  UnitSystem units() const { return {hbar, "1", "hbar/time"}; }
};

struct GenericTfConfig {
  SystemConfig system;
  TimeGrid grid;
};

/// Either a single parameter point or a sweep, never both.
struct ThreeLevelConfig {
  std::optional<three_level::Params> params;
  std::optional<three_level::SweepSpec> sweep;
  int grid_points = 2001;
};

struct ProtocolRunConfig {
  SystemConfig system;
  ProtocolConfig protocol;
};

/// A named species, or an explicit mass (with optional hbar) in SI units.
struct ToaConfig {
  std::string species;  // empty when the mass is explicit
  matterwave::ParticleSpec particle;
  double detector = 0.0;
  std::optional<TimeGrid> grid;  // automatic window when absent
};

struct Table1Config {
  double g = matterwave::g_earth;
};

struct AuditConfig {
  int dim_min = 2;
  int dim_max = 8;
  int count = 1000;
  std::uint64_t seed = 42;
};

using Payload =
    std::variant<GenericTfConfig, ThreeLevelConfig, ProtocolRunConfig, ToaConfig, Table1Config, AuditConfig>;

struct RunConfig {
  Payload payload;

  std::string_view workflow() const;
};

/// Workflow names in payload order.
inline constexpr std::string_view workflow_names[] = {"generic-tf", "three-level", "protocol",
                                                      "toa",        "table1",      "audit"};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Parses one workflow payload, as if it sat under /<workflow>.
RunConfig parse_payload(std::string_view workflow, const nlohmann::json& body);

nlohmann::json to_json(const RunConfig& config);

/// Field-wise equality; matrices compare entry by entry.
bool equivalent(const RunConfig& a, const RunConfig& b);

nlohmann::json complex_matrix_to_json(const Matrix& m);

}  // namespace tof
