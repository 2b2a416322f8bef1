#include "tof/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

namespace tof {

using nlohmann::json;

namespace {

std::string child(const std::string& ptr, std::string_view key) {
  std::string out = ptr + "/";
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

std::string child(const std::string& ptr, std::size_t index) { return ptr + "/" + std::to_string(index); }

const char* type_name(const json& j) { return j.type_name(); }

void require_object(const json& j, const std::string& ptr) {
  if (!j.is_object()) throw ConfigError(ptr, std::string("expected an object, got ") + type_name(j));
}

void reject_unknown(const json& obj, const std::string& ptr, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(child(ptr, key), "unknown key");
  }
}

const json* field(const json& obj, std::string_view key) {
  const auto it = obj.find(std::string(key));
  return it == obj.end() ? nullptr : &*it;
}

const json& required(const json& obj, const std::string& ptr, std::string_view key) {
  const json* f = field(obj, key);
  if (!f) throw ConfigError(child(ptr, key), "missing required key");
  return *f;
}

double number(const json& j, const std::string& ptr) {
  if (!j.is_number()) throw ConfigError(ptr, std::string("expected a number, got ") + type_name(j));
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(ptr, "expected a finite number");
  return v;
}

std::int64_t integer(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) throw ConfigError(ptr, std::string("expected an integer, got ") + type_name(j));
  if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
    throw ConfigError(ptr, "integer out of range");
  return j.get<std::int64_t>();
}

int small_integer(const json& j, const std::string& ptr) {
  const std::int64_t v = integer(j, ptr);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ConfigError(ptr, "integer out of range");
  return static_cast<int>(v);
}

std::uint64_t seed_value(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) throw ConfigError(ptr, std::string("expected an integer, got ") + type_name(j));
  if (!j.is_number_unsigned() && j.get<std::int64_t>() < 0) throw ConfigError(ptr, "seed must be >= 0");
  return j.get<std::uint64_t>();
}

std::string string_value(const json& j, const std::string& ptr) {
  if (!j.is_string()) throw ConfigError(ptr, std::string("expected a string, got ") + type_name(j));
  return j.get<std::string>();
}

std::complex<double> complex_entry(const json& j, const std::string& ptr) {
  if (!j.is_object()) throw ConfigError(ptr, std::string("expected {\"re\", \"im\"}, got ") + type_name(j));
  reject_unknown(j, ptr, {"re", "im"});
  return {number(required(j, ptr, "re"), child(ptr, "re")), number(required(j, ptr, "im"), child(ptr, "im"))};
}

Matrix complex_matrix(const json& j, const std::string& ptr) {
  if (!j.is_array() || j.empty()) throw ConfigError(ptr, "expected a nonempty array of rows");
  const auto d = static_cast<Index>(j.size());
  Matrix m(d, d);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const json& row = j[r];
    const std::string rp = child(ptr, r);
    if (!row.is_array()) throw ConfigError(rp, std::string("expected a row array, got ") + type_name(row));
    if (row.size() != j.size()) {
      std::ostringstream os;
      os << "matrix must be square: row has " << row.size() << " entries, expected " << j.size();
      throw ConfigError(rp, os.str());
    }
    for (std::size_t c = 0; c < row.size(); ++c)
      m(static_cast<Index>(r), static_cast<Index>(c)) = complex_entry(row[c], child(rp, c));
  }
  return m;
}

// Runs a module constructor, re-raising its validation message at `ptr`.
template <class F>
auto validated(const std::string& ptr, F&& make) {
  try {
    return make();
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ConfigError(ptr, e.what());
  }
}

TimeGrid parse_grid(const json& j, const std::string& ptr) {
  require_object(j, ptr);
  reject_unknown(j, ptr, {"t0", "tf", "n"});
  const double t0 = field(j, "t0") ? number(j["t0"], child(ptr, "t0")) : 0.0;
  const double tf = number(required(j, ptr, "tf"), child(ptr, "tf"));
  const int n = small_integer(required(j, ptr, "n"), child(ptr, "n"));
  if (n < TimeGrid::min_points)
    throw ConfigError(child(ptr, "n"), "grid needs n >= " + std::to_string(TimeGrid::min_points) + ", got " +
                                           std::to_string(n));
  return validated(ptr, [&] { return TimeGrid(t0, tf, n); });
}

json grid_to_json(const TimeGrid& g) { return {{"t0", g.t0()}, {"tf", g.tf()}, {"n", g.size()}}; }

// hbar, H, rho0 and M of an object whose remaining keys the caller checks.
SystemConfig parse_system(const json& j, const std::string& ptr) {
  const double hbar = field(j, "hbar") ? number(j["hbar"], child(ptr, "hbar")) : 1.0;
  if (!(hbar > 0.0)) throw ConfigError(child(ptr, "hbar"), "hbar must be positive");
  const std::string hp = child(ptr, "H"), rp = child(ptr, "rho0"), mp = child(ptr, "M");
  Hamiltonian h = validated(hp, [&] { return Hamiltonian(complex_matrix(required(j, ptr, "H"), hp)); });
  DensityMatrix rho0 =
      validated(rp, [&] { return DensityMatrix(complex_matrix(required(j, ptr, "rho0"), rp)); });
  Projector m = validated(mp, [&] { return Projector(complex_matrix(required(j, ptr, "M"), mp)); });
  if (rho0.dim() != h.dim()) throw ConfigError(rp, "dimension does not match H");
  if (m.dim() != h.dim()) throw ConfigError(mp, "dimension does not match H");
  return {hbar, std::move(h), std::move(rho0), std::move(m)};
}

void system_to_json(const SystemConfig& s, json& out) {
  out["hbar"] = s.hbar;
  out["H"] = complex_matrix_to_json(s.h.matrix());
  out["rho0"] = complex_matrix_to_json(s.rho0.matrix());
  out["M"] = complex_matrix_to_json(s.m.matrix());
}

three_level::Params parse_params(const json& j, const std::string& ptr, three_level::Params p) {
  require_object(j, ptr);
  reject_unknown(j, ptr, {"omega1", "omega2", "detuning"});
  if (field(j, "omega1")) p.omega1 = number(j["omega1"], child(ptr, "omega1"));
  if (field(j, "omega2")) p.omega2 = number(j["omega2"], child(ptr, "omega2"));
  if (field(j, "detuning")) p.detuning = number(j["detuning"], child(ptr, "detuning"));
  return p;
}

json params_to_json(const three_level::Params& p) {
  return {{"omega1", p.omega1}, {"omega2", p.omega2}, {"detuning", p.detuning}};
}

three_level::Swept parse_swept(const json& j, const std::string& ptr) {
  const std::string s = string_value(j, ptr);
  if (s == "omega1") return three_level::Swept::omega1;
  if (s == "detuning") return three_level::Swept::detuning;
  throw ConfigError(ptr, "expected \"omega1\" or \"detuning\", got \"" + s + "\"");
}

GenericTfConfig parse_generic(const json& j, const std::string& ptr) {
  require_object(j, ptr);
  reject_unknown(j, ptr, {"hbar", "H", "rho0", "M", "grid"});
  SystemConfig system = parse_system(j, ptr);
  TimeGrid grid = parse_grid(required(j, ptr, "grid"), child(ptr, "grid"));
  return {std::move(system), grid};
}

ThreeLevelConfig parse_three_level(const json& j, const std::string& ptr) {
  require_object(j, ptr);
  reject_unknown(j, ptr, {"params", "sweep", "grid_points"});
  ThreeLevelConfig out;
  if (field(j, "grid_points")) out.grid_points = small_integer(j["grid_points"], child(ptr, "grid_points"));
  if (out.grid_points < TimeGrid::min_points)
    throw ConfigError(child(ptr, "grid_points"), "grid_points must be >= 11");
  const bool has_params = field(j, "params") != nullptr;
  const bool has_sweep = field(j, "sweep") != nullptr;
  if (has_params == has_sweep) throw ConfigError(ptr, "exactly one of \"params\" or \"sweep\" is required");

  if (has_params) {
    const std::string pp = child(ptr, "params");
    out.params = parse_params(j["params"], pp, {});
    validated(pp, [&] { out.params->validate(); return 0; });
    return out;
  }

  const std::string sp = child(ptr, "sweep");
  const json& s = j["sweep"];
  require_object(s, sp);
  reject_unknown(s, sp, {"swept", "values", "fixed"});
  const auto swept = parse_swept(required(s, sp, "swept"), child(sp, "swept"));
  three_level::SweepSpec spec = three_level::default_sweep(swept);
  if (field(s, "fixed")) spec.fixed = parse_params(s["fixed"], child(sp, "fixed"), spec.fixed);
  if (field(s, "values")) {
    const std::string vp = child(sp, "values");
    const json& v = s["values"];
    if (!v.is_array()) throw ConfigError(vp, std::string("expected an array, got ") + type_name(v));
    spec.values.clear();
    for (std::size_t i = 0; i < v.size(); ++i) spec.values.push_back(number(v[i], child(vp, i)));
  }
  spec.grid_points_per_period = out.grid_points;
  validated(sp, [&] {
    spec.validate();
    for (double value : spec.values) three_level::with_value(spec, value).validate();
    return 0;
  });
  out.sweep = std::move(spec);
  return out;
}

ProtocolRunConfig parse_protocol(const json& j, const std::string& ptr) {
  require_object(j, ptr);
  reject_unknown(j, ptr, {"hbar", "H", "rho0", "M", "grid", "shots_per_time", "seed"});
  SystemConfig system = parse_system(j, ptr);
  ProtocolConfig cfg{parse_grid(required(j, ptr, "grid"), child(ptr, "grid")), 1, 0};
  cfg.shots_per_time = integer(required(j, ptr, "shots_per_time"), child(ptr, "shots_per_time"));
  if (field(j, "seed")) cfg.seed = seed_value(j["seed"], child(ptr, "seed"));
  validated(child(ptr, "shots_per_time"), [&] { cfg.validate(); return 0; });
  return {std::move(system), cfg};
}

ToaConfig parse_toa(const json& j, const std::string& ptr) {
  require_object(j, ptr);
  reject_unknown(j, ptr, {"species", "mass", "hbar", "g", "sigma", "detector", "grid"});
  ToaConfig out;
  const bool has_species = field(j, "species") != nullptr;
  const bool has_mass = field(j, "mass") != nullptr;
  if (has_species == has_mass) throw ConfigError(ptr, "exactly one of \"species\" or \"mass\" is required");
  if (has_species) {
    if (field(j, "hbar")) throw ConfigError(child(ptr, "hbar"), "hbar applies only with an explicit mass");
    const std::string sp = child(ptr, "species");
    const auto& species = validated(sp, [&]() -> const matterwave::Species& {
      return matterwave::find_species(string_value(j["species"], sp));
    });
    out.species = std::string(species.name);
    out.particle.mass = species.mass;
  } else {
    out.particle.mass = number(j["mass"], child(ptr, "mass"));
    if (field(j, "hbar")) out.particle.hbar = number(j["hbar"], child(ptr, "hbar"));
  }
  if (field(j, "g")) out.particle.g = number(j["g"], child(ptr, "g"));
  out.particle.sigma = number(required(j, ptr, "sigma"), child(ptr, "sigma"));
  out.detector = number(required(j, ptr, "detector"), child(ptr, "detector"));
  validated(ptr, [&] { out.particle.validate(); return 0; });
  if (!(out.particle.g > 0.0)) throw ConfigError(child(ptr, "g"), "g must be positive");
  if (!(out.detector > 0.0)) throw ConfigError(child(ptr, "detector"), "detector must sit below the start (> 0)");
  if (field(j, "grid")) out.grid = parse_grid(j["grid"], child(ptr, "grid"));
  return out;
}

Table1Config parse_table1(const json& j, const std::string& ptr) {
  require_object(j, ptr);
  reject_unknown(j, ptr, {"g"});
  Table1Config out;
  if (field(j, "g")) out.g = number(j["g"], child(ptr, "g"));
  if (!(out.g > 0.0)) throw ConfigError(child(ptr, "g"), "g must be positive");
  return out;
}

AuditConfig parse_audit(const json& j, const std::string& ptr) {
  require_object(j, ptr);
  reject_unknown(j, ptr, {"dim_min", "dim_max", "count", "seed"});
  AuditConfig out;
  if (field(j, "dim_min")) out.dim_min = small_integer(j["dim_min"], child(ptr, "dim_min"));
  if (field(j, "dim_max")) out.dim_max = small_integer(j["dim_max"], child(ptr, "dim_max"));
  if (field(j, "count")) out.count = small_integer(j["count"], child(ptr, "count"));
  if (field(j, "seed")) out.seed = seed_value(j["seed"], child(ptr, "seed"));
  if (out.dim_min < 2 || out.dim_max < out.dim_min || out.dim_max > 8)
    throw ConfigError(ptr, "need 2 <= dim_min <= dim_max <= 8");
  if (out.count < 1) throw ConfigError(child(ptr, "count"), "count must be >= 1");
  return out;
}

bool same(const Matrix& a, const Matrix& b) { return a.rows() == b.rows() && a.cols() == b.cols() && a == b; }

bool same(const SystemConfig& a, const SystemConfig& b) {
  return a.hbar == b.hbar && same(a.h.matrix(), b.h.matrix()) && same(a.rho0.matrix(), b.rho0.matrix()) &&
         same(a.m.matrix(), b.m.matrix());
}

bool same(const GenericTfConfig& a, const GenericTfConfig& b) { return same(a.system, b.system) && a.grid == b.grid; }

bool same(const ThreeLevelConfig& a, const ThreeLevelConfig& b) {
  return a.params == b.params && a.sweep == b.sweep && a.grid_points == b.grid_points;
}

bool same(const ProtocolRunConfig& a, const ProtocolRunConfig& b) {
  return same(a.system, b.system) && a.protocol.grid == b.protocol.grid &&
         a.protocol.shots_per_time == b.protocol.shots_per_time && a.protocol.seed == b.protocol.seed;
}

bool same(const ToaConfig& a, const ToaConfig& b) {
  const auto& p = a.particle;
  const auto& q = b.particle;
  return a.species == b.species && p.mass == q.mass && p.g == q.g && p.sigma == q.sigma && p.hbar == q.hbar &&
         a.detector == b.detector && a.grid == b.grid;
}

bool same(const Table1Config& a, const Table1Config& b) { return a.g == b.g; }

bool same(const AuditConfig& a, const AuditConfig& b) {
  return a.dim_min == b.dim_min && a.dim_max == b.dim_max && a.count == b.count && a.seed == b.seed;
}

}  // namespace

std::string_view RunConfig::workflow() const { return workflow_names[payload.index()]; }

json complex_matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back({{"re", m(r, c).real()}, {"im", m(r, c).imag()}});
    rows.push_back(std::move(row));
  }
  return rows;
}

RunConfig parse_payload(std::string_view workflow, const json& body) {
  const std::string ptr = child("", workflow);
  if (workflow == "generic-tf") return {parse_generic(body, ptr)};
  if (workflow == "three-level") return {parse_three_level(body, ptr)};
  if (workflow == "protocol") return {parse_protocol(body, ptr)};
  if (workflow == "toa") return {parse_toa(body, ptr)};
  if (workflow == "table1") return {parse_table1(body, ptr)};
  if (workflow == "audit") return {parse_audit(body, ptr)};
  throw ConfigError(ptr, "unknown workflow");
}

RunConfig parse_config(const json& doc) {
  require_object(doc, "");
  if (doc.size() != 1) throw ConfigError("", "expected exactly one workflow key, got " + std::to_string(doc.size()));
  const auto it = doc.begin();
  return parse_payload(it.key(), it.value());
}

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(std::string_view(text.str()));
}

json to_json(const RunConfig& config) {
  json body = json::object();
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GenericTfConfig>) {
          system_to_json(p.system, body);
          body["grid"] = grid_to_json(p.grid);
        } else if constexpr (std::is_same_v<T, ThreeLevelConfig>) {
          body["grid_points"] = p.grid_points;
          if (p.params) body["params"] = params_to_json(*p.params);
          if (p.sweep)
            body["sweep"] = {{"swept", three_level::to_string(p.sweep->swept)},
                             {"values", p.sweep->values},
                             {"fixed", params_to_json(p.sweep->fixed)}};
        } else if constexpr (std::is_same_v<T, ProtocolRunConfig>) {
          system_to_json(p.system, body);
          body["grid"] = grid_to_json(p.protocol.grid);
          body["shots_per_time"] = p.protocol.shots_per_time;
          body["seed"] = p.protocol.seed;
        } else if constexpr (std::is_same_v<T, ToaConfig>) {
          if (p.species.empty()) {
            body["mass"] = p.particle.mass;
            body["hbar"] = p.particle.hbar;
          } else {
            body["species"] = p.species;
          }
          body["g"] = p.particle.g;
          body["sigma"] = p.particle.sigma;
          body["detector"] = p.detector;
          if (p.grid) body["grid"] = grid_to_json(*p.grid);
        } else if constexpr (std::is_same_v<T, Table1Config>) {
          body["g"] = p.g;
        } else {
          body["dim_min"] = p.dim_min;
          body["dim_max"] = p.dim_max;
          body["count"] = p.count;
          body["seed"] = p.seed;
        }
      },
      config.payload);
  return {{std::string(config.workflow()), body}};
}

bool equivalent(const RunConfig& a, const RunConfig& b) {
  if (a.payload.index() != b.payload.index()) return false;
  return std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        return same(p, std::get<T>(b.payload));
      },
      a.payload);
}

}  // namespace tof
