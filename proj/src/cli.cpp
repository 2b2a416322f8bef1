#include "tof/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "tof/ensemble_audit.hpp"
#include "tof/matterwave.hpp"
#include "tof/protocol.hpp"
#include "tof/three_level.hpp"

namespace tof {

using nlohmann::json;

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::logic_error("table row width does not match header");
  rows.push_back(std::move(row));
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CsvCell {
  std::string operator()(double v) const { return format_double(v); }
  std::string operator()(std::int64_t v) const { return std::to_string(v); }
  std::string operator()(const std::string& s) const { return s; }
};

json audit_to_json(const BoundAudit& a) {
  return {{"bound", to_string(a.bound)}, {"lhs", a.lhs}, {"rhs", a.rhs}, {"margin", a.margin}, {"passed", a.passed}};
}

json stats_to_json(const TimingStatistics& s) {
  return {{"mean", s.mean}, {"second_moment", s.second_moment}, {"stddev", s.stddev}, {"pi_max", s.pi_max}};
}

std::int64_t flag(bool b) { return b ? 1 : 0; }

void run_generic(const GenericTfConfig& cfg, RunReport& report) {
  const UnitSystem units = cfg.system.units();
  const ProbabilityTrace trace = probability_trace(cfg.system.h, cfg.system.rho0, cfg.system.m, cfg.grid, units);
  const TfDistribution tf = tf_distribution(trace);
  const TimingStatistics stats = timing_statistics(tf);
  const double dh = std_deviation(cfg.system.rho0, cfg.system.h.matrix());

  Table table{{"t", "p", "rate", "density"}, {}};
  for (int k = 0; k < cfg.grid.size(); ++k)
    table.add({cfg.grid.time(k), trace.p(k), trace.rate(k), tf.density()(k)});
  report.tables.push_back({"tf", std::move(table)});

  report.audits.push_back({"system", audit_chebyshev(stats)});
  const bool defined = tf.delta_theta() > min_delta_theta;
  if (defined) {
    report.audits.push_back({"system", audit_uniform_bound(tf, dh, units)});
    report.audits.push_back({"system", audit_time_energy(stats, dh, tf.delta_theta(), units)});
  }
  report.summary = {{"statistics", stats_to_json(stats)},
                    {"delta_theta", tf.delta_theta()},
                    {"energy_spread", dh},
                    {"norm_const", tf.norm_const()},
                    {"quadrature", to_string(tf.rule())},
                    {"source", to_string(tf.source())},
                    {"rate_and_time_energy_bounds", defined ? "audited" : "undefined (zero net transfer)"}};
}

Table series_table(const three_level::Series& s) {
  Table table{{"t", "p2", "density"}, {}};
  for (int k = 0; k < s.grid.size(); ++k) table.add({s.grid.time(k), s.population(k), s.density(k)});
  return table;
}

void run_three_level(const ThreeLevelConfig& cfg, RunReport& report) {
  using namespace three_level;
  if (cfg.params) {
    const SweepRow row = analyze(*cfg.params, 0.0, cfg.grid_points);
    report.tables.push_back({"series", series_table(series(*cfg.params, cfg.grid_points))});
    json summary = {{"omega", row.omega},     {"window", row.window},
                    {"dT", row.time_spread},  {"dH", row.energy_spread},
                    {"product", row.product}, {"bound", row.bound},
                    {"delta_theta", row.delta_theta}, {"skipped", row.skipped}};
    if (!row.skipped)
      report.audits.push_back({"params", BoundAudit::compare(BoundKind::time_energy, row.product, row.bound)});
    report.summary = std::move(summary);
    return;
  }

  const SweepSpec& spec = *cfg.sweep;
  const SweepResult result = uncertainty_sweep(spec);
  Table table{{"param", "omega", "window", "dT", "dH", "product", "bound", "delta_theta", "passed", "skipped"}, {}};
  int skipped = 0;
  for (const SweepRow& row : result.rows) {
    table.add({row.value, row.omega, row.window, row.time_spread, row.energy_spread, row.product, row.bound,
               row.delta_theta, flag(row.passed), flag(row.skipped)});
    if (row.skipped) {
      ++skipped;
      continue;
    }
    std::ostringstream ctx;
    ctx << to_string(spec.swept) << "=" << format_double(row.value);
    report.audits.push_back({ctx.str(), BoundAudit::compare(BoundKind::time_energy, row.product, row.bound)});
  }
  report.tables.push_back({"sweep", std::move(table)});
  report.tables.push_back({"series", series_table(series(spec.fixed, cfg.grid_points))});
  report.summary = {{"swept", to_string(spec.swept)},
                    {"points", result.rows.size()},
                    {"skipped_stationary", skipped},
                    {"fixed",
                     {{"omega1", spec.fixed.omega1}, {"omega2", spec.fixed.omega2}, {"detuning", spec.fixed.detuning}}}};
}

void run_protocol_workflow(const ProtocolRunConfig& cfg, RunReport& report) {
  const UnitSystem units = cfg.system.units();
  const ProtocolConfig& pc = cfg.protocol;
  const ProbabilityTrace trace = probability_trace(cfg.system.h, cfg.system.rho0, cfg.system.m, pc.grid, units);
  const ShotCounts counts = sample_counts(pc.grid, trace.p, pc.shots_per_time, pc.seed);
  const TfDistribution estimate = reconstruct_tf(counts);
  const TfDistribution exact = tf_distribution(trace);

  Table table{{"t_mid", "density_hat"}, {}};
  const TimeGrid& mid = estimate.grid();
  for (int k = 0; k < mid.size(); ++k) table.add({mid.time(k), estimate.density()(k)});
  report.tables.push_back({"protocol", std::move(table)});

  Table raw{{"t", "counts", "p"}, {}};
  for (int k = 0; k < pc.grid.size(); ++k)
    raw.add({pc.grid.time(k), static_cast<std::int64_t>(std::llround(counts.counts(k))), trace.p(k)});
  report.tables.push_back({"counts", std::move(raw)});

  report.summary = {{"shots_per_time", pc.shots_per_time},
                    {"seed", pc.seed},
                    {"tv_distance", protocol_error(estimate, exact)},
                    {"delta_theta_hat", estimate.delta_theta()},
                    {"delta_theta", exact.delta_theta()}};
}

void run_toa(const ToaConfig& cfg, RunReport& report) {
  using namespace matterwave;
  const TimeGrid grid = cfg.grid ? *cfg.grid : toa_window(cfg.particle, cfg.detector);
  const ToaDistribution toa = toa_distribution(cfg.particle, cfg.detector, grid);

  Table table{{"t", "j", "density"}, {}};
  for (int k = 0; k < grid.size(); ++k) table.add({grid.time(k), toa.current(k), toa.tf.density()(k)});
  report.tables.push_back({"toa", std::move(table)});

  for (const BoundAudit& a : toa_bounds(toa, cfg.particle)) report.audits.push_back({"detector", a});
  report.summary = {{"species", cfg.species.empty() ? json(nullptr) : json(cfg.species)},
                    {"statistics", stats_to_json(toa.stats)},
                    {"classical_arrival", std::sqrt(2.0 * cfg.detector / cfg.particle.g)},
                    {"delta_theta", toa.tf.delta_theta()},
                    {"energy_spread", energy_spread(cfg.particle)},
                    {"sigma_c", sigma_c(cfg.particle)},
                    {"window", {{"t0", grid.t0()}, {"tf", grid.tf()}, {"n", grid.size()}}}};
}

void run_table1(const Table1Config& cfg, RunReport& report) {
  Table table{{"species", "mass_kg", "sigma_c_um", "dT_min_us"}, {}};
  for (const auto& row : matterwave::table1(cfg.g)) table.add({row.name, row.mass, row.sigma_c * 1e6, row.dt_min * 1e6});
  report.tables.push_back({"table1", std::move(table)});
  report.summary = {{"g", cfg.g}, {"sigma", matterwave::table_sigma}};
}

void run_audit(const AuditConfig& cfg, RunReport& report) {
  const auto trials = random_ensemble_audit(cfg.dim_min, cfg.dim_max, cfg.count, cfg.seed);
  Table table{{"index", "dim", "state_rank", "projector_rank", "status", "delta_theta", "energy_spread",
               "chebyshev_margin", "uniform_margin", "time_energy_margin", "violated"},
              {}};
  const double nan = std::nan("");
  auto margin = [&](const std::optional<BoundAudit>& a) { return a ? a->margin : nan; };
  for (const EnsembleTrial& t : trials) {
    const TrialAudit& a = t.audit;
    table.add({static_cast<std::int64_t>(t.index), std::int64_t{t.dim}, std::int64_t{t.state_rank},
               std::int64_t{t.projector_rank}, std::string(to_string(a.status)), a.delta_theta, a.energy_spread,
               margin(a.chebyshev), margin(a.uniform_rate), margin(a.time_energy), flag(a.violated())});
    const std::string ctx = "trial " + std::to_string(t.index);
    for (const auto* opt : {&a.chebyshev, &a.uniform_rate, &a.time_energy})
      if (*opt) report.audits.push_back({ctx, **opt});
  }
  report.tables.push_back({"audit", std::move(table)});
  const EnsembleSummary s = summarize(trials);
  report.summary = {{"trials", s.trials},
                    {"audited", s.audited},
                    {"skipped_stationary", s.skipped_stationary},
                    {"undefined_bound", s.undefined_bound},
                    {"violations",
                     {{"chebyshev", s.chebyshev_violations},
                      {"uniform-rate", s.uniform_violations},
                      {"time-energy", s.time_energy_violations}}},
                    {"dims", {cfg.dim_min, cfg.dim_max}},
                    {"seed", cfg.seed}};
}

// Applies the --seed override and reports which seed the run used.
RunConfig with_seed(RunConfig config, const RunOptions& options, std::optional<std::uint64_t>& used) {
  if (auto* p = std::get_if<ProtocolRunConfig>(&config.payload)) {
    if (options.seed) p->protocol.seed = *options.seed;
    used = p->protocol.seed;
  } else if (auto* a = std::get_if<AuditConfig>(&config.payload)) {
    if (options.seed) a->seed = *options.seed;
    used = a->seed;
  } else {
    used = options.seed;
  }
  return config;
}

std::string extension(OutputFormat f) { return f == OutputFormat::csv ? ".csv" : ".json"; }

void write_outputs(RunReport& report, const std::string& dir, OutputFormat format) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory '" + dir + "': " + ec.message());
  for (const NamedTable& t : report.tables) {
    const std::string path = (fs::path(dir) / (t.name + extension(format))).string();
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot write '" + path + "'");
    if (format == OutputFormat::csv) write_csv(os, t.table);
    else os << table_to_json(t.table).dump(2) << "\n";
    report.outputs.push_back(path);
  }
}

void write_report(const RunReport& report, const std::string& dir) {
  const std::string path = (std::filesystem::path(dir) / "report.json").string();
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write '" + path + "'");
  os << report.to_json().dump(2) << "\n";
}

}  // namespace

void write_csv(std::ostream& os, const Table& table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << table.columns[c];
  os << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << std::visit(CsvCell{}, row[c]);
    os << "\n";
  }
}

json table_to_json(const Table& table) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    json r = json::array();
    for (const auto& cell : row) std::visit([&](const auto& v) { r.push_back(v); }, cell);
    rows.push_back(std::move(r));
  }
  return {{"columns", table.columns}, {"rows", std::move(rows)}};
}

bool RunReport::audits_passed() const {
  return std::all_of(audits.begin(), audits.end(), [](const AuditRecord& r) { return r.audit.passed; });
}

json RunReport::to_json() const {
  json audit_list = json::array();
  int failed = 0;
  for (const auto& r : audits) {
    json a = audit_to_json(r.audit);
    a["context"] = r.context;
    audit_list.push_back(std::move(a));
    if (!r.audit.passed) ++failed;
  }
  return {{"version", version},
          {"workflow", workflow},
          {"seed", seed ? json(*seed) : json(nullptr)},
          {"wall_time_s", wall_time},
          {"outputs", outputs},
          {"summary", summary},
          {"audits", {{"total", audits.size()}, {"failed", failed}, {"results", std::move(audit_list)}}}};
}

RunReport run(const RunConfig& input, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  const RunConfig config = with_seed(input, options, report.seed);
  report.workflow = std::string(config.workflow());
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GenericTfConfig>) run_generic(p, report);
        else if constexpr (std::is_same_v<T, ThreeLevelConfig>) run_three_level(p, report);
        else if constexpr (std::is_same_v<T, ProtocolRunConfig>) run_protocol_workflow(p, report);
        else if constexpr (std::is_same_v<T, ToaConfig>) run_toa(p, report);
        else if constexpr (std::is_same_v<T, Table1Config>) run_table1(p, report);
        else run_audit(p, report);
      },
      config.payload);
  if (options.out_dir) write_outputs(report, *options.out_dir, options.format);
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (options.out_dir) write_report(report, *options.out_dir);
  return report;
}

namespace {

std::pair<int, int> parse_dims(const std::string& text) {
  const auto dots = text.find("..");
  try {
    std::size_t used = 0;
    if (dots == std::string::npos) {
      const int d = std::stoi(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return {d, d};
    }
    const std::string lo = text.substr(0, dots), hi = text.substr(dots + 2);
    const int a = std::stoi(lo, &used);
    if (used != lo.size()) throw std::invalid_argument(text);
    const int b = std::stoi(hi, &used);
    if (used != hi.size()) throw std::invalid_argument(text);
    return {a, b};
  } catch (const std::logic_error&) {
    throw ValidationError("--dims expects N or LO..HI, got '" + text + "'");
  }
}

struct CommonFlags {
  std::string config;
  std::string out;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, CommonFlags& f, bool config_required) {
  auto* c = sub->add_option("--config", f.config, "JSON run configuration");
  if (config_required) c->required();
  sub->add_option("--out", f.out, "Directory for CSV/JSON outputs and report.json");
  sub->add_option("--format", f.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--seed", f.seed, "Seed override for stochastic workflows");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-of-flow distributions, their timing bounds and arrival times"};
  app.set_version_flag("--version", std::string(version));
  app.require_subcommand(1);

  CommonFlags flags;
  std::string sweep = "detuning";
  std::string dims = "2..8";
  int count = 1000;

  auto* generic = app.add_subcommand("generic-tf", "TF distribution of a user-supplied system");
  add_common(generic, flags, true);
  auto* three = app.add_subcommand("three-level", "Time-energy sweep of the driven three-level system");
  add_common(three, flags, false);
  three->add_option("--sweep", sweep, "Default sweep when no config is given")
      ->check(CLI::IsMember({"omega1", "detuning"}));
  auto* protocol = app.add_subcommand("protocol", "Shot-based reconstruction of a TF distribution");
  add_common(protocol, flags, true);
  auto* toa = app.add_subcommand("toa", "Arrival-time distribution of a falling Gaussian packet");
  add_common(toa, flags, true);
  auto* table = app.add_subcommand("table1", "Critical widths and minimal arrival spreads per species");
  add_common(table, flags, false);
  auto* audit = app.add_subcommand("audit", "Bound audit over random closed systems");
  add_common(audit, flags, false);
  audit->add_option("--dims", dims, "Dimension range LO..HI");
  audit->add_option("--count", count, "Number of random systems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg;
    const int code = app.exit(e, out, msg);
    err << msg.str();
    return code == 0 ? exit_code::ok : exit_code::usage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    RunConfig config = [&]() -> RunConfig {
      if (!flags.config.empty()) {
        RunConfig c = load_config(flags.config);
        if (c.workflow() != name)
          throw ValidationError("config describes '" + std::string(c.workflow()) + "', not '" + name + "'");
        return c;
      }
      if (name == "three-level") {
        ThreeLevelConfig c;
        c.sweep = three_level::default_sweep(sweep == "omega1" ? three_level::Swept::omega1
                                                               : three_level::Swept::detuning);
        return {c};
      }
      if (name == "table1") return {Table1Config{}};
      return {AuditConfig{}};
    }();
    if (auto* a = std::get_if<AuditConfig>(&config.payload)) {
      if (audit->count("--dims")) std::tie(a->dim_min, a->dim_max) = parse_dims(dims);
      if (audit->count("--count")) a->count = count;
      config = parse_payload("audit", to_json(config)["audit"]);
    }

    RunOptions options;
    if (!flags.out.empty()) options.out_dir = flags.out;
    options.format = flags.format == "json" ? OutputFormat::json : OutputFormat::csv;
    options.seed = flags.seed;

    const RunReport report = run(config, options);
    if (!options.out_dir) {
      const Table& primary = report.tables.front().table;
      if (options.format == OutputFormat::csv) write_csv(out, primary);
      else out << table_to_json(primary).dump(2) << "\n";
    }
    if (!report.audits_passed()) {
      for (const auto& r : report.audits)
        if (!r.audit.passed)
          err << "audit failed: " << to_string(r.audit.bound) << " (" << r.context << "): lhs " << r.audit.lhs
              << " < rhs " << r.audit.rhs << "\n";
    }
    return report.exit_status();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return exit_code::numerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::numerical;
  }
}

}  // namespace tof
