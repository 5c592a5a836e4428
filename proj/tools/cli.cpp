#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "gufic/energy_audit.hpp"
#include "gufic/errors.hpp"
#include "gufic/plots.hpp"
#include "gufic/sim.hpp"

namespace fs = std::filesystem;

namespace gufic::cli {

namespace {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

Level log_level() {
  const char* env = std::getenv("GUFIC_LOG_LEVEL");
  if (!env) return Level::Info;
  const std::string v(env);
  if (v == "error" || v == "quiet") return Level::Error;
  if (v == "warn" || v == "warning") return Level::Warn;
  if (v == "debug") return Level::Debug;
  return Level::Info;
}

void log(Level level, const std::string& msg) {
  if (level > log_level()) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::cerr << "gufic [" << names[static_cast<int>(level)] << "] " << msg << '\n';
}

struct RunResult {
  LogTable log;
  AuditReport audit;
  AuditReport audit_sensed;  // informational: port power from the filtered wrench
  double seconds = 0.0;
};

RunResult run_one(const ScenarioConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunResult r;
  r.log = simulate(config);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.audit = passivity_audit(r.log, config.audit_tolerance);
  r.audit_sensed = passivity_audit(r.log, config.audit_tolerance, true);
  return r;
}

void write_outputs(const RunResult& r, const std::string& label, const fs::path& dir) {
  fs::create_directories(dir);
  write_log_csv(dir / "log.csv", r.log);
  std::ofstream(dir / "audit.txt")
      << format_audit({{label, r.audit}, {label + ", sensed F_e (informational)", r.audit_sensed}});
  write_margin_csv(dir / "audit_margin.csv", r.audit);
  const auto plots = render_plots(r.log, dir / "plots");
  if (plots.empty()) log(Level::Warn, "empty log, no plots written");
  for (const auto& p : plots) log(Level::Debug, "wrote " + p.string());
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void report(const RunResult& r, const std::string& label, const fs::path& dir, Level on_fail) {
  log(Level::Info, label + ": " + std::to_string(r.log.rows()) + " steps in " + num(r.seconds) +
                       " s, output in " + dir.string());
  log(r.audit.pass ? Level::Info : on_fail,
      label + ": passivity audit " + (r.audit.pass ? "passed" : "FAILED") + ", worst margin " +
          num(r.audit.worst_margin) + " J");
}

ScenarioConfig load(const std::string& path, const std::optional<std::string>& controller,
                    const std::optional<double>& duration, const std::optional<std::string>& out) {
  ScenarioConfig c = load_scenario(path);
  if (controller) c.controller = parse_controller(*controller);
  if (duration) c.duration = *duration;
  if (out) c.output_dir = *out;
  c.validate();
  return c;
}

int cmd_run(const std::string& config, const std::optional<std::string>& controller,
            const std::optional<double>& duration, const std::optional<std::string>& out) {
  const ScenarioConfig c = load(config, controller, duration, out);
  const std::string label = controller_name(c.controller);
  const RunResult r = run_one(c);
  write_outputs(r, label, c.output_dir);
  report(r, label, c.output_dir, Level::Error);
  return r.audit.pass ? kOk : kAuditFailure;
}

int cmd_compare(const std::string& config, const std::optional<double>& duration,
                const std::optional<std::string>& out) {
  ScenarioConfig gufic = load(config, std::string("gufic"), duration, out);
  ScenarioConfig gic = gufic;
  gic.controller = ControllerKind::Gic;
  const fs::path root = gufic.output_dir;

  // Each run owns its config and state; results are joined before plotting.
  auto fa = std::async(std::launch::async, run_one, std::cref(gufic));
  auto fb = std::async(std::launch::async, run_one, std::cref(gic));
  const RunResult a = fa.get();
  const RunResult b = fb.get();

  write_outputs(a, "gufic", root / "gufic");
  write_outputs(b, "gic", root / "gic");
  std::ofstream(root / "audit.txt") << format_audit({{"gufic", a.audit}, {"gic", b.audit}});
  const auto plots = render_compare_plots(a.log, "GUFIC", b.log, "GIC", root / "plots");
  if (plots.empty()) log(Level::Warn, "empty log, no comparison plots written");
  report(a, "gufic", root / "gufic", Level::Error);
  report(b, "gic", root / "gic", Level::Warn);
  // The baseline carries no passivity guarantee; only the GUFIC run gates the exit code.
  return a.audit.pass ? kOk : kAuditFailure;
}

int cmd_audit(const std::string& path, double tol, bool sensed) {
  const LogTable log = read_log_csv(path);
  const AuditReport r = passivity_audit(log, tol, sensed);
  std::cout << format_audit({{fs::path(path).filename().string(), r}});
  return r.pass ? kOk : kAuditFailure;
}

int cmd_validate(const std::string& path) {
  const ScenarioConfig c = load_scenario(path);
  c.validate();
  std::cout << path << ": ok (" << controller_name(c.controller) << ", " << c.steps()
            << " steps)\n";
  return kOk;
}

}  // namespace

int run_scenario_cli(const std::vector<std::string>& args) {
  CLI::App app{"Geometric unified force-impedance control on SE(3): simulation and audit"};
  app.require_subcommand(1);

  std::string config, logpath;
  std::optional<std::string> controller, out;
  std::optional<double> duration;
  double tol = kDefaultAuditTolerance;
  bool sensed = false;

  auto* run = app.add_subcommand("run", "simulate one scenario and write log, plots and audit");
  run->add_option("--config", config, "scenario JSON")->required();
  run->add_option("--controller", controller, "gufic | gic | naive");
  run->add_option("--duration", duration, "override duration, s");
  run->add_option("--out", out, "output directory");

  auto* compare = app.add_subcommand("compare", "run GUFIC and GIC side by side");
  compare->add_option("--config", config, "scenario JSON")->required();
  compare->add_option("--duration", duration, "override duration, s");
  compare->add_option("--out", out, "output directory");

  auto* audit = app.add_subcommand("audit", "passivity audit of a log");
  audit->add_option("--log", logpath, "log CSV")->required();
  audit->add_option("--tol", tol, "tolerance, J");
  audit->add_flag("--sensed", sensed, "use the filtered sensor wrench for the port");

  auto* validate = app.add_subcommand("validate", "schema check of a scenario");
  validate->add_option("--config", config, "scenario JSON")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(config, controller, duration, out);
    if (*compare) return cmd_compare(config, duration, out);
    if (*audit) return cmd_audit(logpath, tol, sensed);
    if (*validate) return cmd_validate(config);
  } catch (const ConfigError& e) {
    log(Level::Error, std::string("config error: ") + e.what());
    return kConfigError;
  } catch (const SimulationError& e) {
    log(Level::Error, "simulation failed at step " + std::to_string(e.step()) + ": " + e.what());
    return kSimulationError;
  } catch (const NearSingular& e) {
    log(Level::Error, std::string("simulation failed: ") + e.what());
    return kSimulationError;
  } catch (const NoConvergence& e) {
    log(Level::Error, std::string("simulation failed: ") + e.what());
    return kSimulationError;
  } catch (const MissingChannel& e) {
    log(Level::Error, std::string("log rejected: ") + e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    log(Level::Error, e.what());
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace gufic::cli
