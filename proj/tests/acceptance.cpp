// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gufic/energy_audit.hpp"
#include "gufic/log_table.hpp"
#include "gufic/robot_model.hpp"
#include "gufic/sim.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace gufic;
using gufic::test::Rng;

namespace {

constexpr double kPi = std::numbers::pi;

struct Check {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Run {
  LogTable log;
  double seconds = 0.0;
};

Run run(const ScenarioConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  Run r;
  r.log = simulate(c);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

ScenarioConfig scenario(const std::string& name) { return load_scenario(test::scenario_path(name)); }

// Rows with t >= t0.
std::size_t first_row_at(const LogTable& log, double t0) {
  const auto t = log.column("t");
  return static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), t0 - 1e-9) - t.begin());
}

// Mean |sensed normal force - desired| over t >= t0. The tool z axis points into
// the surface, so the reaction on the tool is -F_z in the tool frame.
double force_error(const LogTable& log, double t0) {
  const auto fs_z = log.column("Fes_fz"), fd_z = log.column("Fd_fz");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = first_row_at(log, t0); k < log.rows(); ++k, ++n) sum += std::abs(-fs_z[k] - fd_z[k]);
  return sum / static_cast<double>(n);
}

double window_max(const std::vector<double>& v, const LogTable& log, double t0, double t1) {
  double m = -1e300;
  for (std::size_t k = first_row_at(log, t0); k < first_row_at(log, t1); ++k) m = std::max(m, v[k]);
  return m;
}

std::string csv_bytes(const LogTable& log, const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gufic_acceptance_" + name + ".csv");
  write_log_csv(p, log);
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  fs::remove(p);
  return ss.str();
}

Check force_tracking(const Run& gufic, const Run& gic) {
  Check c;
  const double e = force_error(gufic.log, 15.0), eg = force_error(gic.log, 15.0);
  c.require(e <= 0.5, "GUFIC |F_z - 10| mean " + fmt("%.3g N", e) + " <= 0.5 N");
  c.require(eg >= 5.0 * e, "GIC " + fmt("%.3g N", eg) + fmt(" = %.0fx GUFIC", eg / std::max(e, 1e-12)) + " >= 5x");
  c.require(gufic.seconds <= 60.0, "runtime " + fmt("%.2f s", gufic.seconds) + " <= 60 s");
  return c;
}

Check trajectory_tracking(const Run& circle, const Run& sphere) {
  Check c;
  const LogTable& L = circle.log;
  const auto x = L.column("g_px"), y = L.column("g_py"), rx = L.column("ref_px"), ry = L.column("ref_py");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = first_row_at(L, 10.0); k < L.rows(); ++k, ++n)
    sum += (x[k] - rx[k]) * (x[k] - rx[k]) + (y[k] - ry[k]) * (y[k] - ry[k]);
  const double rms = std::sqrt(sum / static_cast<double>(n));
  c.require(rms <= 2e-3, "circle RMS xy " + fmt("%.3g m", rms) + " <= 2 mm");

  // Settled: below 0.05 over the final 5 s and not growing relative to 5-10 s.
  const auto psi = sphere.log.column("psi");
  const double late = window_max(psi, sphere.log, 15.0, 20.0 + 1e-3);
  const double early = window_max(psi, sphere.log, 5.0, 10.0);
  c.require(late < 0.05, "sphere max psi final 5 s " + fmt("%.3g", late) + " < 0.05");
  c.require(late <= early + 0.01 * 0.05, "psi growth since 5-10 s " + fmt("%.2g", late - early) + " <= 5e-4");
  return c;
}

Check passivity(const std::vector<std::pair<std::string, const Run*>>& runs, const Run& naive) {
  Check c;
  for (const auto& [name, r] : runs) {
    const AuditReport a = passivity_audit(r->log, kDefaultAuditTolerance);
    c.require(a.pass && a.steps == 20000,
              name + " worst " + fmt("%.2g J", a.worst_margin) + " over " + std::to_string(a.steps) + " steps");
  }
  const AuditReport n = passivity_audit(naive.log, kDefaultAuditTolerance);
  c.require(!n.pass && n.first_violation_time.has_value(),
            "naive fixture fails" + (n.first_violation_time ? fmt(" at t = %.3f s", *n.first_violation_time) : std::string()));
  return c;
}

Check tanks(const std::vector<std::pair<std::string, const Run*>>& runs, const ScenarioConfig& sphere_cfg,
            const Run& sphere, const Run& lowtank) {
  Check c;
  for (const auto& [name, r] : runs) {
    const ScenarioConfig cfg = scenario(name + ".json");
    bool ok = true;
    for (const auto& [col, upper] : {std::pair{"Tf", cfg.force_tank.upper}, std::pair{"Ti", cfg.impedance_tank.upper}}) {
      const auto T = r->log.column(col);
      double step = 0.0;  // largest one-step inflow seen in the run
      for (std::size_t k = 1; k < T.size(); ++k) step = std::max(step, T[k] - T[k - 1]);
      for (double v : T) ok = ok && v >= kTankFloor && v <= upper + step + 1e-12;
    }
    c.require(ok, name + " tanks within [floor, cap + one step]");
  }
  const auto Ti = sphere.log.column("Ti");
  const double low = *std::min_element(Ti.begin(), Ti.end());
  c.require(low > sphere_cfg.impedance_tank.lower, "sphere min T_i " + fmt("%.3g", low) + " > T_l");

  const LogTable& L = lowtank.log;
  const auto s = L.column("s_i");
  const auto dep = std::find_if(s.begin(), s.end(), [](double v) { return v < 1e-3; });
  c.require(dep != s.end(), "lowtank depletes" + (dep != s.end() ? fmt(" at t = %.2f s", L.at(dep - s.begin(), L.index("t"))) : std::string()));
  if (dep != s.end()) {
    const std::size_t p0 = L.index("gdp_R11"), v0 = L.index("Vds_vx");
    const double dt = 1e-3;
    double worst = 0.0;
    bool frozen = true;
    std::size_t checked = 0;
    for (std::size_t k = dep - s.begin(); k + 1 < L.rows(); ++k) {
      if (s[k] >= 1e-3) continue;
      // Step as a body twist of g_d'(k)^-1 g_d'(k+1), compared with the field speed.
      Mat3 R0, R1;
      Vec3 p0v, p1v;
      for (int i = 0; i < 9; ++i) {
        R0(i / 3, i % 3) = L.at(k, p0 + i);
        R1(i / 3, i % 3) = L.at(k + 1, p0 + i);
      }
      for (int i = 0; i < 3; ++i) {
        p0v(i) = L.at(k, p0 + 9 + i);
        p1v(i) = L.at(k + 1, p0 + 9 + i);
      }
      const Mat3 D = R0.transpose() * R1;
      Twist step;
      step.head<3>() = R0.transpose() * (p1v - p0v);
      step.tail<3>() = vee3(0.5 * (D - D.transpose()));
      double speed = 0.0;
      for (int i = 0; i < 6; ++i) speed += std::pow(L.at(k, v0 + i), 2);
      const double ratio = step.norm() / (std::sqrt(speed) * dt);
      worst = std::max(worst, ratio);
      frozen = frozen && ratio <= 1e-3;
      ++checked;
    }
    c.require(frozen, "g_d' frozen while depleted (" + std::to_string(checked) + " steps, moves at <= " + fmt("%.3g", worst) + " of field speed)");
  }
  return c;
}

Check equivariance() {
  Check c;
  Rng rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    ScenarioConfig cfg = scenario(i % 2 == 0 ? "circle.json" : "sphere.json");
    cfg.duration = 1.0;
    cfg.check_field_rate = false;
    const Pose h = rng.pose();
    const LogTable a = simulate(cfg), b = simulate(transform_scenario(cfg, h));
    const std::size_t t0 = a.index("tau1");
    for (std::size_t k = 0; k < a.rows(); ++k) {
      for (int j = 0; j < 6; ++j) {
        const double ta = a.at(k, t0 + j), tb = b.at(k, t0 + j);
        worst = std::max(worst, std::abs(ta - tb) / std::max(1.0, std::abs(ta)));
      }
    }
  }
  c.require(worst <= 1e-9, "10 transforms, max torque deviation " + fmt("%.2g", worst) + " <= 1e-9");
  return c;
}

Check field_rate(const Run& circle, const Run& sphere) {
  Check c;
  for (const auto& [name, r] : {std::pair{"circle", &circle}, std::pair{"sphere", &sphere}}) {
    const auto e = r->log.column("field_rate_err");
    const double worst = *std::max_element(e.begin(), e.end());
    c.require(worst <= 1e-3, std::string(name) + " max rel error " + fmt("%.2g", worst) + " over " + std::to_string(e.size()) + " steps");
  }
  return c;
}

Check geometry_suite() {
  Check c;
  Rng rng(7);

  double grad = 0.0;
  const double h = 1e-5;
  for (int n = 0; n < 100; ++n) {
    const Pose g = rng.pose(0.5), gd = rng.pose(0.5);
    const Vec6 e = gcev(g, gd);
    for (int i = 0; i < 6; ++i) {
      Vec6 d = Vec6::Zero();
      d(i) = h;
      const double fd = (error_function(test::perturb(g, d), gd) - error_function(test::perturb(g, -d), gd)) / (2 * h);
      grad = std::max(grad, std::abs(fd - e(i)) / std::max(std::abs(e(i)), 1e-3));
    }
  }
  c.require(grad <= 1e-4, "grad psi = e_G rel " + fmt("%.2g", grad));

  double adj = 0.0;
  for (int n = 0; n < 100; ++n) {
    const Pose a = rng.pose(), b = rng.pose();
    const Vec6 xi = rng.vec6();
    const Vec6 conj = vee6(a.matrix() * hat6(xi) * a.inverse().matrix());
    adj = std::max(adj, (adjoint(a) * xi - conj).norm() / std::max(1.0, conj.norm()));
    adj = std::max(adj, (adjoint(a * b) - adjoint(a) * adjoint(b)).norm() / adjoint(a * b).norm());
  }
  c.require(adj <= 1e-12, "adjoint identities " + fmt("%.2g", adj));

  double ex = 0.0;
  for (int n = 0; n < 100; ++n) {
    const Vec6 xi = rng.vec6();
    ex = std::max(ex, (exp_se3(xi, 1.0).matrix() - test::expm_series(hat6(xi), 60)).norm());
  }
  Vec6 pi_z = Vec6::Zero();
  pi_z(5) = kPi;
  ex = std::max(ex, (exp_se3(pi_z, 1.0).matrix() - test::expm_series(hat6(pi_z), 30)).norm());
  c.require(ex <= 1e-10, "exp_se3 vs series " + fmt("%.2g", ex));

  const RobotDescription m = test::arm();
  double skew = 0.0;
  for (int n = 0; n < 20; ++n) {
    const JointVector q = rng.joints(6, -kPi, kPi), qd = rng.joints(6, -2, 2);
    const double hh = 1e-6;
    const Eigen::MatrixXd Md = (mass_matrix(m, q + hh * qd) - mass_matrix(m, q - hh * qd)) / (2 * hh);
    const Eigen::MatrixXd N = Md - 2 * joint_space_terms(m, q, qd).C;
    skew = std::max(skew, (N + N.transpose()).norm() / std::max(1.0, Md.norm()));
  }
  c.require(skew <= 1e-5, "Mdot - 2C skew " + fmt("%.2g", skew));

  // Bare dynamics without gravity under RK4: kinetic energy is conserved.
  RobotDescription free = m;
  free.gravity = Vec3::Zero();
  auto accel = [&](const JointVector& q, const JointVector& v) {
    return forward_dynamics(free, JointState{q, v}, JointVector::Zero(6), Wrench::Zero());
  };
  auto energy = [&](const JointVector& q, const JointVector& v) { return 0.5 * v.dot(mass_matrix(free, q) * v); };
  double drift = 0.0;
  for (int n = 0; n < 3; ++n) {
    JointVector q = rng.joints(6, -kPi, kPi), v = rng.joints(6, -1.5, 1.5);
    const double E0 = energy(q, v), dt = 1e-3;
    for (int k = 0; k < 1000; ++k) {
      const JointVector k1q = v, k1v = accel(q, v);
      const JointVector k2q = v + 0.5 * dt * k1v, k2v = accel(q + 0.5 * dt * k1q, k2q);
      const JointVector k3q = v + 0.5 * dt * k2v, k3v = accel(q + 0.5 * dt * k2q, k3q);
      const JointVector k4q = v + dt * k3v, k4v = accel(q + dt * k3q, k4q);
      q += dt / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q);
      v += dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
      drift = std::max(drift, std::abs(energy(q, v) - E0) / E0);
    }
  }
  c.require(drift <= 1e-5, "energy drift over 1 s " + fmt("%.2g", drift));
  return c;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Check()>& f) {
    Check c;
    try {
      c = f();
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail = std::string("exception: ") + e.what();
    }
    if (!c.pass) ++failures;
    std::printf("[%s] %d. %s: %s\n", c.pass ? "PASS" : "FAIL", id, name.c_str(), c.detail.c_str());
    std::fflush(stdout);
  };

  const ScenarioConfig circle_cfg = scenario("circle.json");
  const ScenarioConfig sphere_cfg = scenario("sphere.json");
  const ScenarioConfig lowtank_cfg = scenario("sphere_lowtank.json");
  ScenarioConfig gic_cfg = circle_cfg;
  gic_cfg.controller = ControllerKind::Gic;

  const Run circle = run(circle_cfg);
  const Run sphere = run(sphere_cfg);
  const Run lowtank = run(lowtank_cfg);
  const Run gic = run(gic_cfg);
  const Run naive = run(load_scenario(test::fixture_path("naive_violation.json")));
  const std::vector<std::pair<std::string, const Run*>> shipped{
      {"circle", &circle}, {"sphere", &sphere}, {"sphere_lowtank", &lowtank}};

  report(1, "force tracking", [&] { return force_tracking(circle, gic); });
  report(2, "trajectory tracking", [&] { return trajectory_tracking(circle, sphere); });
  report(3, "passivity audit", [&] { return passivity(shipped, naive); });
  report(4, "tank behaviour", [&] { return tanks(shipped, sphere_cfg, sphere, lowtank); });
  report(5, "equivariance", [] { return equivariance(); });
  report(6, "velocity field rate", [&] { return field_rate(circle, sphere); });
  report(7, "geometry suite", [] { return geometry_suite(); });
  report(8, "determinism", [&] {
    Check c;
    for (const auto& [name, r] : shipped) {
      const bool same = csv_bytes(r->log, name + "_a") == csv_bytes(simulate(scenario(name + ".json")), name + "_b");
      c.require(same, name + " byte-identical");
    }
    return c;
  });

  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
