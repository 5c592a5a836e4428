#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "gufic/energy_audit.hpp"
#include "gufic/errors.hpp"
#include "gufic/log_table.hpp"
#include "gufic/sim.hpp"
#include "support.hpp"

using namespace gufic;
using gufic::test::Rng;

namespace {

StiffnessGains paper_stiffness() {
  return StiffnessGains::diagonal(Vec3(2000, 2000, 10), Vec3(2000, 2000, 2000));
}

}  // namespace

TEST_CASE("potential energy") {
  Rng rng(80);
  const StiffnessGains K = paper_stiffness();
  for (int i = 0; i < 20; ++i) {
    const Pose g = rng.pose();
    CHECK(potential_energy(g, g, K) <= 1e-14 * (K.Kp.trace() + K.KR.trace()));
    CHECK(potential_energy(g, g, K) >= 0.0);
    CHECK(potential_energy(g * exp_se3(rng.vec6(0.3), 1.0), g, K) > 0.0);
  }

  // K_R = k I, rotation by theta about any axis: 2k(1 - cos theta).
  const double k = 37.0;
  const StiffnessGains Kr = StiffnessGains::diagonal(Vec3(1, 1, 1), Vec3(k, k, k));
  for (int i = 0; i < 20; ++i) {
    const Pose gd = rng.pose();
    const Vec3 axis = rng.vec3().normalized();
    const double theta = rng.uniform(-3.0, 3.0);
    const Pose g(gd.R * exp_so3(axis * theta), gd.p);
    const Mat3 I = Mat3::Identity();
    const double direct = (k * (I - gd.R.transpose() * g.R)).trace();
    CHECK(potential_energy(g, gd, Kr) == doctest::Approx(2 * k * (1 - std::cos(theta))).epsilon(1e-12));
    CHECK(potential_energy(g, gd, Kr) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("potential energy rate is the elastic power") {
  Rng rng(81);
  const StiffnessGains K = paper_stiffness();
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const Pose gd = rng.pose();
    const Pose g = gd * exp_se3(rng.vec6(0.4), 1.0);
    const Twist V = rng.vec6(0.5);
    const double fd = (potential_energy(g * exp_se3(V, h), gd, K) - potential_energy(g * exp_se3(V, -h), gd, K)) / (2 * h);
    const double an = elastic_wrench(g, gd, K).dot(V);
    CHECK(fd == doctest::Approx(an).epsilon(1e-4).scale(1e-6));
  }
}

TEST_CASE("kinetic energy and total storage") {
  Rng rng(82);
  Mat6 A;
  for (int i = 0; i < 6; ++i) A.col(i) = rng.vec6();
  const Mat6 M = A * A.transpose() + Mat6::Identity();
  const Twist e = rng.vec6();
  CHECK(kinetic_energy(Twist::Zero(), M) == 0.0);
  CHECK(kinetic_energy(e, M) == doctest::Approx(0.5 * e.dot(M * e)).epsilon(1e-14));
  CHECK(kinetic_energy(e, M) > 0.0);

  // At rest on the setpoint with both tanks at their initial level.
  const Pose g = rng.pose();
  CHECK(total_storage(kinetic_energy(Twist::Zero(), M), potential_energy(g, g, paper_stiffness()), 10.0, 10.0) ==
        doctest::Approx(20.0).epsilon(1e-15));
  CHECK(total_storage(1.0, 2.0, 3.5, 4.0) - total_storage(1.0, 2.0, 3.0, 4.0) == 0.5);
  for (int i = 0; i < 100; ++i) {
    const double s = total_storage(rng.uniform(0, 5), rng.uniform(0, 5), rng.uniform(1e-6, 20), rng.uniform(1e-6, 20));
    CHECK(s >= 0.0);
  }
}

TEST_CASE("audit on hand-built sequences") {
  const std::vector<double> t{0.0, 1.0, 2.0, 3.0};

  SUBCASE("storage rising exactly with supplied work passes with zero margin") {
    // P = 2 W constant: work 0, 2, 4, 6.
    const AuditReport r = passivity_audit(t, {5, 7, 9, 11}, {2, 2, 2, 2}, 1e-3);
    CHECK(r.pass);
    CHECK(r.steps == 4);
    CHECK(std::abs(r.worst_margin) <= 1e-12);
    CHECK(r.work == std::vector<double>{0, 2, 4, 6});
    CHECK(!r.first_violation_time);
  }
  SUBCASE("trapezoid integral of a ramp") {
    const AuditReport r = passivity_audit(t, {0, 0, 0, 0}, {0, 1, 2, 3}, 1e-3);
    CHECK(r.work == std::vector<double>{0, 0.5, 2.0, 4.5});
    CHECK(r.margin == std::vector<double>{0, 0.5, 2.0, 4.5});
  }
  SUBCASE("storage gain beyond the supply fails at the first offending sample") {
    const AuditReport r = passivity_audit(t, {1, 1, 1.5, 1.2}, {0, 0, 0, 0}, 1e-3);
    CHECK(!r.pass);
    REQUIRE(r.first_violation_time);
    CHECK(*r.first_violation_time == 2.0);
    CHECK(r.first_violation_step == 2);
    CHECK(r.worst_margin == doctest::Approx(-0.5));
    CHECK(r.worst_time == 2.0);
  }
  SUBCASE("violation inside the tolerance passes") {
    const AuditReport r = passivity_audit(t, {1, 1.0005, 1, 1}, {0, 0, 0, 0}, 1e-3);
    CHECK(r.pass);
    CHECK(r.worst_margin == doctest::Approx(-5e-4));
  }
  SUBCASE("dissipation passes") {
    CHECK(passivity_audit(t, {4, 3, 2, 1}, {0, 0, 0, 0}, 0.0).pass);
  }
  SUBCASE("log overload selects the port channel") {
    LogTable log({"t", "S_tot", "port_power", "port_power_sensed"});
    log.append({0.0, 0.0, 0.0, 0.0});
    log.append({1.0, 1.0, 2.0, 0.0});
    CHECK(passivity_audit(log, 1e-3).pass);
    CHECK(!passivity_audit(log, 1e-3, true).pass);
  }
  SUBCASE("missing channels") {
    LogTable log({"t", "S_tot"});
    log.append({0.0, 0.0});
    CHECK_THROWS_AS(passivity_audit(log, 1e-3), MissingChannel);
    LogTable no_storage({"t", "port_power"});
    no_storage.append({0.0, 0.0});
    CHECK_THROWS_AS(passivity_audit(no_storage, 1e-3), MissingChannel);
  }
}

TEST_CASE("scenario 1 full run passes the audit") {
  const ScenarioConfig c = load_scenario(test::scenario_path("circle.json"));
  const LogTable log = simulate(c);
  CHECK(log.rows() == c.steps());
  CHECK(c.steps() == 20000);
  const double S0 = log.at(0, log.index("S_tot"));
  const AuditReport r = passivity_audit(log, 1e-3 * std::max(1.0, std::abs(S0)));
  CHECK(r.pass);
  CHECK(r.worst_margin >= -1e-3);

  // Logged storage is the sum of its parts and never negative.
  const std::size_t ki = log.index("kinetic"), pi = log.index("potential"), tf = log.index("Tf"),
                    ti = log.index("Ti"), si = log.index("S_tot");
  for (std::size_t k = 0; k < log.rows(); k += 97) {
    CHECK(log.at(k, ki) >= 0.0);
    CHECK(log.at(k, pi) >= 0.0);
    CHECK(log.at(k, tf) >= kTankFloor);
    CHECK(log.at(k, ti) >= kTankFloor);
    CHECK(log.at(k, si) == doctest::Approx(log.at(k, ki) + log.at(k, pi) + log.at(k, tf) + log.at(k, ti)).epsilon(1e-14));
  }
}

TEST_CASE("free-space GIC regulation passes the audit") {
  ScenarioConfig c = load_scenario(test::scenario_path("circle.json"));
  c.controller = ControllerKind::Gic;
  c.trajectory.omega = 0.0;
  c.surface = SurfaceModel::plane(Vec3(0, 0, -5.0), Vec3::UnitZ());
  c.initial.offset = 0.03;
  c.duration = 3.0;
  const LogTable log = simulate(c);
  const AuditReport r = passivity_audit(log, kDefaultAuditTolerance);
  CHECK(r.pass);
  // Storage actually moved: the spring released its initial energy.
  const auto S = log.column("S_tot");
  CHECK(S.front() - S.back() > 1e-3);
}

TEST_CASE("the naive controller fixture violates passivity") {
  const ScenarioConfig c = load_scenario(test::fixture_path("naive_violation.json"));
  REQUIRE(c.controller == ControllerKind::Naive);
  const AuditReport r = passivity_audit(simulate(c), kDefaultAuditTolerance);
  CHECK(!r.pass);
  REQUIRE(r.first_violation_time);
  CHECK(*r.first_violation_time > 0.0);
  CHECK(*r.first_violation_time <= c.duration);
  CHECK(r.margin[r.first_violation_step] < -kDefaultAuditTolerance);
  for (std::size_t k = 0; k < r.first_violation_step; ++k) CHECK(r.margin[k] >= -kDefaultAuditTolerance);
}

TEST_CASE("tampering with the stored energy is detected") {
  ScenarioConfig c = load_scenario(test::scenario_path("circle.json"));
  c.duration = 1.0;
  LogTable log = simulate(c);
  REQUIRE(passivity_audit(log, kDefaultAuditTolerance).pass);
  const std::size_t si = log.index("S_tot"), ti = log.index("t");
  for (std::size_t k = 600; k < log.rows(); ++k) log.at(k, si) += 0.01;
  const AuditReport r = passivity_audit(log, kDefaultAuditTolerance);
  CHECK(!r.pass);
  REQUIRE(r.first_violation_time);
  CHECK(*r.first_violation_time == doctest::Approx(log.at(600, ti)));
}

TEST_CASE("the audit is invariant under a rigid motion of the whole scene") {
  Rng rng(83);
  ScenarioConfig c = load_scenario(test::scenario_path("sphere.json"));
  c.duration = 1.0;
  const AuditReport base = passivity_audit(simulate(c), kDefaultAuditTolerance);
  for (int i = 0; i < 3; ++i) {
    const AuditReport moved = passivity_audit(simulate(transform_scenario(c, rng.pose())), kDefaultAuditTolerance);
    CHECK(moved.pass == base.pass);
    CHECK(std::abs(moved.worst_margin - base.worst_margin) <= 1e-8);
    double worst = 0.0;
    for (std::size_t k = 0; k < base.margin.size(); ++k) worst = std::max(worst, std::abs(moved.margin[k] - base.margin[k]));
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("audit report text and margin file") {
  const std::vector<double> t{0.0, 0.5, 1.0};
  const AuditReport ok = passivity_audit(t, {1, 1, 1}, {0, 0, 0}, 1e-3);
  const AuditReport bad = passivity_audit(t, {1, 1, 2}, {0, 0, 0}, 1e-3);
  const std::string text = format_audit({{"good run", ok}, {"bad run", bad}});
  CHECK(text.find("good run") != std::string::npos);
  CHECK(text.find("bad run") != std::string::npos);
  CHECK(text.find("PASS") != std::string::npos);
  CHECK(text.find("FAIL") != std::string::npos);
  CHECK(text.find("t = 1") != std::string::npos);

  const auto dir = test::scratch_dir("audit_margin");
  write_margin_csv(dir / "margin.csv", bad);
  std::ifstream in(dir / "margin.csv");
  std::string header, line;
  std::getline(in, header);
  CHECK(header == "t,delta_S,port_work,margin");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
}

TEST_CASE("log files round-trip and reject unknown versions") {
  ScenarioConfig c = load_scenario(test::scenario_path("circle.json"));
  c.duration = 0.05;
  const LogTable log = simulate(c);
  const auto dir = test::scratch_dir("log_roundtrip");
  write_log_csv(dir / "log.csv", log);
  const LogTable back = read_log_csv(dir / "log.csv");
  REQUIRE(back.rows() == log.rows());
  REQUIRE(back.columns() == log.columns());
  for (std::size_t k = 0; k < log.rows(); ++k)
    for (std::size_t j = 0; j < log.cols(); ++j) CHECK(back.at(k, j) == log.at(k, j));
  CHECK(passivity_audit(back, 1e-3).worst_margin == passivity_audit(log, 1e-3).worst_margin);

  {
    std::ofstream out(dir / "v9.csv");
    out << "# gufic-log v9\nt,S_tot,port_power\n0,0,0\n";
  }
  CHECK_THROWS_AS(read_log_csv(dir / "v9.csv"), MissingChannel);
  {
    std::ofstream out(dir / "noversion.csv");
    out << "t,S_tot,port_power\n0,0,0\n";
  }
  CHECK_THROWS_AS(read_log_csv(dir / "noversion.csv"), MissingChannel);
  CHECK_THROWS_AS(read_log_csv(dir / "absent.csv"), Error);
}
