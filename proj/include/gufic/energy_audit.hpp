#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gufic/geometry.hpp"
#include "gufic/log_table.hpp"

namespace gufic {

/// tr(K_R (I - Rd^T R)) + 1/2 (p - pd)^T Rd K_p Rd^T (p - pd).
double potential_energy(const Pose& g, const Pose& gd, const StiffnessGains& K);

/// 1/2 e^T M~ e.
double kinetic_energy(const Twist& e, const Mat6& Mt);

/// Storage of the closed loop plus both tanks.
inline double total_storage(double kinetic, double potential, double Tf, double Ti) {
  return kinetic + potential + Tf + Ti;
}

struct EnergyRecord {
  double t = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  double Tf = 0.0;
  double Ti = 0.0;
  double S_tot = 0.0;
  double port_power = 0.0;  // (V^b)^T F_e
  double port_work = 0.0;   // trapezoidal integral of port_power up to t
};

struct AuditReport {
  bool pass = true;
  double tolerance = 0.0;
  double worst_margin = 0.0;   // min_k [work_k - (S_k - S_0)], tolerance excluded
  double worst_time = 0.0;
  std::optional<double> first_violation_time;
  std::size_t first_violation_step = 0;
  std::size_t steps = 0;
  std::vector<double> t, delta_storage, work, margin;  // per step, margin excludes tolerance
};

inline constexpr double kDefaultAuditTolerance = 1e-3;  // J

/// Checks S(t_k) - S(t_0) <= int_0^{t_k} P dt + tol at every sample, with the
/// trapezoid rule for the integral.
AuditReport passivity_audit(const std::vector<double>& t, const std::vector<double>& storage,
                            const std::vector<double>& port_power, double tol);

/// Audit of a run log. Uses the true-force port column unless `sensed` is set.
/// Throws MissingChannel when t, S_tot or the port column is absent.
AuditReport passivity_audit(const LogTable& log, double tol, bool sensed = false);

/// Plain-text summary of one or more labelled reports.
std::string format_audit(const std::vector<std::pair<std::string, AuditReport>>& reports);

/// t, delta_S, port_work, margin per step.
void write_margin_csv(const std::filesystem::path& path, const AuditReport& report);

}  // namespace gufic
