#include "gufic/energy_audit.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

#include "gufic/errors.hpp"

namespace gufic {

double potential_energy(const Pose& g, const Pose& gd, const StiffnessGains& K) {
  const Vec3 dp = g.p - gd.p;
  // The rotational term is non-negative for SPD K_R; clamp the round-off at R = R_d.
  const double rot = std::max(0.0, (K.KR * (Mat3::Identity() - gd.R.transpose() * g.R)).trace());
  return rot + 0.5 * dp.dot(gd.R * K.Kp * gd.R.transpose() * dp);
}

double kinetic_energy(const Twist& e, const Mat6& Mt) { return 0.5 * e.dot(Mt * e); }

AuditReport passivity_audit(const std::vector<double>& t, const std::vector<double>& storage,
                            const std::vector<double>& port_power, double tol) {
  if (t.size() != storage.size() || t.size() != port_power.size()) {
    throw Error("passivity_audit: series lengths differ");
  }
  AuditReport r;
  r.tolerance = tol;
  r.steps = t.size();
  r.worst_margin = std::numeric_limits<double>::infinity();
  double work = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k > 0) work += 0.5 * (port_power[k] + port_power[k - 1]) * (t[k] - t[k - 1]);
    const double dS = storage[k] - storage[0];
    const double m = work - dS;
    r.t.push_back(t[k]);
    r.delta_storage.push_back(dS);
    r.work.push_back(work);
    r.margin.push_back(m);
    if (m < r.worst_margin) {
      r.worst_margin = m;
      r.worst_time = t[k];
    }
    if (m + tol < 0.0 && !r.first_violation_time) {
      r.first_violation_time = t[k];
      r.first_violation_step = k;
      r.pass = false;
    }
  }
  if (t.empty()) r.worst_margin = 0.0;
  return r;
}

AuditReport passivity_audit(const LogTable& log, double tol, bool sensed) {
  return passivity_audit(log.column("t"), log.column("S_tot"),
                         log.column(sensed ? "port_power_sensed" : "port_power"), tol);
}

std::string format_audit(const std::vector<std::pair<std::string, AuditReport>>& reports) {
  std::ostringstream os;
  char buf[256];
  for (const auto& [label, r] : reports) {
    os << "[" << label << "]\n";
    os << "  result: " << (r.pass ? "PASS" : "FAIL") << "\n";
    os << "  steps: " << r.steps << "\n";
    std::snprintf(buf, sizeof buf, "  tolerance: %.6g J\n", r.tolerance);
    os << buf;
    std::snprintf(buf, sizeof buf, "  worst margin: %.6g J at t = %.6g s\n", r.worst_margin,
                  r.worst_time);
    os << buf;
    if (r.first_violation_time) {
      std::snprintf(buf, sizeof buf, "  first violation: t = %.6g s (step %zu)\n",
                    *r.first_violation_time, r.first_violation_step);
      os << buf;
    } else {
      os << "  first violation: none\n";
    }
  }
  return os.str();
}

void write_margin_csv(const std::filesystem::path& path, const AuditReport& report) {
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (f == nullptr) throw Error("cannot write " + path.string());
  std::fprintf(f, "t,delta_S,port_work,margin\n");
  for (std::size_t k = 0; k < report.t.size(); ++k) {
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", report.t[k], report.delta_storage[k],
                 report.work[k], report.margin[k]);
  }
  std::fclose(f);
}

}  // namespace gufic
