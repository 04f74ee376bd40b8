#pragma once

#include <array>
#include <cmath>
#include <string>

#include "chns/common/errors.hpp"

namespace chns::core {

/// Dimensionless groups and material ratios. The + phase (phi = 1) is the
/// normalizing fluid, so rho(1) = eta(1) = 1.
struct PhysicalParams {
  double Re = 1.0;
  double We = 1.0;
  double Cn = 0.01;
  double Pe = 1.0;
  double Fr = 1.0;
  double rho_ratio = 1.0;  // rho- / rho+
  double nu_ratio = 1.0;   // eta- / eta+
  std::array<double, 3> gravity{0.0, -1.0, 0.0};
  double mobility = 1.0;
  double C_I = 6.0;
  double C_phi = 6.0;  // kept for completeness, no formula uses it

  double alpha() const { return 0.5 * (1.0 - rho_ratio); }
  double beta() const { return 0.5 * (1.0 + rho_ratio); }
  double gamma() const { return 0.5 * (1.0 - nu_ratio); }
  double xi() const { return 0.5 * (1.0 + nu_ratio); }

  /// Peclet number from the 1/Pe = 3 Cn^2 scaling.
  static double peclet_from_cahn(double cn) { return 1.0 / (3.0 * cn * cn); }

  void validate(int dim) const {
    auto pos = [](double v, const char* name) {
      CHNS_REQUIRE(v > 0.0 && std::isfinite(v), ConfigError, std::string(name) + " must be positive");
    };
    pos(Re, "Re");
    pos(We, "We");
    pos(Cn, "Cn");
    pos(Pe, "Pe");
    pos(Fr, "Fr");
    pos(rho_ratio, "rho_ratio");
    pos(nu_ratio, "nu_ratio");
    pos(mobility, "mobility");
    pos(C_I, "C_I");
    double g2 = 0.0;
    for (int d = 0; d < dim; ++d) g2 += gravity[static_cast<std::size_t>(d)] * gravity[static_cast<std::size_t>(d)];
    CHNS_REQUIRE(std::abs(std::sqrt(g2) - 1.0) < 1e-12, ConfigError, "gravity direction must be a unit vector");
  }
};

}  // namespace chns::core
