#pragma once

// Parameter sweeps, design comparisons and the artificial-finger experiment,
// all returning StudyTables ready for export_csv.

#include <cstdint>
#include <vector>

#include "exotendon/statics.hpp"

namespace exo {

/// -90, -89, ..., 0 deg.
std::vector<double> default_theta_grid();
std::vector<double> default_x1_grid();  // 11, 14, 17, 20 mm
std::vector<double> default_x2_grid();  // 13, 16, 19, 22 mm

/// Inclusive grid lo, lo+step, ..., hi (the last point snapped to hi).
std::vector<double> stepped_grid(double lo, double hi, double step);

/// Rows (x1_mm, x2_mm, theta_deg, r_pip_mm, incompatible), x1-major. Pairs
/// that cannot be built are kept with r_pip = NaN and incompatible = 1.
StudyTable sweep_design_a(const std::vector<double>& x1_grid, const std::vector<double>& x2_grid,
                          const std::vector<double>& theta_grid_deg, const PhalanxChain& chain = {},
                          const DesignPlacement& placement = {});

struct DesignComparison {
  StudyTable pip;     // theta_deg, r_base_mm, r_A_mm, r_B_mm
  StudyTable a_arms;  // theta_deg, r_A_pip_mm, r_A_mcp_mm
};

DesignComparison compare_designs(const PhalanxChain& chain, const std::vector<double>& theta_grid_deg,
                                 const DesignSpec& a = DesignSpec::design_a(17.0, 19.0),
                                 const DesignSpec& b = DesignSpec::design_b(17.0),
                                 const DesignSpec& base = DesignSpec::baseline());

struct ExperimentOptions {
  std::size_t reps = 50;
  double noise_sigma = 0.0;  // N, Gaussian on each applied force sample
  std::uint64_t seed = 0;
};

/// Per design, the force-angle curve averaged over `reps` runs in which each
/// applied force is the nominal tension plus N(0, sigma) noise (clamped at
/// 0). Rows (design, tension_N, force_mean_N, theta_pip_deg, theta_mcp_deg,
/// se_force_N, se_pip_deg, se_mcp_deg, converged), where `design` indexes
/// `designs` and se_* are sample standard errors of the means.
StudyTable artificial_finger_experiment(const std::vector<DesignSpec>& designs,
                                        const std::vector<double>& tension_grid_n,
                                        const PhalanxChain& chain, const TorsionSpringSet& springs,
                                        const ExperimentOptions& options = {});

/// Tension at which a monotone curve (tension, angle) first reaches
/// `angle_deg`, linearly interpolated; NaN when the curve never gets there.
double tension_at_angle(const StudyTable& curve, const std::string& angle_column, double angle_deg);

}  // namespace exo
