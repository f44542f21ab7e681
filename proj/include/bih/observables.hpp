#ifndef BIH_OBSERVABLES_HPP
#define BIH_OBSERVABLES_HPP

#include <cstdint>
#include <memory>
#include <optional>

#include "bih/geometry.hpp"
#include "bih/grid.hpp"
#include "bih/model.hpp"

namespace bih {

/// Physical fields rebuilt from v (and eta for strings). F12 comes from the
/// algebraic self-dual relation, not from differencing v; the differenced
/// form is kept as an independent cross-check in bps_residuals.
struct ReconstructedFields {
  Field phi_sq;          // |phi|^2 = e^v
  Field F12;             // -sign * e^eta U(e^v) / (sqrt(G) W)
  Field energy_density;  // H = 2 w |grad rho|^2 e^{-eta} + U^2/W
  Field D_phi_sq;        // |D1 phi|^2 + |D2 phi|^2 = 2 |grad rho|^2
  std::optional<Field> eta;
  int sign = +1;
};

ReconstructedFields reconstruct(const ModelSpec& model, const Field& v,
                                const std::optional<Field>& eta = std::nullopt,
                                bool anti_vortex = false);

/// Direct quadrature of F12.
double flux(const ReconstructedFields& fields, QuadratureRule rule = QuadratureRule::trapezoid);

/// The identity value (1/2) int g_bg of the flux, for the two-way check.
double flux_identity_value(std::shared_ptr<const Grid> grid, const VortexConfiguration& conf,
                           QuadratureRule rule = QuadratureRule::trapezoid);

enum class EnergyMetric { flat, conformal };

/// int H (flat) or int H e^eta (conformal; fields.eta required).
double energy(const ReconstructedFields& fields, EnergyMetric metric,
              QuadratureRule rule = QuadratureRule::trapezoid);

/// Outer-boundary line integral of J_k dx^k = g(e^v) e^v (dv/dn) ds; decays
/// to zero with |grad v| at the boundary.
double current_integral(const ModelSpec& model, const Field& v);

/// Area integral of J12 = div(g(e^v) grad e^v): discrete outer flux of
/// (1/2) F_anti(e^v) plus the exact core contribution -4 pi a N with
/// a = lim t->0 t g(t). Equals energy_topological - flux on solutions.
double current_area_integral(const ModelSpec& model, const Field& v,
                             const VortexConfiguration& conf);

struct DecayReport {
  enum class Kind : std::uint8_t { exponential, power };
  Kind kind = Kind::exponential;
  double fitted_rate = 0.0;    // exponential: -d ln|v| / dr; power: -d ln|v| / d ln r
  double expected_rate = 0.0;  // sqrt(M_decay), or the power threshold b_check
  double annulus_lo = 0.0, annulus_hi = 0.0;
  double fit_residual = 0.0;   // RMS residual of the linear fit
  bool degenerate = false;     // |v| underflowed on the annulus
  double underflow_radius = 0.0;
  std::size_t points_used = 0;
};

/// Least-squares fit of ln|v| on the annulus [0.5, 0.75] * r_max against r
/// (exponential) or ln r (power). Cartesian fields are radially averaged.
DecayReport decay_fit(const Field& v, DecayReport::Kind kind, double expected_rate);

/// Slope of eta against ln r on the outer annulus; compare to -16 pi G_N N.
double eta_exponent_fit(const Field& eta);

/// Total curvature int K_g dOmega_g = -(1/2) int Lap eta, accumulated with
/// the operator's own volume weights so the sum telescopes to the discrete
/// outer flux (interior values, including clamped core spikes, cancel).
double curvature_total(const Field& eta);

/// Nodes within this distance of a vortex point are excluded from
/// residual sup-norms (differenced quantities are dominated by the log-core
/// truncation error there).
inline constexpr double kCoreExclusionRadius = 1.0;

struct BpsReport {
  double residual_sup = 0.0;        // |F12_diff - F12_alg| / max|F12|, off-core
  double energy_identity_gap = 0.0; // int |H - e^{-eta}(F12+J12)| / int H, off-core
};

/// Independent consistency checks: F12 re-derived as -(1/2) Lap_h v and the
/// pointwise energy identity with J12 = (1/2) Lap_h F_anti(e^v).
BpsReport bps_residuals(const ModelSpec& model, const ReconstructedFields& fields,
                        const Field& v, const VortexConfiguration& conf);

/// Sup norms of the discretized stress components T11, T22, T12 (which vanish
/// on self-dual solutions), relative to the maximum energy density. All
/// derivative-bearing pieces are finite-differenced so the check is not
/// algebraically vacuous.
struct StressReport {
  double t11 = 0.0, t22 = 0.0, t12 = 0.0;
  double worst() const { return std::max(t11, std::max(t22, t12)); }
};
StressReport stress_residuals(const ModelSpec& model, const ReconstructedFields& fields,
                              const Field& v, const VortexConfiguration& conf);

struct Observables {
  double flux = 0.0;
  double flux_identity_gap = 0.0;
  double energy_direct = 0.0;
  double energy_topological = 0.0;
  double current_integral = 0.0;
  double current_area = 0.0;
  DecayReport decay;
  double curvature_total = 0.0;      // strings
  double eta_slope = 0.0;            // strings
  double eta_slope_expected = 0.0;   // -16 pi G_N N
  double bps_residual = 0.0;
  double energy_identity_gap = 0.0;
  StressReport stress;
  bool f_anti_clamped = false;
};

/// Everything the summary reports, assembled from a converged solution.
Observables compute_observables(const ModelSpec& model, std::shared_ptr<const Grid> grid,
                                const VortexConfiguration& conf, const Field& v,
                                const std::optional<Field>& eta, bool anti_vortex,
                                QuadratureRule rule = QuadratureRule::trapezoid);

}  // namespace bih

#endif
