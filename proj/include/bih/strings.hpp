#ifndef BIH_STRINGS_HPP
#define BIH_STRINGS_HPP

#include <memory>
#include <string>
#include <vector>

#include "bih/vortex.hpp"

namespace bih {

struct LadderRung {
  double delta = 0.0;
  SolveReport report;
  double jump_outer = 0.0;  // sup |u_k+1 - u_k| over the outer half of the grid
};

struct StringSolution {
  std::shared_ptr<const ModelSpec> model;
  std::shared_ptr<const Grid> grid;
  VortexConfiguration conf;
  Field u, v;
  Field eta;  // conformal exponent, assembled from the regular (u-based) form
  double c_used = 0.0;
  std::vector<LadderRung> ladder;
  std::vector<std::string> warnings;
  double tail_start_radius = 0.0;
};

inline const std::vector<double> kDefaultLadder = {0.4, 0.2, 0.1, 0.05, 0.02, 0.01, 0.0};

/// The gravitationally coupled right side at regularization delta:
///   2 e^{8 pi G (2c - F(t) + u)} U(t) / (sqrt(G(t)) W(t)) * prod_s
///   (1+|x-p_s|^2)^{-8 pi G m_s} + g,  t = e^{u + u0_delta}.
Field rhs_string(const ModelSpec& model, std::shared_ptr<const Grid> grid,
                 const VortexConfiguration& conf, double c, double delta, const Field& u);

/// Smallest c on the schedule {0, 1, 2, 4, ..., 64} making u = 0 a strict
/// discrete subsolution (rhs_string(..., u=0) < 0 at every interior node).
/// Throws HypothesisViolation if 8 pi G_N N >= 1, SearchExhausted otherwise.
double find_c(const ModelSpec& model, std::shared_ptr<const Grid> grid,
              const VortexConfiguration& conf, double delta);

/// Conformal exponent eta = 16 pi G c - 8 pi G F(e^v) + 8 pi G u
///                        - 8 pi G sum_s m_s ln(1+|x-p_s|^2),
/// the form with the vortex-point log divergences cancelled algebraically.
Field conformal_exponent(const ModelSpec& model, std::shared_ptr<const Grid> grid,
                         const VortexConfiguration& conf, double c, const Field& u);

/// e^eta; positive off vortex nodes, flat (== 1) when G_N = 0.
Field conformal_factor(const ModelSpec& model, std::shared_ptr<const Grid> grid,
                       const VortexConfiguration& conf, double c, const Field& u);

struct StringOptions : SolverOptions {
  std::vector<double> ladder = kDefaultLadder;
  double rung_consistency = 5.0;  // LadderStall bound: jump <= C * d(delta)
};

/// Solves the coupled equation via the delta ladder: each delta > 0 rung is a
/// monotone descent from -u0_delta with the previous rung as the tightened
/// subsolution; the final delta = 0 rung ascends from the last rung's
/// solution (its supersolution is infinite at the vortex nodes). G_N = 0
/// degenerates to the flat vortex problem and is delegated to solve_vortex.
StringSolution solve_string(std::shared_ptr<const ModelSpec> model,
                            std::shared_ptr<const Grid> grid,
                            const VortexConfiguration& conf,
                            const StringOptions& opts = {});

}  // namespace bih

#endif
