#ifndef BIH_VORTEX_HPP
#define BIH_VORTEX_HPP

#include <functional>
#include <memory>

#include "bih/geometry.hpp"
#include "bih/iterate.hpp"
#include "bih/model.hpp"

namespace bih {

struct SolverOptions {
  double tol = 0.0;            // 0 = grid default (1e-10 radial, 1e-8 cartesian)
  double cg_tol = 1e-10;
  bool tail_refine = true;     // radial: re-solve the linearized far tail of v
  bool anti_vortex = false;    // anti-self-dual branch: negates F12 downstream
  int max_iterations = 50000;

  double resolved_tol(const Grid& g) const {
    if (tol > 0.0) return tol;
    return g.is_radial() ? 1e-10 : 1e-8;
  }
};

struct VortexSolution {
  std::shared_ptr<const ModelSpec> model;
  std::shared_ptr<const Grid> grid;
  VortexConfiguration conf;
  Field u;          // regular part
  Field v;          // u + u0; -inf at vortex nodes
  Field u_lambda1;  // subsolution bracket field
  Field u_lambda2;  // supersolution bracket field
  SolveReport report, report_lambda1, report_lambda2;
  // worst signed violations of the one-sided bracket inequalities (<= 0 means
  // the inequality holds everywhere within slack)
  double sub_admissibility = 0.0;
  double super_admissibility = 0.0;
  double tail_start_radius = 0.0;  // 0 = tail not refined
};

/// Solves the flat-space governing equation Lap u = rhs_vortex(e^{u+u0}) + g
/// by monotone descent from the lambda2 supersolution, bracketed below by the
/// lambda1 subsolution (both produced by the lambda-model solver).
VortexSolution solve_vortex(std::shared_ptr<const ModelSpec> model,
                            std::shared_ptr<const Grid> grid,
                            const VortexConfiguration& conf,
                            const SolverOptions& opts = {});

/// Re-solves v on the annulus where |v| has dropped below the resolvable
/// threshold, as the linearized tail equation (Lap - M_eff(r) envelope(i)) v = 0
/// with Dirichlet data spliced from the solver output. Radial grids only;
/// returns the splice radius (0 when no refinement was applicable).
double refine_exponential_tail(const ModelSpec& model, Field& v,
                               const std::function<double(std::size_t)>& envelope);

}  // namespace bih

#endif
