#ifndef BIH_ITERATE_HPP
#define BIH_ITERATE_HPP

#include <functional>
#include <memory>
#include <vector>

#include "bih/geometry.hpp"
#include "bih/grid.hpp"

namespace bih {

/// Nodewise nonlinearity: fills f_out[i] = f(u[i], x_i) for all nodes.
using NodewiseFn = std::function<void(const std::vector<double>&, std::vector<double>&)>;

struct SolveReport {
  Field solution;
  int iterations = 0;
  bool converged = false;
  bool ascending = false;             // iteration ran upward from a subsolution
  double final_update = 0.0;          // last sup-norm update
  double final_residual = 0.0;        // sup-norm of Lap u - f(u) at interior nodes
  int monotone_violations = 0;        // iterates moving against the descent/ascent direction
  int bracket_violations = 0;         // iterates leaving [u_sub, u_super] beyond slack
  std::vector<double> update_history;
  std::vector<double> residual_history;
};

/// Semilinear problem Lap u = f(u, x) with an ordered bracket. The iteration
/// u_{k+1} = (Lap - K)^{-1} (f(u_k) - K u_k) starts at `start` (one end of the
/// bracket) and is order-preserving when K(x) >= sup_u df/du on the bracket.
struct MonotoneProblem {
  std::shared_ptr<const Grid> grid;
  NodewiseFn f;
  std::vector<double> K;              // per-node monotonicity bound
  std::vector<double> u_sub, u_super; // bracket (entries may be +/-inf where unconstrained)
  std::vector<double> start;
  double tol = 1e-10;                 // sup-norm update tolerance
  double residual_factor = 10.0;      // converged requires residual < residual_factor * tol
  int max_iterations = 50000;
  double cg_tol = 1e-10;
  double slack_factor = 10.0;         // bracket slack = slack_factor * h^2 * scale
  bool check_admissibility = true;
  bool ascending = false;             // start is the subsolution; iterate upward
};

/// Runs the monotone iteration. Throws BracketViolation if an iterate leaves
/// the bracket by more than the discretization slack, MaxIterations if the
/// update and residual tolerances are not reached.
SolveReport monotone_solve(MonotoneProblem& problem);

/// Per-node K(x) = margin * max over `samples` values of u in [lo(x), hi(x)]
/// of df/du, by forward differencing f in u with step fd_step. Entries of hi
/// may be +inf; those nodes sample up to cap(x) instead.
std::vector<double> monotonicity_bound(const Grid& grid, const NodewiseFn& f,
                                       const std::vector<double>& lo,
                                       const std::vector<double>& hi,
                                       const std::vector<double>& cap,
                                       int samples = 64, double fd_step = 1e-6,
                                       double margin = 1.25);

/// Discrete admissibility check: returns the worst signed violation of
///   side=+1 (subsolution):  Lap u - f(u) >= -slack
///   side=-1 (supersolution): Lap u - f(u) <= +slack
/// i.e. a positive return value means the inequality fails somewhere.
double bracket_violation(std::shared_ptr<const Grid> grid, const NodewiseFn& f,
                         const std::vector<double>& u, int side,
                         double slack_factor = 10.0);

struct NewtonOptions {
  double tol = 1e-12;
  int max_iterations = 60;
  double cg_tol = 1e-10;
};

/// Damped Newton for Lap u = f(u, x): presolve helper, not the primary path.
/// f_prime fills df/du nodewise; it is clamped at 0 for the linear solves.
Field newton_solve(std::shared_ptr<const Grid> grid, const NodewiseFn& f,
                   const NodewiseFn& f_prime, Field start, const NewtonOptions& opts = {});

struct AbelianHiggsResult {
  SolveReport report;
  Field u_sub, u_super;  // the verified bracket used (capped supersolution)
  double lambda = 0.0;
};

/// Solves Lap u = lambda (e^{u+u0} - 1) + g, u -> 0 at the boundary, by
/// monotone descent from the capped supersolution min(-u0, C) with the lower
/// bracket produced by a damped-Newton presolve; both ends are verified
/// discretely before the descent.
AbelianHiggsResult solve_abelian_higgs(std::shared_ptr<const Grid> grid,
                                       const VortexConfiguration& conf, double lambda,
                                       double tol = 1e-10, double cg_tol = 1e-10);

}  // namespace bih

#endif
