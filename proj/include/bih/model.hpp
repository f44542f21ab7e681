#ifndef BIH_MODEL_HPP
#define BIH_MODEL_HPP

#include <atomic>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace bih {

using ScalarFn = std::function<double(double)>;

struct ModelBounds {
  double m_U = 0.0;      // lower bound on U' over [0,1] (1% safety margin applied)
  double M_U = 0.0;      // upper bound on U'
  double m_G = 0.0;      // lower bound on G
  double M_G = 0.0;      // upper bound on G
  double lambda1 = 0.0;  // 2 m_U / sqrt(M_G)
  double lambda2 = 0.0;  // 2 M_U / sqrt(m_G (1 - U(0)^2/b^2))
  double M_decay = 0.0;  // 2 U'(1) / sqrt(G(1)), exponential decay rate^2
};

/// A generalized Born-Infeld-Higgs model: user functions U, G and the
/// Born-Infeld parameter b, with g, w, V derived from the self-duality
/// constraints and numeric bounds for the solvers. Immutable after build;
/// safe to share across threads.
class ModelSpec {
 public:
  double U(double t) const { return u_(t); }
  double U_prime(double t) const { return up_(t); }
  double G(double t) const { return gfun_(t); }
  double b() const { return b_; }

  /// g(t) = (1 + sqrt(G(t)) U(t)) / (2t), singular at t = 0 for generic models.
  double g_derived(double t) const;
  /// w(t) = 2 d/dt [t g(t)] = d/dt [sqrt(G) U]; analytic when G' is known.
  double w_derived(double t) const;
  /// V(t) = b^2 (1 - sqrt(1 - U(t)^2 / b^2)).
  double V_derived(double t) const;

  /// Dilation factor W(t) = sqrt(1 - U(t)^2/b^2); throws DomainError if
  /// |U(t)| >= b.
  double dilation(double t) const;

  /// 2 U(t) / (sqrt(G(t)) W(t)): the reduced flat-space nonlinearity,
  /// evaluated at t = |phi|^2 = e^v.
  double rhs_vortex(double t) const;

  /// Antiderivative of 2 g with F_anti(1) = 0, by quadrature in ln t down to
  /// t_min = 1e-10; below t_min the value is clamped and the model flagged.
  double F_anti(double t) const;
  bool f_anti_clamped() const { return clamped_->load(); }

  /// Limit of rhs_vortex(e^v)/v as v -> 0: equals M_decay. Used where the
  /// ratio is numerically unresolvable.
  double rhs_linearized_rate() const { return bounds_.M_decay; }

  const ModelBounds& bounds() const { return bounds_; }
  const std::string& name() const { return name_; }

  static constexpr double kTMin = 1e-10;

  friend ModelSpec build_model(ScalarFn u, ScalarFn u_prime, ScalarFn g, double b,
                               ScalarFn g_prime, std::string name);

 private:
  ScalarFn u_, up_, gfun_, gp_;  // gp_ may be empty
  double b_ = 1.0;
  ModelBounds bounds_;
  std::string name_;
  // F_anti table: Hermite cubic in y = ln t on [ln(t_min), y_max]
  std::vector<double> fa_y_, fa_val_, fa_slope_;
  std::shared_ptr<std::atomic<bool>> clamped_;
};

/// Validates the model assumptions by sampling (10001 uniform points on [0,1]
/// plus a refinement pass around extrema; 1% safety margin applied outward to
/// the stored bounds) and precomputes F_anti. Throws ConstraintViolation if
/// U(1) != 0, U' <= 0, G <= 0, |U(0)| >= b, or g <= 0 on (0,1).
ModelSpec build_model(ScalarFn u, ScalarFn u_prime, ScalarFn g, double b,
                      ScalarFn g_prime = nullptr, std::string name = "custom");

/// U(t) = (t-1)/2, G = 1, b = 1.
ModelSpec make_canon();
/// The canon functions at b = 1e6; the reduced nonlinearity degenerates to
/// the classical e^v - 1 up to O(1/b^2).
ModelSpec make_abelian_limit();
/// U and G as polynomial coefficient lists (ascending powers).
ModelSpec make_polynomial(const std::vector<double>& u_coeffs,
                          const std::vector<double>& g_coeffs, double b,
                          std::string name = "poly");

inline double rhs_vortex(const ModelSpec& m, double t) { return m.rhs_vortex(t); }
inline double dilation_factor(const ModelSpec& m, double t) { return m.dilation(t); }

}  // namespace bih

#endif
