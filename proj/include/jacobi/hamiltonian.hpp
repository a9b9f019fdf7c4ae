#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "jacobi/grassmann_curve.hpp"
#include "jacobi/polynomial.hpp"

namespace jacobi {

// Phase points are z = (x, y): x the fiber (momentum) part, y the base part.
// The Hamiltonian field is x' = -H_y, y' = H_x.

using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

struct PhaseJet {
  double h = 0.0;
  Vec grad;
  Mat hess;
};

// Potential U(y) with derivatives; hess_derivative(y, v) = sum_k v_k d/dy_k U_yy
// is optional.
struct Potential {
  std::function<double(const Vec&)> u;
  std::function<Vec(const Vec&)> grad;
  std::function<Mat(const Vec&)> hess;
  std::function<Mat(const Vec&, const Vec&)> hess_derivative;

  static Potential quadratic(const Mat& k);  // 1/2 y^T K y
  static Potential polynomial(const Polynomial& p);
  static Potential pendulum(int n);  // -sum cos y_i
};

enum class Family { Natural, Metric, Custom };
std::string to_string(Family f);

class HamiltonianSystem {
 public:
  using Eval = std::function<PhaseJet(const Vec&)>;
  // sum_k v_k d/dz_k Hess H at z.
  using HessDerivative = std::function<Mat(const Vec&, const Vec&)>;

  HamiltonianSystem(int n, Family family, Eval eval, HessDerivative third = {},
                    std::string name = "custom");

  // 1/2 |x|^2 + U(y).
  static HamiltonianSystem natural(int n, const Potential& u, std::string name = "natural");
  // x^T g(y) x + U(y) with g(y) = g[0] + sum_k y_k g[k + 1], each g[i] symmetric.
  static HamiltonianSystem metric(const std::vector<Mat>& g, const Potential& u,
                                  std::string name = "metric");
  // Polynomial in the 2n variables (x, y).
  static HamiltonianSystem polynomial(int n, const Polynomial& h, std::string name = "polynomial");

  static HamiltonianSystem free_particle(int n);
  static HamiltonianSystem oscillator(int n, double frequency = 1.0);
  static HamiltonianSystem inverted_oscillator(int n);
  static HamiltonianSystem quadratic_potential(const Mat& k);
  static HamiltonianSystem pendulum(int n);

  int n() const { return n_; }
  Family family() const { return family_; }
  const std::string& name() const { return name_; }
  bool analytic_third() const { return static_cast<bool>(third_); }

  PhaseJet eval(const Vec& z) const;
  double energy(const Vec& z) const { return eval(z).h; }
  Vec field(const Vec& z) const;
  // Directional derivative of the Hessian; central differences of the Hessian
  // with step 1e-4 (1 + |z|) when no analytic callback exists.
  Mat hessian_derivative(const Vec& z, const Vec& v) const;

 private:
  int n_;
  Family family_;
  Eval eval_;
  HessDerivative third_;
  std::string name_;
};

// Field from the Hessian: x' = -H_y, y' = H_x.
Vec hamiltonian_field(const Vec& grad);
// Matrix of the linearized field, J^T Hess.
Mat field_matrix(const Mat& hess);

struct FlowOptions {
  double state_cap = 1e12;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<double> energies;
  double step = 0.0;  // signed
  double energy_drift = 0.0;  // max |H(z_t) - H(z_0)|
};

struct VariationalFlow {
  std::vector<double> times;
  std::vector<MatL> matrices;  // Gamma(t0, t), extended precision

  Mat matrix(std::size_t i) const { return matrices[i].cast<double>(); }
  // |Gamma^T J Gamma - J| evaluated in extended precision.
  double symplectic_defect(std::size_t i) const;
  double max_symplectic_defect() const;
};

// Fixed-step classical fourth-order integration from t0 to t1 (either
// direction); the step is shrunk so that it divides the interval. BlowUp past
// the state cap or on non-finite values.
Trajectory flow(const HamiltonianSystem& sys, const Vec& z0, double t0, double t1, double step,
                const FlowOptions& opts = {});
Trajectory flow(const HamiltonianSystem& sys, const Vec& z0, double horizon, double step,
                const FlowOptions& opts = {});

// Variational equation xi' = J^T Hess H(z_t) xi along traj, stepped with the
// same stages as the trajectory. BlowUp on non-finite entries.
VariationalFlow variational_flow(const HamiltonianSystem& sys, const Trajectory& traj);

// Trajectory plus variational flow on [t_lo, t_hi] containing 0, evaluable at
// any time inside by one partial step from the nearest grid point below.
class DenseFlow {
 public:
  DenseFlow(const HamiltonianSystem& sys, const Vec& z0, double t_lo, double t_hi, double step,
            const FlowOptions& opts = {});

  Vec state(double t) const;
  MatL gamma(double t) const;
  double t_lo() const { return t_lo_; }
  double t_hi() const { return t_hi_; }
  const Trajectory& forward() const { return fwd_; }
  const VariationalFlow& forward_variation() const { return fwd_var_; }

 private:
  HamiltonianSystem sys_;
  double t_lo_, t_hi_;
  Trajectory fwd_, bwd_;
  VariationalFlow fwd_var_, bwd_var_;
};

struct JacobiOptions {
  double fd_step = 0.0;  // 0 selects 1e-3 * horizon
  int grid_points = 0;   // 0 selects one grid point per 0.01 time units, at least 401
  FlowOptions flow;
};

// t -> Gamma(0, t)^{-1} applied to the vertical subspace, on [0, horizon].
GrassmannCurve jacobi_curve(const HamiltonianSystem& sys, const Vec& z0, double horizon,
                            double step, const JacobiOptions& opts = {});
// Same from an existing dense flow.
GrassmannCurve jacobi_curve(std::shared_ptr<const DenseFlow> flow, double horizon,
                            const JacobiOptions& opts = {});

// Quotient of the energy level tangent by the Hamiltonian direction at z0,
// realized on a fixed Darboux basis.
struct Reduction {
  Vec field;     // Hamiltonian vector at z0, spans gamma
  Vec dual;      // omega(field, dual) = 1
  Mat darboux;   // 2n x (2n - 2): columns e_1..e_{n-1}, f_1..f_{n-1}
  // Coordinates of a subspace of the ambient space after intersecting with
  // the skew-orthogonal of gamma and dropping gamma: an (n-1)-column frame in
  // the standard space of dimension 2n - 2.
  Mat reduce(const Mat& lambda) const;
  // Coordinates of a vector of the skew-orthogonal of gamma modulo gamma.
  Vec coordinates(const Vec& v) const;
};

// TangentFiber when the base part of the Hamiltonian vector vanishes relative
// to |dH|; ReductionRefused for n = 1 or a critical point.
Reduction energy_reduction(const HamiltonianSystem& sys, const Vec& z0);

struct ReducedJacobi {
  Reduction reduction;
  GrassmannCurve full;
  GrassmannCurve reduced;
};

ReducedJacobi reduced_jacobi_curve(const HamiltonianSystem& sys, const Vec& z0, double horizon,
                                   double step, const JacobiOptions& opts = {});

// Second-order system y'' = f(x, y) with x = y'.
struct SecondOrderField {
  int n = 0;
  std::function<Vec(const Vec& x, const Vec& y)> f;
  std::function<Mat(const Vec& x, const Vec& y)> jac_x;  // optional, d f / d x
};

// 1/2 d f / d x (rows indexed by the components of f).
Mat connection_ode2(const SecondOrderField& field, const Vec& x, const Vec& y);

// Solves 2 Hxx C Hxx = {H, Hxx} - Hxy Hxx - Hxx Hyx. NotRegular when Hxx is
// singular.
Mat connection_hamiltonian(const HamiltonianSystem& sys, const Vec& z);

// Curvature of the Hamiltonian field at z on the vertical subspace, in the
// basis d/dx_i.
Mat curvature_operator_field(const HamiltonianSystem& sys, const Vec& z);

struct MonotonicityReport {
  int sign = 0;  // +1: Hxx positive definite at every sample, -1 negative, 0 otherwise
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  std::vector<Inertia> samples;
  std::vector<std::size_t> indefinite;  // indices of samples that are not definite
  bool regular = true;                  // no singular Hxx sample
};

MonotonicityReport monotonicity_test(const HamiltonianSystem& sys, const Trajectory& traj,
                                     double rank_tol = kRankTol);

}  // namespace jacobi
