#pragma once

#include <vector>

#include "jacobi/symplectic.hpp"

namespace jacobi {

struct Monomial {
  double coef = 0.0;
  std::vector<int> exponents;
};

// Real polynomial in a fixed number of variables with exact derivatives.
class Polynomial {
 public:
  explicit Polynomial(int vars = 0) : vars_(vars) {}
  Polynomial(int vars, std::vector<Monomial> terms);

  // c * prod z_i^e_i; Validation on a wrong exponent count or negative exponent.
  Polynomial& add(double coef, std::vector<int> exponents);
  // Quadratic form 1/2 z^T m z plus linear term.
  static Polynomial quadratic(const Mat& m, const Vec& linear = Vec());

  int vars() const { return vars_; }
  const std::vector<Monomial>& terms() const { return terms_; }

  double value(const Vec& z) const;
  Vec gradient(const Vec& z) const;
  Mat hessian(const Vec& z) const;
  // sum_k v_k d/dz_k of the Hessian.
  Mat hessian_derivative(const Vec& z, const Vec& v) const;
  // d/dz_k of this polynomial.
  Polynomial derivative(int k) const;
  int degree() const;

 private:
  int vars_;
  std::vector<Monomial> terms_;
};

}  // namespace jacobi
