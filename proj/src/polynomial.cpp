#include "jacobi/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace jacobi {

namespace {

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

// Coefficient times product with the listed exponents lowered by one each.
double lowered(const Monomial& m, const Vec& z, int a = -1, int b = -1, int c = -1) {
  std::vector<int> e = m.exponents;
  double f = m.coef;
  for (int k : {a, b, c}) {
    if (k < 0) continue;
    if (e[k] == 0) return 0.0;
    f *= e[k]--;
  }
  for (std::size_t i = 0; i < e.size(); ++i) f *= ipow(z(i), e[i]);
  return f;
}

}  // namespace

Polynomial::Polynomial(int vars, std::vector<Monomial> terms) : vars_(vars) {
  for (auto& t : terms) add(t.coef, std::move(t.exponents));
}

Polynomial& Polynomial::add(double coef, std::vector<int> exponents) {
  if (static_cast<int>(exponents.size()) != vars_)
    fail(ErrorKind::Validation, "monomial has " + std::to_string(exponents.size()) +
                                    " exponents, expected " + std::to_string(vars_));
  if (std::any_of(exponents.begin(), exponents.end(), [](int e) { return e < 0; }))
    fail(ErrorKind::Validation, "negative exponent in monomial");
  if (!std::isfinite(coef)) fail(ErrorKind::Validation, "non-finite coefficient");
  for (auto& t : terms_)
    if (t.exponents == exponents) {
      t.coef += coef;
      return *this;
    }
  terms_.push_back({coef, std::move(exponents)});
  return *this;
}

Polynomial Polynomial::quadratic(const Mat& m, const Vec& linear) {
  const int n = static_cast<int>(m.rows());
  Polynomial p(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      std::vector<int> e(n, 0);
      ++e[i];
      ++e[j];
      const double c = i == j ? 0.5 * m(i, i) : 0.5 * (m(i, j) + m(j, i));
      if (c != 0.0) p.add(c, e);
    }
  for (int i = 0; i < linear.size(); ++i) {
    std::vector<int> e(n, 0);
    e[i] = 1;
    if (linear(i) != 0.0) p.add(linear(i), e);
  }
  return p;
}

double Polynomial::value(const Vec& z) const {
  double s = 0.0;
  for (const auto& t : terms_) s += lowered(t, z);
  return s;
}

Vec Polynomial::gradient(const Vec& z) const {
  Vec g = Vec::Zero(vars_);
  for (const auto& t : terms_)
    for (int i = 0; i < vars_; ++i) g(i) += lowered(t, z, i);
  return g;
}

Mat Polynomial::hessian(const Vec& z) const {
  Mat h = Mat::Zero(vars_, vars_);
  for (const auto& t : terms_)
    for (int i = 0; i < vars_; ++i)
      for (int j = i; j < vars_; ++j) h(i, j) += lowered(t, z, i, j);
  return h.selfadjointView<Eigen::Upper>();
}

Mat Polynomial::hessian_derivative(const Vec& z, const Vec& v) const {
  Mat h = Mat::Zero(vars_, vars_);
  for (const auto& t : terms_)
    for (int i = 0; i < vars_; ++i)
      for (int j = i; j < vars_; ++j)
        for (int k = 0; k < vars_; ++k)
          if (v(k) != 0.0) h(i, j) += v(k) * lowered(t, z, i, j, k);
  return h.selfadjointView<Eigen::Upper>();
}

Polynomial Polynomial::derivative(int k) const {
  Polynomial d(vars_);
  for (const auto& t : terms_) {
    if (t.exponents[k] == 0) continue;
    auto e = t.exponents;
    const double c = t.coef * e[k]--;
    d.add(c, e);
  }
  return d;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& t : terms_) {
    int s = 0;
    for (int e : t.exponents) s += e;
    if (t.coef != 0.0) d = std::max(d, s);
  }
  return d;
}

}  // namespace jacobi
