#include "app/config.hpp"

#include <cmath>

#include "jacobi/random.hpp"

namespace jacobi::app {

namespace {

// Reads with diagnostics instead of exceptions so one pass reports every
// problem in the file.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& diag) : diag_(diag) {}

  void error(const std::string& path, const std::string& what) {
    diag_.push_back(path + ": " + what);
  }

  bool number(const Json& j, const std::string& path, double& out) {
    if (!j.is_number()) {
      error(path, "expected a number");
      return false;
    }
    out = j.get<double>();
    return true;
  }

  bool integer(const Json& j, const std::string& path, long long& out) {
    if (!j.is_number_integer()) {
      error(path, "expected an integer");
      return false;
    }
    out = j.get<long long>();
    return true;
  }

  bool boolean(const Json& j, const std::string& path, bool& out) {
    if (!j.is_boolean()) {
      error(path, "expected true or false");
      return false;
    }
    out = j.get<bool>();
    return true;
  }

  std::optional<Vec> vector(const Json& j, const std::string& path) {
    if (!j.is_array()) {
      error(path, "expected an array of numbers");
      return std::nullopt;
    }
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
      if (!number(j[i], path + "[" + std::to_string(i) + "]", v(static_cast<Eigen::Index>(i))))
        return std::nullopt;
    return v;
  }

  std::optional<Mat> matrix(const Json& j, const std::string& path) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
      error(path, "expected a matrix as an array of rows");
      return std::nullopt;
    }
    const std::size_t cols = j[0].size();
    Mat m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
      if (!j[r].is_array() || j[r].size() != cols) {
        error(path, "rows must have equal length");
        return std::nullopt;
      }
      for (std::size_t c = 0; c < cols; ++c) {
        double x = 0.0;
        if (!number(j[r][c], path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]", x))
          return std::nullopt;
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = x;
      }
    }
    return m;
  }

  PolySpec poly(const Json& j, const std::string& path, bool allow_pendulum) {
    PolySpec p;
    if (!j.is_object()) {
      error(path, "expected an object");
      return p;
    }
    for (const auto& [key, val] : j.items()) {
      const std::string at = path + "." + key;
      if (key == "quadratic") {
        p.quadratic = matrix(val, at);
      } else if (key == "terms") {
        if (!val.is_array()) {
          error(at, "expected an array of {coef, exponents}");
          continue;
        }
        for (std::size_t i = 0; i < val.size(); ++i) {
          const std::string ti = at + "[" + std::to_string(i) + "]";
          const Json& t = val[i];
          if (!t.is_object() || !t.contains("coef") || !t.contains("exponents")) {
            error(ti, "expected {\"coef\": number, \"exponents\": [integers]}");
            continue;
          }
          TermSpec term;
          number(t["coef"], ti + ".coef", term.coef);
          if (!t["exponents"].is_array()) {
            error(ti + ".exponents", "expected an array of integers");
            continue;
          }
          for (const auto& e : t["exponents"]) {
            long long k = 0;
            if (integer(e, ti + ".exponents", k)) term.exponents.push_back(static_cast<int>(k));
          }
          p.terms.push_back(term);
        }
      } else if (key == "pendulum" && allow_pendulum) {
        boolean(val, at, p.pendulum);
      } else {
        error(at, "unknown key");
      }
    }
    return p;
  }

 private:
  std::vector<std::string>& diag_;
};

Json matrix_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Json poly_json(const PolySpec& p, bool with_pendulum) {
  Json j = Json::object();
  if (p.quadratic) j["quadratic"] = matrix_json(*p.quadratic);
  Json terms = Json::array();
  for (const auto& t : p.terms) terms.push_back(Json{{"coef", t.coef}, {"exponents", t.exponents}});
  j["terms"] = terms;
  if (with_pendulum) j["pendulum"] = p.pendulum;
  return j;
}

bool symmetric(const Mat& m) {
  return m.rows() == m.cols() && (m - m.transpose()).cwiseAbs().maxCoeff() <=
                                     1e-12 * (1.0 + m.cwiseAbs().maxCoeff());
}

void check_poly(const PolySpec& p, int vars, const std::string& path,
                std::vector<std::string>& d) {
  if (p.quadratic) {
    if (p.quadratic->rows() != vars || p.quadratic->cols() != vars)
      d.push_back(path + ".quadratic must be " + std::to_string(vars) + " x " +
                  std::to_string(vars));
    else if (!symmetric(*p.quadratic))
      d.push_back(path + ".quadratic must be symmetric");
  }
  for (std::size_t i = 0; i < p.terms.size(); ++i) {
    const auto& t = p.terms[i];
    const std::string at = path + ".terms[" + std::to_string(i) + "]";
    if (static_cast<int>(t.exponents.size()) != vars)
      d.push_back(at + " needs " + std::to_string(vars) + " exponents");
    for (int e : t.exponents)
      if (e < 0) d.push_back(at + " has a negative exponent");
    if (!std::isfinite(t.coef)) d.push_back(at + ".coef must be finite");
  }
}

Polynomial make_poly(const PolySpec& p, int vars) {
  Polynomial out = p.quadratic ? Polynomial::quadratic(*p.quadratic) : Polynomial(vars);
  for (const auto& t : p.terms) out.add(t.coef, t.exponents);
  return out;
}

Potential make_potential(const PolySpec& p, int n) {
  Potential poly = Potential::polynomial(make_poly(p, n));
  if (!p.pendulum) return poly;
  const Potential pend = Potential::pendulum(n);
  Potential sum;
  sum.u = [poly, pend](const Vec& y) { return poly.u(y) + pend.u(y); };
  sum.grad = [poly, pend](const Vec& y) -> Vec { return poly.grad(y) + pend.grad(y); };
  sum.hess = [poly, pend](const Vec& y) -> Mat { return poly.hess(y) + pend.hess(y); };
  if (poly.hess_derivative && pend.hess_derivative)
    sum.hess_derivative = [poly, pend](const Vec& y, const Vec& v) -> Mat {
      return poly.hess_derivative(y, v) + pend.hess_derivative(y, v);
    };
  return sum;
}

}  // namespace

RunConfig parse_config(const Json& j, std::vector<std::string>& diagnostics) {
  Reader rd(diagnostics);
  RunConfig c;
  if (!j.is_object()) {
    rd.error("config", "top level must be an object");
    return c;
  }
  for (const auto& [key, val] : j.items()) {
    if (key == "system") {
      if (!val.is_object()) {
        rd.error("system", "expected an object");
        continue;
      }
      for (const auto& [sk, sv] : val.items()) {
        const std::string at = "system." + sk;
        if (sk == "family") {
          if (sv.is_string()) c.system.family = sv.get<std::string>();
          else rd.error(at, "expected a string");
        } else if (sk == "n") {
          long long n = 0;
          if (rd.integer(sv, at, n)) c.system.n = static_cast<int>(n);
        } else if (sk == "builtin") {
          if (sv.is_string()) c.system.builtin = sv.get<std::string>();
          else rd.error(at, "expected a string");
        } else if (sk == "frequency") {
          rd.number(sv, at, c.system.frequency);
        } else if (sk == "potential") {
          c.system.potential = rd.poly(sv, at, true);
        } else if (sk == "hamiltonian") {
          c.system.hamiltonian = rd.poly(sv, at, false);
        } else if (sk == "metric") {
          if (!sv.is_array()) {
            rd.error(at, "expected an array of matrices");
            continue;
          }
          for (std::size_t i = 0; i < sv.size(); ++i)
            if (auto m = rd.matrix(sv[i], at + "[" + std::to_string(i) + "]"))
              c.system.metric.push_back(*m);
        } else {
          rd.error(at, "unknown key");
        }
      }
    } else if (key == "initial") {
      c.initial = rd.vector(val, "initial");
    } else if (key == "horizon") {
      rd.number(val, key, c.horizon);
    } else if (key == "step") {
      rd.number(val, key, c.step);
    } else if (key == "seed") {
      long long s = 0;
      if (rd.integer(val, key, s)) {
        if (s < 0) rd.error(key, "must be non-negative");
        else c.seed = static_cast<std::uint64_t>(s);
      }
    } else if (key == "tolerances") {
      if (!val.is_object()) {
        rd.error(key, "expected an object");
        continue;
      }
      for (const auto& [tk, tv] : val.items()) {
        const std::string at = "tolerances." + tk;
        if (tk == "rank_tol") rd.number(tv, at, c.tolerances.rank_tol);
        else if (tk == "energy_tol") rd.number(tv, at, c.tolerances.energy_tol);
        else if (tk == "symp_tol") rd.number(tv, at, c.tolerances.symp_tol);
        else if (tk == "fd_step") {
          double h = 0.0;
          if (rd.number(tv, at, h)) c.tolerances.fd_step = h;
        } else rd.error(at, "unknown key");
      }
    } else if (key == "options") {
      if (!val.is_object()) {
        rd.error(key, "expected an object");
        continue;
      }
      auto& o = c.options;
      for (const auto& [ok, ov] : val.items()) {
        const std::string at = "options." + ok;
        long long k = 0;
        if (ok == "samples") {
          if (rd.integer(ov, at, k)) o.samples = static_cast<int>(k);
        } else if (ok == "base_times") {
          if (rd.integer(ov, at, k)) o.base_times = static_cast<int>(k);
        } else if (ok == "grid_points") {
          if (rd.integer(ov, at, k)) o.grid_points = static_cast<int>(k);
        } else if (ok == "trim") {
          rd.number(ov, at, o.trim);
        } else if (ok == "reduced") {
          rd.boolean(ov, at, o.reduced);
        } else if (ok == "lderiv") {
          if (!ov.is_object()) {
            rd.error(at, "expected an object");
            continue;
          }
          LDerivSpec l;
          bool ok_a = false, ok_q = false;
          for (const auto& [lk, lv] : ov.items()) {
            const std::string la = at + "." + lk;
            if (lk == "A") {
              if (auto m = rd.matrix(lv, la)) l.a = *m, ok_a = true;
            } else if (lk == "Q") {
              if (auto m = rd.matrix(lv, la)) l.q = *m, ok_q = true;
            } else if (lk == "A1") {
              l.a1 = rd.matrix(lv, la);
            } else if (lk == "Q1") {
              l.q1 = rd.matrix(lv, la);
            } else if (lk == "tau0") {
              rd.number(lv, la, l.tau0);
            } else if (lk == "tau1") {
              rd.number(lv, la, l.tau1);
            } else {
              rd.error(la, "unknown key");
            }
          }
          if (!ok_a || !ok_q) rd.error(at, "needs matrices A and Q");
          else o.lderiv = l;
        } else {
          rd.error(at, "unknown key");
        }
      }
    } else {
      rd.error(key, "unknown key");
    }
  }
  return c;
}

Json to_json(const RunConfig& c) {
  Json sys = Json::object();
  sys["family"] = c.system.family;
  sys["n"] = c.system.n;
  if (!c.system.builtin.empty()) {
    sys["builtin"] = c.system.builtin;
    sys["frequency"] = c.system.frequency;
  }
  if (c.system.family == "custom") {
    sys["hamiltonian"] = poly_json(c.system.hamiltonian, false);
  } else if (c.system.builtin.empty()) {
    sys["potential"] = poly_json(c.system.potential, true);
  }
  if (c.system.family == "metric") {
    Json g = Json::array();
    for (const auto& m : c.system.metric) g.push_back(matrix_json(m));
    sys["metric"] = g;
  }
  Json j = Json::object();
  j["system"] = sys;
  if (c.initial) j["initial"] = std::vector<double>(c.initial->data(), c.initial->data() + c.initial->size());
  j["horizon"] = c.horizon;
  j["step"] = c.step;
  Json tol = Json::object();
  tol["rank_tol"] = c.tolerances.rank_tol;
  tol["energy_tol"] = c.tolerances.energy_tol;
  tol["symp_tol"] = c.tolerances.symp_tol;
  if (c.tolerances.fd_step) tol["fd_step"] = *c.tolerances.fd_step;
  j["tolerances"] = tol;
  j["seed"] = c.seed;
  Json o = Json::object();
  if (c.options.samples) o["samples"] = *c.options.samples;
  o["base_times"] = c.options.base_times;
  o["trim"] = c.options.trim;
  o["reduced"] = c.options.reduced;
  o["grid_points"] = c.options.grid_points;
  if (c.options.lderiv) {
    const auto& l = *c.options.lderiv;
    Json lj = Json::object();
    lj["A"] = matrix_json(l.a);
    lj["Q"] = matrix_json(l.q);
    if (l.a1) lj["A1"] = matrix_json(*l.a1);
    if (l.q1) lj["Q1"] = matrix_json(*l.q1);
    lj["tau0"] = l.tau0;
    lj["tau1"] = l.tau1;
    o["lderiv"] = lj;
  }
  j["options"] = o;
  return j;
}

std::vector<std::string> validate(const RunConfig& c, const std::string& command) {
  std::vector<std::string> d;
  const auto& s = c.system;
  const int n = s.n;
  if (n < 1) d.push_back("system.n must be at least 1");
  if (!(c.horizon > 0) || !std::isfinite(c.horizon)) d.push_back("horizon must be positive");
  if (!(c.step > 0) || !std::isfinite(c.step)) d.push_back("step must be positive");
  else if (c.step > c.horizon) d.push_back("step must not exceed the horizon");
  const auto& t = c.tolerances;
  if (!(t.rank_tol > 0)) d.push_back("tolerances.rank_tol must be positive");
  if (!(t.energy_tol > 0)) d.push_back("tolerances.energy_tol must be positive");
  if (!(t.symp_tol > 0)) d.push_back("tolerances.symp_tol must be positive");
  if (t.fd_step && !(*t.fd_step > 0)) d.push_back("tolerances.fd_step must be positive");
  if (c.options.samples && *c.options.samples < 2) d.push_back("options.samples must be at least 2");
  if (c.options.base_times < 1) d.push_back("options.base_times must be at least 1");
  if (c.options.grid_points < 2) d.push_back("options.grid_points must be at least 2");
  if (c.options.trim < 0 || c.options.trim >= c.horizon)
    d.push_back("options.trim must lie in [0, horizon)");

  if (n >= 1) {
    if (c.initial && c.initial->size() != 2 * n)
      d.push_back("initial must have 2n = " + std::to_string(2 * n) + " entries");
    if (c.initial && !c.initial->allFinite()) d.push_back("initial must be finite");
    if (s.family == "natural") {
      if (!s.builtin.empty()) {
        if (s.builtin != "free_particle" && s.builtin != "oscillator" &&
            s.builtin != "inverted_oscillator" && s.builtin != "pendulum")
          d.push_back("system.builtin must be free_particle, oscillator, inverted_oscillator or pendulum");
        if (!(s.frequency > 0)) d.push_back("system.frequency must be positive");
      } else {
        check_poly(s.potential, n, "system.potential", d);
      }
    } else if (s.family == "metric") {
      if (s.metric.size() != 1 && s.metric.size() != static_cast<std::size_t>(n) + 1)
        d.push_back("system.metric needs 1 or n + 1 tables (g0, then one per base coordinate)");
      for (std::size_t k = 0; k < s.metric.size(); ++k) {
        const Mat& g = s.metric[k];
        const std::string at = "system.metric[" + std::to_string(k) + "]";
        if (g.rows() != n || g.cols() != n)
          d.push_back(at + " must be n x n");
        else if (!symmetric(g))
          d.push_back(at + " (metric table g) is not symmetric");
      }
      check_poly(s.potential, n, "system.potential", d);
      if (!s.builtin.empty()) d.push_back("system.builtin is only available for the natural family");
    } else if (s.family == "custom") {
      check_poly(s.hamiltonian, 2 * n, "system.hamiltonian", d);
      if (!s.builtin.empty()) d.push_back("system.builtin is only available for the natural family");
    } else {
      d.push_back("system.family must be natural, metric or custom");
    }
  }

  if (!command.empty()) {
    bool known = false;
    for (const auto& k : commands()) known = known || k == command;
    if (!known) d.push_back("unknown command '" + command + "'");
    if (command == "reduce" && n == 1)
      d.push_back("reduce needs n >= 2: for n = 1 the quotient by the Hamiltonian direction is trivial");
    if (command == "hyperbolic" && c.options.reduced && n == 1)
      d.push_back("reduced certificate needs n >= 2: for n = 1 the quotient is trivial");
    if (command == "lderiv") {
      if (!c.options.lderiv) {
        d.push_back("lderiv needs options.lderiv with matrices A and Q");
      } else {
        const auto& l = *c.options.lderiv;
        if (l.q.rows() != l.q.cols() || !symmetric(l.q)) d.push_back("options.lderiv.Q must be symmetric");
        if (l.a.cols() != l.q.rows()) d.push_back("options.lderiv.A must have as many columns as Q");
        if (l.a1 && (l.a1->rows() != l.a.rows() || l.a1->cols() != l.a.cols()))
          d.push_back("options.lderiv.A1 must have the shape of A");
        if (l.q1 && (l.q1->rows() != l.q.rows() || l.q1->cols() != l.q.cols() || !symmetric(*l.q1)))
          d.push_back("options.lderiv.Q1 must be symmetric with the shape of Q");
        if ((l.a1 || l.q1) && !(l.tau1 > l.tau0)) d.push_back("options.lderiv.tau1 must exceed tau0");
      }
    }
  }
  return d;
}

HamiltonianSystem build_system(const RunConfig& c) {
  const auto& s = c.system;
  const int n = s.n;
  if (s.family == "natural") {
    if (s.builtin == "free_particle") return HamiltonianSystem::free_particle(n);
    if (s.builtin == "oscillator") return HamiltonianSystem::oscillator(n, s.frequency);
    if (s.builtin == "inverted_oscillator") return HamiltonianSystem::inverted_oscillator(n);
    if (s.builtin == "pendulum") return HamiltonianSystem::pendulum(n);
    return HamiltonianSystem::natural(n, make_potential(s.potential, n));
  }
  if (s.family == "metric") return HamiltonianSystem::metric(s.metric, make_potential(s.potential, n));
  return HamiltonianSystem::polynomial(n, make_poly(s.hamiltonian, 2 * n));
}

Vec initial_point(const RunConfig& c) {
  if (c.initial) return *c.initial;
  Rng rng(c.seed);
  Vec z(2 * c.system.n);
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.uniform(-0.5, 0.5);
  return z;
}

}  // namespace jacobi::app
