#include "app/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "jacobi/analysis.hpp"
#include "jacobi/lderivative.hpp"

#ifndef JACOBI_VERSION
#define JACOBI_VERSION "0.0.0"
#endif

namespace jacobi::app {

namespace {

Json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}

Json mat_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vec_json(m.row(r).transpose()));
  return rows;
}

std::vector<std::string> indexed(const std::string& name, Eigen::Index count) {
  std::vector<std::string> h;
  for (Eigen::Index i = 0; i < count; ++i) h.push_back(name + "[" + std::to_string(i) + "]");
  return h;
}

std::vector<std::string> indexed(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
  std::vector<std::string> h;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      h.push_back(name + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
  return h;
}

void append(std::vector<double>& row, const Vec& v) {
  row.insert(row.end(), v.data(), v.data() + v.size());
}

void append(std::vector<double>& row, const Mat& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
}

std::vector<std::size_t> strided(std::size_t count, int samples) {
  std::vector<std::size_t> idx;
  const std::size_t m = std::min<std::size_t>(count, static_cast<std::size_t>(samples));
  for (std::size_t k = 0; k < m; ++k)
    idx.push_back(m == 1 ? 0 : (k * (count - 1) + (m - 1) / 2) / (m - 1));
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

std::vector<double> linspace(double a, double b, int count) {
  std::vector<double> ts(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < ts.size(); ++i)
    ts[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(ts.size() - 1);
  ts.back() = b;
  return ts;
}

struct Context {
  const RunConfig& cfg;
  HamiltonianSystem sys;
  Vec z0;
  AnalysisOptions analysis;
  Exec exec;

  int samples(int fallback) const { return cfg.options.samples.value_or(fallback); }
};

Table conjugate_table(const std::vector<ConjugatePoint>& pts) {
  Table t{{"t", "multiplicity"}, {}};
  for (const auto& p : pts) t.rows.push_back({p.t, static_cast<double>(p.multiplicity)});
  return t;
}

void cmd_flow(const Context& c, RunResult& r) {
  const Trajectory tr = flow(c.sys, c.z0, c.cfg.horizon, c.cfg.step, c.analysis.jacobi.flow);
  const VariationalFlow vf = variational_flow(c.sys, tr);
  const int n = c.sys.n();
  r.series.headers = {"t"};
  for (auto& h : indexed("x", n)) r.series.headers.push_back(h);
  for (auto& h : indexed("y", n)) r.series.headers.push_back(h);
  r.series.headers.push_back("energy");
  for (std::size_t i : strided(tr.states.size(), c.samples(201))) {
    std::vector<double> row{tr.times[i]};
    append(row, tr.states[i]);
    row.push_back(tr.energies[i]);
    r.series.rows.push_back(row);
  }
  const double defect = vf.max_symplectic_defect();
  r.scalars["steps"] = tr.states.size() - 1;
  r.scalars["final_state"] = vec_json(tr.states.back());
  r.scalars["energy_drift"] = number(tr.energy_drift);
  r.scalars["energy_ok"] = tr.energy_drift <= c.cfg.tolerances.energy_tol;
  r.scalars["max_symplectic_defect"] = number(defect);
  r.scalars["symplectic_ok"] = defect <= c.cfg.tolerances.symp_tol;
  if (tr.energy_drift > c.cfg.tolerances.energy_tol)
    r.diagnostics.push_back("energy drift exceeds tolerances.energy_tol");
  if (defect > c.cfg.tolerances.symp_tol)
    r.diagnostics.push_back("symplectic defect exceeds tolerances.symp_tol");
}

void cmd_jacobi(const Context& c, RunResult& r) {
  const GrassmannCurve jc = jacobi_curve(c.sys, c.z0, c.cfg.horizon, c.cfg.step, c.analysis.jacobi);
  const int n = c.sys.n();
  const auto ts = linspace(0.0, c.cfg.horizon, c.samples(201));
  const auto frames = map_indices(ts.size(), [&](std::size_t i) { return jc.columns(ts[i]); }, c.exec);
  const auto vel = velocity_inertia(jc, ts, c.exec);
  r.series.headers = {"t"};
  for (auto& h : indexed("lambda", 2 * n, n)) r.series.headers.push_back(h);
  r.series.headers.push_back("velocity_sign");
  bool inc = true, dec = true;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    std::vector<double> row{ts[i]};
    append(row, frames[i]);
    const int sign = vel[i].pos == n ? 1 : (vel[i].neg == n ? -1 : 0);
    inc = inc && sign == 1;
    dec = dec && sign == -1;
    row.push_back(sign);
    r.series.rows.push_back(row);
  }
  r.scalars["monotone"] = inc ? 1 : (dec ? -1 : 0);
  r.scalars["max_isotropy_defect"] = [&] {
    double d = 0.0;
    for (const auto& f : frames) d = std::max(d, LagrangianFrame(jc.space(), f).isotropy_defect());
    return number(d);
  }();
}

void cmd_curvature(const Context& c, RunResult& r) {
  const Trajectory tr = flow(c.sys, c.z0, c.cfg.horizon, c.cfg.step, c.analysis.jacobi.flow);
  const CurvatureSamples cs = sample_field_curvature(c.sys, tr, c.samples(201), c.exec);
  const GrassmannCurve jc = jacobi_curve(c.sys, c.z0, c.cfg.horizon, c.cfg.step, c.analysis.jacobi);
  const int n = c.sys.n();
  r.series.headers = {"t"};
  for (auto& h : indexed("eig", n)) r.series.headers.push_back(h);
  for (std::size_t i = 0; i < cs.times.size(); ++i) {
    std::vector<double> row{cs.times[i]};
    append(row, cs.spectra[i]);
    r.series.rows.push_back(row);
  }
  r.scalars["eigenvalues_at_0"] = vec_json(cs.spectra.front());
  r.scalars["curve_eigenvalues_at_0"] = vec_json(curvature(jc, 0.0).spectrum());
  r.scalars["max_eigenvalue"] = number(cs.max_eig);
  r.scalars["min_eigenvalue"] = number(cs.min_eig);
  r.scalars["min_mean_eigenvalue"] = number(cs.min_mean);
}

void cmd_conjugate(const Context& c, RunResult& r) {
  const GrassmannCurve jc = jacobi_curve(c.sys, c.z0, c.cfg.horizon, c.cfg.step, c.analysis.jacobi);
  const auto pts = conjugate_points(jc, jc.at(0.0), c.analysis.conjugate);
  r.series = conjugate_table(pts);
  int total = 0;
  Json times = Json::array();
  for (const auto& p : pts) {
    total += p.multiplicity;
    times.push_back(number(p.t));
  }
  r.scalars["count"] = pts.size();
  r.scalars["total_multiplicity"] = total;
  r.scalars["times"] = times;
}

void cmd_morse(const Context& c, RunResult& r) {
  MorseOptions o;
  o.base = c.analysis;
  o.trim = c.cfg.options.trim;
  const MorseRecord rec = morse_pipeline(c.sys, c.z0, c.cfg.horizon, c.cfg.step, o);
  r.series = conjugate_table(rec.conjugate_points);
  r.scalars["index"] = rec.index;
  r.scalars["trim"] = number(rec.trim);
  r.scalars["trimmed_maslov"] = rec.trimmed_maslov;
  r.scalars["index_from_maslov"] = rec.index_from_maslov;
  r.scalars["agree"] = rec.agree;
  r.scalars["legendre_sign"] = rec.legendre.sign;
  r.scalars["legendre_min_eigenvalue"] = number(rec.legendre.min_eigenvalue);
  r.scalars["legendre_max_eigenvalue"] = number(rec.legendre.max_eigenvalue);
  if (!rec.agree) r.diagnostics.push_back("conjugate count and trimmed Maslov index disagree");
}

void cmd_maslov(const Context& c, RunResult& r) {
  const GrassmannCurve jc = jacobi_curve(c.sys, c.z0, c.cfg.horizon, c.cfg.step, c.analysis.jacobi);
  const LagrangianFrame pi = jc.at(0.0);
  double trim = c.cfg.options.trim;
  if (!(trim > 0)) {
    const auto pts = conjugate_points(jc, pi, c.analysis.conjugate);
    trim = 0.1 * (pts.empty() ? c.cfg.horizon : pts.front().t);
  }
  const IndexReport rep = maslov_index(jc, pi, trim, c.cfg.horizon, c.analysis.conjugate.maslov);
  r.series.headers = {"t"};
  for (double t : rep.subdivision) r.series.rows.push_back({t});
  r.scalars["trim"] = number(trim);
  r.scalars["value"] = rep.value;
  r.scalars["charts_used"] = rep.charts_used;
  r.scalars["monotone"] = rep.monotone;
  r.scalars["pair_index_sum"] = rep.pair_index_sum ? Json(*rep.pair_index_sum) : Json(nullptr);
}

void cmd_reduce(const Context& c, RunResult& r) {
  ReductionBoundOptions o;
  o.base = c.analysis;
  if (c.cfg.options.trim > 0) o.trim = c.cfg.options.trim;
  o.samples = c.samples(11);
  const ReductionBoundReport rep = reduction_bounds(c.sys, c.z0, c.cfg.horizon, c.cfg.step, o);
  const int n = c.sys.n();
  r.series.headers = {"t"};
  for (auto& h : indexed("difference_eig", n - 1)) r.series.headers.push_back(h);
  for (std::size_t i = 0; i < rep.sample_times.size(); ++i) {
    std::vector<double> row{rep.sample_times[i]};
    append(row, rep.differences[i]);
    r.series.rows.push_back(row);
  }
  r.scalars["mu_full"] = rep.mu_full;
  r.scalars["mu_reduced"] = rep.mu_reduced;
  r.scalars["index_bound_holds"] = rep.index_bound_holds;
  r.scalars["max_rank"] = rep.max_rank;
  r.scalars["rank_bound_holds"] = rep.rank_bound_holds;
  r.scalars["min_dominance"] = number(rep.min_dominance);
  r.scalars["dominance_holds"] = rep.dominance_holds;
  r.scalars["scale"] = number(rep.scale);
  r.scalars["min_transversality"] = number(rep.min_transversality);
}

void cmd_compare(const Context& c, RunResult& r) {
  ComparisonOptions o;
  o.base = c.analysis;
  o.base_times = c.cfg.options.base_times;
  const ComparisonReport rep = comparison_check(c.sys, c.z0, c.cfg.horizon, c.cfg.step, o);
  r.series.headers = {"t", "first_gap", "longest_free"};
  for (std::size_t i = 0; i < rep.base_times.size(); ++i)
    r.series.rows.push_back({rep.base_times[i], rep.first_gap[i], rep.longest_free[i]});
  r.scalars["eig_upper"] = number(rep.eig_upper);
  r.scalars["trace_lower"] = number(rep.trace_lower);
  r.scalars["min_gap"] = number(rep.min_gap);
  r.scalars["bound_gap"] = number(rep.bound_gap);
  r.scalars["bound_hit"] = number(rep.bound_hit);
  r.scalars["gap_bound_holds"] = rep.gap_bound_holds;
  r.scalars["window_bound_holds"] = rep.window_bound_holds;
  Json times = Json::array();
  for (const auto& p : rep.conjugate) times.push_back(number(p.t));
  r.scalars["conjugate_times"] = times;
}

void cmd_hyperbolic(const Context& c, RunResult& r) {
  const HyperbolicityCertificate cert = certify_negative_curvature(
      c.sys, c.z0, c.cfg.horizon, c.cfg.step, c.cfg.options.reduced, c.analysis);
  r.series.headers = {"t", "max_eig"};
  for (std::size_t i = 0; i < cert.times.size(); ++i)
    r.series.rows.push_back({cert.times[i], cert.max_eigs[i]});
  r.scalars["kind"] = to_string(cert.kind);
  r.scalars["verdict"] = cert.verdict;
  r.scalars["max_eig"] = number(cert.max_eig);
  r.scalars["margin"] = number(cert.margin);
  r.scalars["alpha_estimate"] = cert.alpha_estimate ? number(*cert.alpha_estimate) : Json(nullptr);
  r.scalars["samples"] = cert.samples;
  Json eqs = Json::array();
  for (const auto& e : cert.equilibria) {
    Json re = Json::array(), im = Json::array();
    for (const auto& ev : e.eigenvalues) {
      re.push_back(number(ev.real()));
      im.push_back(number(ev.imag()));
    }
    eqs.push_back(Json{{"z", vec_json(e.z)},
                       {"eigenvalues_real", re},
                       {"eigenvalues_imag", im},
                       {"hyperbolic", e.hyperbolic}});
  }
  r.scalars["equilibria"] = eqs;
  r.diagnostics.insert(r.diagnostics.end(), cert.diagnostics.begin(), cert.diagnostics.end());
}

void cmd_lderiv(const Context& c, RunResult& r) {
  const LDerivSpec& l = *c.cfg.options.lderiv;
  const double tol = c.cfg.tolerances.rank_tol;
  const LDerivData d{l.a, l.q, false};
  const LagrangianFrame lam = l_derivative(d, tol);
  const FiberCheck fc = fiber_check(d, tol);
  const QuadraticForm kh = kernel_hessian(d, tol);
  const Inertia in = inertia(kh.matrix, tol);
  r.scalars["hessian_nondegenerate"] = fc.hessian_nondegenerate;
  r.scalars["transversal_to_fiber"] = fc.transversal_to_fiber;
  r.scalars["hessian_index"] = in.neg;
  r.scalars["hessian_inertia"] = Json{{"pos", in.pos}, {"neg", in.neg}, {"zero", in.zero}};
  r.scalars["isotropy_defect"] = number(lam.isotropy_defect());
  r.scalars["lambda"] = mat_json(lam.basis());
  if (l.a1 || l.q1) {
    const Mat a1 = l.a1.value_or(l.a), q1 = l.q1.value_or(l.q);
    auto family = [&](double tau) {
      return LDerivData{l.a + tau * (a1 - l.a), l.q + tau * (q1 - l.q), false};
    };
    FamilyOptions fo;
    fo.grid_points = c.cfg.options.grid_points;
    fo.maslov = c.analysis.conjugate.maslov;
    const FamilyIndexReport rep = family_index_report(family, l.tau0, l.tau1, fo);
    r.scalars["family_maslov"] = rep.maslov;
    r.scalars["family_hessian_delta"] = rep.hessian_delta;
    r.scalars["family_agree"] = rep.agree;
    r.series.headers = {"t", "hessian_index"};
    for (double tau : linspace(l.tau0, l.tau1, c.samples(21))) {
      const Mat k = kernel_hessian(family(tau), tol).matrix;
      r.series.rows.push_back({tau, static_cast<double>(inertia(k, tol).neg)});
    }
  } else {
    r.series.headers = {"t"};
    for (auto& h : indexed("lambda", lam.basis().rows(), lam.basis().cols()))
      r.series.headers.push_back(h);
    std::vector<double> row{0.0};
    append(row, lam.basis());
    r.series.rows.push_back(row);
  }
}

void write_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorKind::Validation, "cannot write " + tmp.string());
    f << text;
    f.flush();
    if (!f) fail(ErrorKind::Validation, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const RunConfig& c) { return fnv1a_hex(to_json(c).dump()); }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_text(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.headers.size(); ++i) out += (i ? "," : "") + t.headers[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_double(row[i]);
    out += "\n";
  }
  return out;
}

std::string result_json_text(const RunResult& r) {
  Json j = Json::object();
  j["command"] = r.command;
  j["config_hash"] = r.config_hash;
  j["scalars"] = r.scalars;
  j["diagnostics"] = r.diagnostics;
  return j.dump(2) + "\n";
}

std::string provenance_json_text(const RunResult& r) {
  Json j = Json::object();
  j["command"] = r.command;
  j["config_hash"] = r.config_hash;
  j["version"] = JACOBI_VERSION;
  j["wall_time_seconds"] = r.wall_time;
  return j.dump(2) + "\n";
}

RunResult run(const RunConfig& config, const std::string& command, Exec exec) {
  const auto diags = validate(config, command);
  if (!diags.empty()) fail(ErrorKind::Validation, diags.front());
  const auto start = std::chrono::steady_clock::now();

  Context c{config, build_system(config), initial_point(config), {}, exec};
  c.analysis.rank_tol = config.tolerances.rank_tol;
  c.analysis.exec = exec;
  c.analysis.conjugate.maslov.rank_tol = config.tolerances.rank_tol;
  c.analysis.conjugate.maslov.parallel = exec == Exec::Parallel;
  if (config.tolerances.fd_step) c.analysis.jacobi.fd_step = *config.tolerances.fd_step;
  if (config.options.samples) c.analysis.curvature_samples = *config.options.samples;

  RunResult r;
  r.command = command;
  r.config_hash = config_hash(config);
  if (command == "flow") cmd_flow(c, r);
  else if (command == "jacobi") cmd_jacobi(c, r);
  else if (command == "curvature") cmd_curvature(c, r);
  else if (command == "conjugate") cmd_conjugate(c, r);
  else if (command == "morse") cmd_morse(c, r);
  else if (command == "maslov") cmd_maslov(c, r);
  else if (command == "reduce") cmd_reduce(c, r);
  else if (command == "compare") cmd_compare(c, r);
  else if (command == "hyperbolic") cmd_hyperbolic(c, r);
  else cmd_lderiv(c, r);
  if (command != "lderiv") r.scalars["initial"] = vec_json(c.z0);
  r.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

void write_outputs(const RunResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  // Render everything first so a formatting failure leaves no files behind.
  const std::string csv = csv_text(r.series);
  const std::string json = result_json_text(r);
  const std::string prov = provenance_json_text(r);
  write_atomic(dir / (r.command + ".csv"), csv);
  write_atomic(dir / (r.command + ".json"), json);
  write_atomic(dir / "provenance.json", prov);
}

int run_cli(const std::string& command, const std::filesystem::path& config_path,
            const std::filesystem::path& out_dir, std::optional<std::uint64_t> seed,
            bool parallel, std::ostream& err) {
  auto report = [&](int code, const std::string& kind, const std::vector<std::string>& msgs) {
    Json j = Json::object();
    j["error"] = kind;
    j["exit_code"] = code;
    j["command"] = command;
    j["messages"] = msgs;
    err << j.dump() << "\n";
    return code;
  };
  Json raw;
  {
    std::ifstream f(config_path);
    if (!f) return report(kExitValidation, "Validation", {"cannot open " + config_path.string()});
    try {
      raw = Json::parse(f);
    } catch (const std::exception& e) {
      return report(kExitValidation, "Validation", {std::string("config is not valid JSON: ") + e.what()});
    }
  }
  std::vector<std::string> diags;
  RunConfig cfg = parse_config(raw, diags);
  if (seed) cfg.seed = *seed;
  const auto more = validate(cfg, command);
  diags.insert(diags.end(), more.begin(), more.end());
  if (!diags.empty()) return report(kExitValidation, "Validation", diags);
  try {
    const RunResult r = run(cfg, command, parallel ? Exec::Parallel : Exec::Serial);
    write_outputs(r, out_dir);
  } catch (const Error& e) {
    return report(e.is_validation() ? kExitValidation : kExitNumerical, to_string(e.kind()), {e.what()});
  } catch (const std::exception& e) {
    return report(kExitNumerical, "Internal", {e.what()});
  }
  return kExitOk;
}

}  // namespace jacobi::app
