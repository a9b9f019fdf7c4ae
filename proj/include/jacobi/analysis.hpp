#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "jacobi/hamiltonian.hpp"
#include "jacobi/kernels.hpp"
#include "jacobi/maslov.hpp"

namespace jacobi {

struct AnalysisOptions {
  JacobiOptions jacobi;
  ConjugateOptions conjugate;
  double rank_tol = kRankTol;
  int curvature_samples = 201;  // orbit samples for curvature spectra
  Exec exec = Exec::Serial;
};

// Eigenvalues of the field curvature at evenly strided trajectory states.
struct CurvatureSamples {
  std::vector<double> times;
  std::vector<Vec> spectra;  // ascending real parts
  double max_eig = 0.0;
  double min_eig = 0.0;
  double min_mean = 0.0;     // min over samples of tr R / n
  double hess_norm = 0.0;    // max spectral norm of Hess H over samples
};

CurvatureSamples sample_field_curvature(const HamiltonianSystem& sys, const Trajectory& traj,
                                        int samples, Exec exec = Exec::Serial);

// Conjugate-time comparison against the curvature bounds along one orbit.
// Gaps are measured from several base times s: the first time after s where
// Lambda(t) meets Lambda(s).
struct ComparisonReport {
  double eig_upper = 0.0;    // c+, max curvature eigenvalue
  double trace_lower = 0.0;  // min of tr R / n
  double min_gap = 0.0;      // infinity when no conjugate pair was found
  double bound_gap = 0.0;    // pi / sqrt(c+), infinity for c+ <= 0
  double bound_hit = 0.0;    // pi / sqrt(trace_lower), infinity for trace_lower <= 0
  std::vector<ConjugatePoint> conjugate;  // relative to Lambda(0)
  std::vector<double> base_times;
  std::vector<double> first_gap;          // per base time, infinity when none
  // Per base time s: longest stretch of [s, horizon] free of times conjugate
  // to s.
  std::vector<double> longest_free;
  bool gap_bound_holds = true;            // min_gap >= bound_gap - step
  bool window_bound_holds = true;         // every checked window holds a conjugate time
  CurvatureSamples curvature;
};

struct ComparisonOptions {
  AnalysisOptions base;
  int base_times = 8;
};

ComparisonReport comparison_check(const HamiltonianSystem& sys, const Vec& z0, double horizon,
                                  double step, const ComparisonOptions& opts = {});

struct EquilibriumReport {
  Vec z;
  std::vector<std::complex<double>> eigenvalues;  // of the linearized field
  double min_real_gap = 0.0;                      // min |Re lambda|
  bool hyperbolic = false;
  Mat stable_basis;  // real basis of the contracting subspace
};

// Newton on dH = 0 from the guess, then the spectrum of the linearization.
EquilibriumReport analyze_equilibrium(const HamiltonianSystem& sys, const Vec& guess,
                                      double rank_tol = kRankTol);

enum class CertificateKind { ReducedFlow, EquilibriumSet };
std::string to_string(CertificateKind k);

struct HyperbolicityCertificate {
  CertificateKind kind = CertificateKind::EquilibriumSet;
  double max_eig = 0.0;
  double margin = 0.0;  // verdict needs max_eig < -margin
  std::optional<double> alpha_estimate;  // from equilibrium spectra only
  bool verdict = false;
  std::vector<std::string> diagnostics;
  std::vector<EquilibriumReport> equilibria;
  std::size_t samples = 0;
  std::vector<double> times;     // sample times
  std::vector<double> max_eigs;  // largest curvature eigenvalue per sample
};

// Negative (reduced) curvature along the sampled orbit plus hyperbolic
// linearization at any equilibrium met on it.
HyperbolicityCertificate certify_negative_curvature(const HamiltonianSystem& sys, const Vec& z0,
                                                    double horizon, double step, bool reduced,
                                                    const AnalysisOptions& opts = {});

struct DecayFit {
  double rate = 0.0;      // -slope of log |z - target| against t
  double residual = 0.0;  // rms of the log fit
  std::size_t points = 0;
};

// Least-squares exponential rate; points closer than `floor` are dropped.
DecayFit fit_decay_rate(const Trajectory& traj, const Vec& target, double floor = 1e-12);

struct MorseOptions {
  AnalysisOptions base;
  double trim = 0.0;  // 0 selects a tenth of the first conjugate time (or horizon)
};

struct MorseRecord {
  int index = 0;
  std::vector<ConjugatePoint> conjugate_points;
  MonotonicityReport legendre;
  double trim = 0.0;
  int trimmed_maslov = 0;     // Maslov index of Lambda on [trim, horizon] w.r.t. Lambda(0)
  int index_from_maslov = 0;  // -sign * trimmed_maslov
  bool agree = false;
};

// DegenerateEndpoint when Lambda(horizon) meets Lambda(0); NotMonotone when
// Hxx is not definite along the orbit.
MorseRecord morse_pipeline(const HamiltonianSystem& sys, const Vec& z0, double horizon,
                           double step, const MorseOptions& opts = {});

struct ReductionBoundOptions {
  AnalysisOptions base;
  double trim = 0.05;  // Maslov indices are taken on [trim, horizon]
  int samples = 11;    // curvature comparison times
  double tol = 1e-6;   // relative to the largest curvature form entry
};

// Energy reduction against the full Jacobi curve, for the time-reversed
// (increasing) curves with Pi the fiber:
//   0 <= mu_reduced - mu_full <= 1,
//   r_reduced - r_full restricted is positive semidefinite of rank <= 1.
struct ReductionBoundReport {
  int mu_full = 0;
  int mu_reduced = 0;
  std::vector<double> sample_times;
  std::vector<Vec> differences;  // eigenvalues of the form difference per sample
  double min_transversality = 0.0;  // min |H_x| / |dH| along the orbit
  int max_rank = 0;
  double min_dominance = 0.0;    // smallest eigenvalue over samples, scaled
  double scale = 0.0;
  bool index_bound_holds = false;
  bool rank_bound_holds = false;
  bool dominance_holds = false;
};

ReductionBoundReport reduction_bounds(const HamiltonianSystem& sys, const Vec& z0, double horizon,
                                      double step, const ReductionBoundOptions& opts = {});

}  // namespace jacobi
