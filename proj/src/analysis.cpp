#include "phasecycle/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "phasecycle/errors.hpp"
#include "phasecycle/simulator.hpp"

namespace phasecycle {

std::string to_string(DecayModel model) {
  switch (model) {
    case DecayModel::mono: return "mono";
    case DecayModel::stretched: return "stretched";
    case DecayModel::recovery: return "recovery";
  }
  return "mono";
}

DecayModel decay_model_from_string(const std::string& s) {
  if (s == "mono") return DecayModel::mono;
  if (s == "stretched") return DecayModel::stretched;
  if (s == "recovery") return DecayModel::recovery;
  throw ValidationError("unknown decay model '" + s + "' (expected mono|stretched|recovery)");
}

namespace {

constexpr double kMaxStretch = 3.0;

// Parameters: A, T and (except for mono) beta.
struct ModelEval {
  double value;
  double d_amp;
  double d_time;
  double d_stretch;
};

ModelEval eval_model(DecayModel model, double t, double amp, double tc, double beta) {
  const double x = t / tc;
  const double u = x > 0.0 ? std::pow(x, beta) : 0.0;
  const double e = std::exp(-u);
  const double lx = x > 0.0 ? std::log(x) : 0.0;
  if (model == DecayModel::recovery) {
    return {amp * (1.0 - 2.0 * e), 1.0 - 2.0 * e, -2.0 * amp * e * u * beta / tc, 2.0 * amp * e * u * lx};
  }
  return {amp * e, e, amp * e * u * beta / tc, -amp * e * u * lx};
}

struct Attempt {
  Eigen::VectorXd params;
  double cost = 0.0;
  unsigned iterations = 0;
  bool converged = false;
};

class Problem {
 public:
  Problem(std::span<const DecayPoint> pts, DecayModel model) : pts_(pts), model_(model) {}

  std::size_t dim() const { return model_ == DecayModel::mono ? 2 : 3; }

  bool feasible(const Eigen::VectorXd& p) const {
    if (!std::isfinite(p[0]) || !(p[1] > 0.0) || !std::isfinite(p[1])) return false;
    if (dim() == 3 && !(p[2] > 0.0 && p[2] <= kMaxStretch)) return false;
    return true;
  }

  double beta(const Eigen::VectorXd& p) const { return dim() == 3 ? p[2] : 1.0; }

  double cost(const Eigen::VectorXd& p) const {
    double c = 0.0;
    for (const auto& pt : pts_) {
      const double r = pt.amplitude - eval_model(model_, pt.time, p[0], p[1], beta(p)).value;
      c += r * r;
    }
    return c;
  }

  void linearize(const Eigen::VectorXd& p, Eigen::MatrixXd& jac, Eigen::VectorXd& res) const {
    jac.resize(static_cast<Eigen::Index>(pts_.size()), static_cast<Eigen::Index>(dim()));
    res.resize(static_cast<Eigen::Index>(pts_.size()));
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      const auto e = eval_model(model_, pts_[i].time, p[0], p[1], beta(p));
      const auto row = static_cast<Eigen::Index>(i);
      res[row] = pts_[i].amplitude - e.value;
      jac(row, 0) = e.d_amp;
      jac(row, 1) = e.d_time;
      if (dim() == 3) jac(row, 2) = e.d_stretch;
    }
  }

  // Best amplitude for fixed shape parameters.
  double linear_amplitude(double tc, double beta) const {
    double num = 0.0, den = 0.0;
    for (const auto& pt : pts_) {
      const double g = eval_model(model_, pt.time, 1.0, tc, beta).value;
      num += g * pt.amplitude;
      den += g * g;
    }
    return den > 0.0 ? num / den : 0.0;
  }

 private:
  std::span<const DecayPoint> pts_;
  DecayModel model_;
};

Attempt levenberg_marquardt(const Problem& prob, Eigen::VectorXd p, const FitOptions& opt) {
  Attempt a;
  double cost = prob.cost(p);
  double lambda = 1e-3;
  Eigen::MatrixXd jac;
  Eigen::VectorXd res;
  for (a.iterations = 0; a.iterations < opt.max_iterations; ++a.iterations) {
    prob.linearize(p, jac, res);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * res;
    bool accepted = false;
    double rel = 0.0;
    while (lambda < 1e16) {
      Eigen::MatrixXd lhs = jtj;
      for (Eigen::Index i = 0; i < lhs.rows(); ++i) lhs(i, i) += lambda * std::max(jtj(i, i), 1e-300);
      const Eigen::VectorXd step = lhs.ldlt().solve(grad);
      const Eigen::VectorXd trial = p + step;
      const double trial_cost = prob.feasible(trial) ? prob.cost(trial) : INFINITY;
      if (std::isfinite(trial_cost) && trial_cost <= cost) {
        rel = 0.0;
        for (Eigen::Index i = 0; i < p.size(); ++i)
          rel = std::max(rel, std::abs(step[i]) / std::max(std::abs(p[i]), 1e-300));
        p = trial;
        cost = trial_cost;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      // No damping level lowers the cost: stationary to rounding.
      a.converged = true;
      break;
    }
    if (rel < opt.tolerance) a.converged = true;
    // Keep polishing once converged; stop when steps reach rounding level.
    if (a.converged && rel < 1e-14) break;
  }
  a.params = p;
  a.cost = cost;
  return a;
}

}  // namespace

DecayFit fit_decay(std::span<const DecayPoint> points, DecayModel model, const FitOptions& options) {
  if (points.size() < 4) throw ValidationError("fit_decay needs at least 4 points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].time) || !std::isfinite(points[i].amplitude))
      throw ValidationError("fit_decay: non-finite data point");
    if (points[i].time < 0.0) throw ValidationError("fit_decay: times must be nonnegative");
    if (i > 0 && !(points[i].time > points[i - 1].time))
      throw ValidationError("fit_decay: times must be strictly increasing");
  }
  double mean = 0.0, peak = 0.0;
  for (const auto& p : points) {
    mean += p.amplitude;
    peak = std::max(peak, std::abs(p.amplitude));
  }
  mean /= static_cast<double>(points.size());
  double spread = 0.0;
  for (const auto& p : points) spread = std::max(spread, std::abs(p.amplitude - mean));
  if (peak == 0.0 || spread <= 1e-12 * peak) throw ConvergenceError("fit_decay: data are flat, no decay to fit");

  const Problem prob(points, model);
  const double t_max = points.back().time;
  double t_min = t_max;
  for (const auto& p : points)
    if (p.time > 0.0) t_min = std::min(t_min, p.time);
  const double lo = std::min(t_min, t_max / 50.0), hi = 50.0 * t_max;

  std::vector<double> betas = {1.0};
  if (model != DecayModel::mono) betas = {0.8, 1.0, 1.5, 2.0};

  std::optional<Attempt> best;
  unsigned converged = 0;
  double best_any = INFINITY;
  for (int k = 0; k < 8; ++k) {
    const double tc = lo * std::pow(hi / lo, k / 7.0);
    for (double beta : betas) {
      Eigen::VectorXd p(static_cast<Eigen::Index>(prob.dim()));
      p[0] = prob.linear_amplitude(tc, beta);
      p[1] = tc;
      if (prob.dim() == 3) p[2] = beta;
      if (p[0] == 0.0) continue;
      Attempt a = levenberg_marquardt(prob, p, options);
      best_any = std::min(best_any, a.cost);
      if (!a.converged) continue;
      ++converged;
      if (!best || a.cost < best->cost) best = std::move(a);
    }
  }
  if (!best) {
    std::ostringstream os;
    os << "fit_decay (" << to_string(model) << "): no start converged within " << options.max_iterations
       << " iterations; best cost " << best_any;
    throw ConvergenceError(os.str());
  }

  DecayFit fit;
  fit.model = model;
  fit.amplitude = best->params[0];
  fit.time_constant = best->params[1];
  fit.stretch = prob.dim() == 3 ? best->params[2] : 1.0;
  fit.residual_rms = std::sqrt(best->cost / static_cast<double>(points.size()));
  fit.iterations = best->iterations;
  fit.starts_converged = converged;
  return fit;
}

double evaluate_decay(const DecayFit& fit, double t) {
  return eval_model(fit.model, t, fit.amplitude, fit.time_constant, fit.stretch).value;
}

ScalingFit scaling_exponent(std::span<const ScalingPoint> series) {
  if (series.size() < 3) throw ValidationError("scaling_exponent needs at least 3 points");
  const auto n = static_cast<double>(series.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& p : series) {
    if (!(p.m > 0.0) || !(p.t2 > 0.0)) throw ValidationError("scaling_exponent: m and T2 must be positive");
    sx += std::log(p.m);
    sy += std::log(p.t2);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : series) {
    const double dx = std::log(p.m) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(p.t2) - my);
  }
  if (sxx == 0.0) throw ValidationError("scaling_exponent: all m values are equal");
  ScalingFit f;
  f.alpha = sxy / sxx;
  f.intercept = my - f.alpha * mx;
  double ssr = 0.0;
  for (const auto& p : series) {
    const double r = std::log(p.t2) - (f.intercept + f.alpha * std::log(p.m));
    ssr += r * r;
  }
  f.stderr_alpha = std::sqrt(ssr / (n - 2.0) / sxx);
  f.points = series.size();
  return f;
}

Matrix2c density_from_bloch(const BlochVector& b) {
  return 0.5 * (Matrix2c::Identity() + b.x * pauli_x() + b.y * pauli_y() + b.z * pauli_z());
}

EffectiveState effective_state(const BlochVector& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("effective_state: zero expectation vector has no direction");
  EffectiveState s;
  s.v = v;
  s.unit = v * (1.0 / n);
  s.rho = density_from_bloch(s.unit);
  return s;
}

namespace {

struct Eigen2 {
  std::array<double, 2> values;
  std::array<Eigen::Vector2cd, 2> vectors;
};

// Closed-form eigensystem of a 2x2 Hermitian matrix.
Eigen2 hermitian_eigen(const Matrix2c& h) {
  const double a = h(0, 0).real(), d = h(1, 1).real();
  const Complex b = h(0, 1);
  const double mid = 0.5 * (a + d);
  const double rad = std::hypot(0.5 * (a - d), std::abs(b));
  Eigen2 e;
  e.values = {mid + rad, mid - rad};
  if (std::abs(b) <= 1e-300) {
    e.vectors[0] = a >= d ? Eigen::Vector2cd(1, 0) : Eigen::Vector2cd(0, 1);
    e.vectors[1] = a >= d ? Eigen::Vector2cd(0, 1) : Eigen::Vector2cd(1, 0);
    return e;
  }
  for (int k = 0; k < 2; ++k) {
    // Pick the better-conditioned of the two null-space candidates.
    Eigen::Vector2cd v1(b, e.values[k] - a);
    Eigen::Vector2cd v2(e.values[k] - d, std::conj(b));
    Eigen::Vector2cd v = v1.norm() >= v2.norm() ? v1 : v2;
    e.vectors[k] = v / v.norm();
  }
  return e;
}

Matrix2c psd_sqrt(const Matrix2c& h) {
  const auto e = hermitian_eigen(h);
  Matrix2c r = Matrix2c::Zero();
  for (int k = 0; k < 2; ++k) r += std::sqrt(std::max(e.values[k], 0.0)) * e.vectors[k] * e.vectors[k].adjoint();
  return r;
}

}  // namespace

void validate_density(const Matrix2c& rho, double tol) {
  const double herm = std::max({std::abs(rho(0, 1) - std::conj(rho(1, 0))), std::abs(rho(0, 0).imag()),
                                std::abs(rho(1, 1).imag())});
  if (herm > 1e-10) throw ValidationError("density matrix is not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > 1e-10) throw ValidationError("density matrix does not have unit trace");
  const auto e = hermitian_eigen(rho);
  if (e.values[1] < -tol) {
    std::ostringstream os;
    os << "density matrix has negative eigenvalue " << e.values[1];
    throw ValidationError(os.str());
  }
}

double fidelity(const Matrix2c& rho, const Matrix2c& sigma) {
  validate_density(rho);
  validate_density(sigma);
  const double overlap = (rho * sigma).trace().real();
  const double dets = rho.determinant().real() * sigma.determinant().real();
  return std::clamp(overlap + 2.0 * std::sqrt(std::max(dets, 0.0)), 0.0, 1.0);
}

double fidelity_spectral(const Matrix2c& rho, const Matrix2c& sigma) {
  validate_density(rho);
  validate_density(sigma);
  const Matrix2c root = psd_sqrt(rho);
  Matrix2c inner = root * sigma * root;
  inner = 0.5 * (inner + inner.adjoint()).eval();
  const auto e = hermitian_eigen(inner);
  const double tr = std::sqrt(std::max(e.values[0], 0.0)) + std::sqrt(std::max(e.values[1], 0.0));
  return std::clamp(tr * tr, 0.0, 1.0);
}

BlochVector tomography_readout(const QubitState& state) {
  constexpr double kHalfPi = std::numbers::pi / 2;
  BlochVector b;
  b.x = apply_rotation(state, {kHalfPi, -kHalfPi}).bloch().z;
  b.y = apply_rotation(state, {kHalfPi, 0.0}).bloch().z;
  b.z = state.bloch().z;
  return b;
}

std::vector<FidelityPoint> fidelity_benchmark(SequenceKind family, std::span<const unsigned> m_values,
                                              SchemeKind scheme_kind, const NoiseModel& noise,
                                              const BenchmarkOptions& options) {
  if (family == SequenceKind::custom) throw ValidationError("fidelity_benchmark needs a CP, CPMG or UDD family");
  std::vector<FidelityPoint> out;
  for (unsigned m : m_values) {
    const PulseSequence seq = build_sequence(family, m, options.timing);
    const PhaseScheme scheme = build_scheme(scheme_kind, m);
    SchemeRunOptions run;
    run.ensemble_size = options.ensemble_size;
    run.workers = options.workers;
    run.sample_trace = false;
    const SchemeResult res = run_scheme(seq, scheme, noise, run);

    BlochVector v;
    for (std::size_t r = 0; r < scheme.row_count(); ++r)
      v += tomography_readout(QubitState::from_bloch(res.row_final[r])) * static_cast<double>(scheme.sign[r]);

    FidelityPoint pt;
    pt.m = m;
    pt.state = effective_state(v);
    pt.target = propagate(seq, NoiseModel::ideal(), 0.0, measure_time(seq)).bloch();
    pt.fidelity = fidelity(pt.state.rho, density_from_bloch(pt.target));
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace phasecycle
