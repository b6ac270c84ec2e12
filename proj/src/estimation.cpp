#include "freqbin/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "freqbin/constants.hpp"
#include "freqbin/errors.hpp"
#include "freqbin/rng.hpp"

namespace freqbin::estimation {

namespace {

using Vector5 = Eigen::Matrix<double, 5, 1>;
using Matrix5 = Eigen::Matrix<double, 5, 5>;

// d sinc / dx, stable through x = 0.
double sinc_derivative(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    return -x / 3.0 + x * x * x / 30.0;
  }
  return (std::cos(x) - std::sin(x) / x) / x;
}

double model_value(const Vector5& x, double delay) {
  const double envelope = beating::sinc(x[2] * delay);
  const double carrier = std::cos(x[3] * delay + x[4]);
  return x[0] * (1.0 - x[1] * envelope * carrier);
}

void model_jacobian_row(const Vector5& x, double delay, Vector5& row) {
  const double envelope = beating::sinc(x[2] * delay);
  const double arg = x[3] * delay + x[4];
  const double carrier = std::cos(arg);
  const double carrier_d = std::sin(arg);
  row[0] = 1.0 - x[1] * envelope * carrier;
  row[1] = -x[0] * envelope * carrier;
  row[2] = -x[0] * x[1] * delay * sinc_derivative(x[2] * delay) * carrier;
  row[3] = x[0] * x[1] * envelope * carrier_d * delay;
  row[4] = x[0] * x[1] * envelope * carrier_d;
}

struct WeightedData {
  std::vector<double> delays;
  std::vector<double> values;
  std::vector<double> sigmas;
};

double objective(const WeightedData& data, const Vector5& x) {
  double sum = 0.0;
  for (std::size_t i = 0; i < data.delays.size(); ++i) {
    const double r = (model_value(x, data.delays[i]) - data.values[i]) / data.sigmas[i];
    sum += r * r;
  }
  return sum;
}

void normal_equations(const WeightedData& data, const Vector5& x, Matrix5& hessian,
                      Vector5& gradient) {
  hessian.setZero();
  gradient.setZero();
  Vector5 row;
  for (std::size_t i = 0; i < data.delays.size(); ++i) {
    model_jacobian_row(x, data.delays[i], row);
    const double inv_sigma = 1.0 / data.sigmas[i];
    row *= inv_sigma;
    const double residual = (model_value(x, data.delays[i]) - data.values[i]) * inv_sigma;
    hessian.noalias() += row * row.transpose();
    gradient.noalias() += row * residual;
  }
}

struct LmOutcome {
  Vector5 x;
  double objective{std::numeric_limits<double>::infinity()};
  bool converged{false};
  int iterations{0};
};

LmOutcome levenberg_marquardt(const WeightedData& data, Vector5 x, int max_iterations) {
  constexpr double kRelativeDecrease = 1e-10;
  constexpr double kStepNorm = 1e-12;

  LmOutcome out;
  double current = objective(data, x);
  double damping = 1e-3;
  Matrix5 hessian;
  Vector5 gradient;

  for (int iter = 1; iter <= max_iterations; ++iter) {
    out.iterations = iter;
    normal_equations(data, x, hessian, gradient);
    const double max_diag = hessian.diagonal().maxCoeff();
    if (!(max_diag > 0.0) || !std::isfinite(max_diag)) {
      break;  // all-zero Jacobian; nothing to improve
    }

    bool stepped = false;
    for (int attempt = 0; attempt < 50; ++attempt) {
      Matrix5 damped = hessian;
      for (int j = 0; j < 5; ++j) {
        // Marquardt scaling with a floor so identically-flat directions
        // stay put instead of producing a singular solve.
        const double scale = std::max(hessian(j, j), 1e-14 * max_diag);
        damped(j, j) += damping * scale;
      }
      const Vector5 step = damped.ldlt().solve(-gradient);
      if (!step.allFinite()) {
        damping *= 4.0;
        continue;
      }
      const Vector5 trial = x + step;
      const double trial_objective = objective(data, trial);
      if (std::isfinite(trial_objective) && trial_objective <= current) {
        const double decrease = current - trial_objective;
        const double step_scale = step.norm() / (x.norm() + kStepNorm);
        x = trial;
        current = trial_objective;
        damping = std::max(damping / 3.0, 1e-12);
        stepped = true;
        if (decrease <= kRelativeDecrease * std::max(current, 1e-300) ||
            step_scale <= kStepNorm) {
          out.converged = true;
        }
        break;
      }
      damping *= 4.0;
    }
    if (!stepped) {
      // Damping exhausted without any acceptable step: the objective is at
      // a (possibly flat) minimum up to numerical resolution.
      out.converged = true;
      break;
    }
    if (out.converged) {
      break;
    }
  }
  out.x = x;
  out.objective = current;
  return out;
}

// cos(w t + phi) is invariant under (w, phi) -> (-w, -phi); report w >= 0,
// fold negative visibility into a pi phase shift and wrap.
void canonicalize(Vector5& x) {
  x[0] = std::abs(x[0]);
  if (x[1] < 0.0) {
    x[1] = -x[1];
    x[4] += kPi;
  }
  x[2] = std::abs(x[2]);
  if (x[3] < 0.0) {
    x[3] = -x[3];
    x[4] = -x[4];
  }
  x[4] = statekit::wrap_angle(x[4]);
}

}  // namespace

beating::BeatingParams initial_guess(const beating::BeatingDataset& data) {
  beating::validate(data);
  const std::size_t n = data.delays_ps.size();
  if (n < 16) {
    throw ValidationError("initial guess needs at least 16 data points");
  }

  double mean = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto c : data.counts) {
    const auto value = static_cast<double>(c);
    mean += value;
    lo = std::min(lo, value);
    hi = std::max(hi, value);
  }
  mean /= static_cast<double>(n);

  double visibility = 0.0;
  if (hi + lo > 0.0) {
    visibility = std::clamp((hi - lo) / (hi + lo), 0.0, 1.0);
  }

  const double span = data.delays_ps.back() - data.delays_ps.front();

  // Uniform resampling of the mean-subtracted series, then an O(n^2) DFT;
  // the dominant nonzero bin locates the carrier frequency.
  const std::size_t m = n;
  const double dt = span / static_cast<double>(m - 1);
  std::vector<double> resampled(m);
  std::size_t src = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const double t = data.delays_ps.front() + dt * static_cast<double>(k);
    while (src + 2 < n && data.delays_ps[src + 1] < t) {
      ++src;
    }
    const double t0 = data.delays_ps[src];
    const double t1 = data.delays_ps[src + 1];
    const double w = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
    const double y0 = static_cast<double>(data.counts[src]) - mean;
    const double y1 = static_cast<double>(data.counts[src + 1]) - mean;
    resampled[k] = y0 + w * (y1 - y0);
  }

  std::size_t best_bin = 1;
  double best_power = -1.0;
  for (std::size_t k = 1; k <= m / 2; ++k) {
    std::complex<double> amp{0.0, 0.0};
    for (std::size_t j = 0; j < m; ++j) {
      const double phase = -2.0 * kPi * static_cast<double>(k * j) / static_cast<double>(m);
      amp += resampled[j] * std::polar(1.0, phase);
    }
    const double power = std::norm(amp);
    if (power > best_power) {
      best_power = power;
      best_bin = k;
    }
  }
  const double delta_omega =
      2.0 * kPi * static_cast<double>(best_bin) / (dt * static_cast<double>(m));

  return {mean, visibility, 2.0 * kPi / span, delta_omega, 0.0};
}

BeatingFit fit_beating(const beating::BeatingDataset& data,
                       const beating::BeatingParams& guess,
                       const FitOptions& options) {
  beating::validate(data);
  const std::size_t n = data.delays_ps.size();
  if (n < 6) {
    throw ValidationError("beating fit needs more points than parameters");
  }
  if (options.max_iterations < 1) {
    throw ValidationError("max_iterations must be >= 1");
  }
  if (!std::isfinite(guess.amplitude) || !std::isfinite(guess.visibility) ||
      !std::isfinite(guess.envelope) || !std::isfinite(guess.delta_omega) ||
      !std::isfinite(guess.phase)) {
    throw ValidationError("initial guess must be finite");
  }

  WeightedData wd;
  wd.delays = data.delays_ps;
  wd.values.reserve(n);
  wd.sigmas.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    wd.values.push_back(static_cast<double>(data.counts[i]) -
                        options.subtract_accidental_counts);
    // Poissonian weights; empty bins keep a unit sigma so they still count.
    wd.sigmas.push_back(std::max(1.0, std::sqrt(static_cast<double>(data.counts[i]))));
  }

  const double base_delta_omega = std::abs(guess.delta_omega);
  LmOutcome best;
  bool have_best = false;
  // Phase/frequency-sign multi-start to escape the carrier phase ambiguity.
  for (const double start_phase : {0.0, kPi / 2.0, kPi, 3.0 * kPi / 2.0}) {
    for (const double sign : {1.0, -1.0}) {
      Vector5 x;
      x << guess.amplitude, guess.visibility, guess.envelope,
          sign * base_delta_omega, start_phase;
      LmOutcome outcome = levenberg_marquardt(wd, x, options.max_iterations);
      canonicalize(outcome.x);
      if (!have_best) {
        best = outcome;
        have_best = true;
        continue;
      }
      const double tol = 1e-9 * std::max(1.0, best.objective);
      if (outcome.objective < best.objective - tol ||
          (std::abs(outcome.objective - best.objective) <= tol &&
           std::abs(outcome.x[4]) < std::abs(best.x[4]))) {
        best = outcome;
      }
    }
  }

  BeatingFit fit;
  fit.params = {best.x[0], best.x[1], best.x[2], best.x[3], best.x[4]};
  fit.converged = best.converged;
  fit.iterations = best.iterations;
  const double dof = static_cast<double>(n) - 5.0;
  fit.reduced_chi_square = best.objective / dof;

  Matrix5 hessian;
  Vector5 gradient;
  normal_equations(wd, best.x, hessian, gradient);
  // Scale-invariant singularity test: normalize to the correlation matrix so
  // wildly different parameter magnitudes do not masquerade as rank loss.
  if (!(hessian.diagonal().minCoeff() > 0.0)) {
    throw DegenerateFitError("normal equations are singular at the optimum");
  }
  const Vector5 scale = hessian.diagonal().cwiseSqrt();
  const Matrix5 normalized =
      hessian.array() / (scale * scale.transpose()).array();
  Eigen::SelfAdjointEigenSolver<Matrix5> eig(normalized);
  if (eig.eigenvalues().minCoeff() <= 1e-12) {
    throw DegenerateFitError("normal equations are singular at the optimum");
  }
  const Matrix5 covariance =
      (normalized.inverse().array() / (scale * scale.transpose()).array()).matrix() *
      fit.reduced_chi_square;
  fit.errors = {std::sqrt(covariance(0, 0)), std::sqrt(covariance(1, 1)),
                std::sqrt(covariance(2, 2)), std::sqrt(covariance(3, 3)),
                std::sqrt(covariance(4, 4))};
  return fit;
}

PolynomialFit fit_power_scan(const std::vector<PowerScanPoint>& points) {
  const std::size_t n = points.size();
  if (n < 4) {
    throw ValidationError("power-scan fit needs at least 4 points");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(points[i].sigma_hz > 0.0)) {
      throw ValidationError("power-scan sigmas must be positive");
    }
    if (!(points[i].power_mw >= 0.0)) {
      throw ValidationError("powers must be nonnegative");
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (points[i].power_mw == points[j].power_mw) {
        throw ValidationError("powers must be distinct");
      }
    }
  }

  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd target(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 1.0 / points[i].sigma_hz;
    design(i, 0) = points[i].power_mw * points[i].power_mw * w;
    design(i, 1) = points[i].power_mw * w;
    design(i, 2) = w;
    target(i) = points[i].singles_hz * w;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3) {
    throw DegenerateFitError("power-scan design matrix is rank deficient");
  }

  // Rates are nonnegative; when the unconstrained solution dips below zero,
  // solve every support subset and keep the best feasible one (exact for
  // three parameters).
  Eigen::Vector3d coeffs = qr.solve(target);
  if (coeffs.minCoeff() < 0.0) {
    double best_ssr = std::numeric_limits<double>::infinity();
    Eigen::Vector3d best = Eigen::Vector3d::Zero();
    for (int mask = 0; mask < 8; ++mask) {
      std::vector<int> support;
      for (int j = 0; j < 3; ++j) {
        if (mask & (1 << j)) {
          support.push_back(j);
        }
      }
      Eigen::Vector3d candidate = Eigen::Vector3d::Zero();
      if (!support.empty()) {
        Eigen::MatrixXd sub(n, support.size());
        for (std::size_t col = 0; col < support.size(); ++col) {
          sub.col(col) = design.col(support[col]);
        }
        const Eigen::VectorXd sol =
            sub.colPivHouseholderQr().solve(target);
        bool feasible = true;
        for (std::size_t col = 0; col < support.size(); ++col) {
          if (!(sol(col) >= 0.0)) {
            feasible = false;
            break;
          }
          candidate(support[col]) = sol(col);
        }
        if (!feasible) {
          continue;
        }
      }
      const double ssr = (design * candidate - target).squaredNorm();
      if (ssr < best_ssr) {
        best_ssr = ssr;
        best = candidate;
      }
    }
    coeffs = best;
  }

  // Standard errors from the full-information covariance (sigmas are the
  // known Poisson errors; no chi-square rescaling).
  const Eigen::Matrix3d information = design.transpose() * design;
  const Eigen::Matrix3d covariance = information.inverse();

  PolynomialFit fit;
  fit.quadratic = coeffs(0);
  fit.linear = coeffs(1);
  fit.constant = coeffs(2);
  fit.sigma_quadratic = std::sqrt(covariance(0, 0));
  fit.sigma_linear = std::sqrt(covariance(1, 1));
  fit.sigma_constant = std::sqrt(covariance(2, 2));
  return fit;
}

DensityMatrix density_from_parameters(double p, double visibility, double phase) {
  if (!(p >= 0.0) || !(p <= 1.0)) {
    throw ValidationError("balance parameter must lie in [0, 1]");
  }
  if (!(visibility >= 0.0) || !std::isfinite(visibility)) {
    throw ValidationError("visibility must be nonnegative and finite");
  }
  if (!std::isfinite(phase)) {
    throw ValidationError("phase must be finite");
  }
  DensityMatrix rho;
  rho.entries.setZero();
  rho.entries(1, 1) = p;
  rho.entries(2, 2) = 1.0 - p;
  rho.entries(1, 2) = std::polar(visibility / 2.0, -phase);
  rho.entries(2, 1) = std::polar(visibility / 2.0, phase);
  rho.p = p;
  rho.visibility = visibility;
  rho.phase = phase;
  rho.physical = physicality_margin(p, visibility) >= -1e-12;
  return rho;
}

DensityMatrix reconstruct_density(double p, double visibility, double phase) {
  if (!(visibility >= 0.0) || !(visibility <= 1.0)) {
    throw ValidationError("visibility must lie in [0, 1]");
  }
  return density_from_parameters(p, visibility, phase);
}

double physicality_margin(double p, double visibility) {
  if (!(p >= 0.0) || !(p <= 1.0)) {
    throw ValidationError("balance parameter must lie in [0, 1]");
  }
  if (!(visibility >= 0.0)) {
    throw ValidationError("visibility must be nonnegative");
  }
  return std::sqrt(p * (1.0 - p)) - visibility / 2.0;
}

double clip_visibility_physical(double p, double visibility) {
  if (!(p >= 0.0) || !(p <= 1.0)) {
    throw ValidationError("balance parameter must lie in [0, 1]");
  }
  return std::min({visibility, 1.0, 2.0 * std::sqrt(p * (1.0 - p))});
}

double fidelity_to_bell(const DensityMatrix& rho) {
  if (!rho.entries.allFinite()) {
    throw ValidationError("density matrix entries must be finite");
  }
  if ((rho.entries - rho.entries.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ValidationError("density matrix must be Hermitian within 1e-12");
  }
  if (std::abs(rho.entries.trace().real() - 1.0) > 1e-12 ||
      std::abs(rho.entries.trace().imag()) > 1e-12) {
    throw ValidationError("density matrix must have unit trace within 1e-12");
  }
  Eigen::Vector4cd bell;
  bell << 0.0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0;
  return (bell.adjoint() * rho.entries * bell)(0, 0).real();
}

double fidelity_closed_form(double visibility, double phase) {
  return (1.0 + visibility * std::cos(phase)) / 2.0;
}

namespace {

Stat summarize(const std::vector<double>& samples) {
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double var = 0.0;
  for (const double s : samples) {
    var += (s - mean) * (s - mean);
  }
  var /= (n - 1.0);
  return {mean, std::sqrt(var)};
}

}  // namespace

BootstrapSummary propagate_uncertainties(const counting::BranchCounts& counts,
                                         const BeatingFit& fit, int replicates,
                                         std::uint64_t seed) {
  if (replicates < 100) {
    throw ValidationError("bootstrap needs at least 100 replicates");
  }
  if (counts.n_ab + counts.n_ba <= 0) {
    throw ValidationError("bootstrap needs at least one antibunching count");
  }

  std::vector<double> p_samples, v_samples, phi_samples, f_samples;
  p_samples.reserve(replicates);
  v_samples.reserve(replicates);
  phi_samples.reserve(replicates);
  f_samples.reserve(replicates);

  for (int r = 0; r < replicates; ++r) {
    rng::RandomStream stream(rng::derive_seed(seed, static_cast<std::uint64_t>(r)));

    // Counts resample Poisson-wise around the observed values; entries with a
    // zero recorded sigma are treated as exact.
    std::int64_t ab = counts.n_ab;
    std::int64_t ba = counts.n_ba;
    do {
      if (counts.sigma_ab > 0.0) {
        ab = stream.poisson(static_cast<double>(counts.n_ab));
      }
      if (counts.sigma_ba > 0.0) {
        ba = stream.poisson(static_cast<double>(counts.n_ba));
      }
    } while (ab + ba == 0);

    const double v = fit.errors.visibility > 0.0
                         ? stream.normal(fit.params.visibility, fit.errors.visibility)
                         : fit.params.visibility;
    const double phi = fit.errors.phase > 0.0
                           ? stream.normal(fit.params.phase, fit.errors.phase)
                           : fit.params.phase;

    p_samples.push_back(static_cast<double>(ba) / static_cast<double>(ab + ba));
    v_samples.push_back(v);
    phi_samples.push_back(phi);
    f_samples.push_back(fidelity_closed_form(v, phi));
  }

  BootstrapSummary summary;
  summary.balance = summarize(p_samples);
  summary.visibility = summarize(v_samples);
  summary.phase = summarize(phi_samples);
  summary.fidelity = summarize(f_samples);
  summary.replicates = replicates;
  summary.seed = seed;
  return summary;
}

}  // namespace freqbin::estimation
