#include "scalefit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "scalefit/errors.hpp"
#include "scalefit/rng.hpp"

namespace scalefit {

namespace {

constexpr int kDefaultSweeps = 10000;
constexpr int kDefaultNewtonSteps = 100;
constexpr double kArmijo = 1e-4;

double data_term(const LossSpec& loss_spec, const Vector& y, const Vector& fitted) {
  const Index n = y.size();
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) acc += loss(loss_spec, y[i], fitted[i]);
  return acc / static_cast<double>(n);
}

struct SolveResult {
  Vector beta;
  SolverReport report;
};

// Projected-Newton polish for the dual box QP (minimize psi(beta) =
// beta' K beta - 2 beta' y over the box). Coordinates pressed against their
// bound by the gradient are frozen, the Newton system is solved on the free
// set (with a truncated eigensolve when the face is numerically singular),
// and the step is globalized by a projection-arc line search. Runs on a trial
// copy and commits only on strict dual improvement, so the sweep loop keeps
// the convergence guarantee.
bool subspace_step(const Matrix& K, const Vector& y, double jitter, double lo, double hi,
                   Vector& beta, Vector& q) {
  const Index n = y.size();
  Vector beta_trial = beta;
  Vector q_trial = q;
  const auto psi = [&](const Vector& b, const Vector& qb) { return b.dot(qb) - 2.0 * b.dot(y); };
  const double psi_start = psi(beta, q);
  double psi_current = psi_start;

  for (int pass = 0; pass < 8; ++pass) {
    std::vector<Index> free_set;
    for (Index i = 0; i < n; ++i) {
      const double g = 2.0 * (q_trial[i] - y[i]);
      const bool pinned_hi = beta_trial[i] >= hi && g < 0.0;
      const bool pinned_lo = beta_trial[i] <= lo && g > 0.0;
      if (!pinned_hi && !pinned_lo) free_set.push_back(i);
    }
    if (free_set.empty()) break;
    const Index m = static_cast<Index>(free_set.size());

    Matrix kff(m, m);
    Vector rhs(m);
    for (Index a = 0; a < m; ++a) {
      const Index ia = free_set[static_cast<std::size_t>(a)];
      for (Index b = 0; b < m; ++b) {
        kff(a, b) = K(ia, free_set[static_cast<std::size_t>(b)]);
      }
      rhs[a] = y[ia] - q_trial[ia];  // half the negative gradient on the face
    }

    // Newton direction d_F = K_FF^{-1} (y - q)_F; fall back to a truncated
    // eigensolve when the plain factorization amplifies null-space noise.
    Vector direction;
    bool solved = false;
    Eigen::LLT<Matrix> llt(kff);
    if (llt.info() == Eigen::Success) {
      direction = llt.solve(rhs);
      solved = direction.allFinite();
    }
    if (solved && m <= 400) {
      // a direction far outside the box is dominated by jitter-floored
      // null-space noise; the truncated solve recovers the informative part
      const double huge = 10.0 * std::max(std::abs(lo), std::abs(hi));
      if (direction.cwiseAbs().maxCoeff() > huge) solved = false;
    }
    if (!solved && m <= 400) {
      Eigen::SelfAdjointEigenSolver<Matrix> eigen(kff);
      if (eigen.info() == Eigen::Success) {
        const Vector& values = eigen.eigenvalues();
        const double cutoff = std::max(values.maxCoeff() * 1e-12, 8.0 * jitter);
        Vector coefficients = eigen.eigenvectors().transpose() * rhs;
        for (Index a = 0; a < m; ++a) {
          coefficients[a] = values[a] > cutoff ? coefficients[a] / values[a] : 0.0;
        }
        direction = eigen.eigenvectors() * coefficients;
        solved = direction.allFinite();
      }
    }
    if (!solved) break;

    // projection-arc search: beta(s) = clip(beta + s * d), first s improving
    bool accepted = false;
    double step = 1.0;
    for (int half = 0; half < 40 && !accepted; ++half, step *= 0.5) {
      Vector delta = Vector::Zero(n);
      double largest = 0.0;
      for (Index a = 0; a < m; ++a) {
        const Index ia = free_set[static_cast<std::size_t>(a)];
        delta[ia] = std::clamp(beta_trial[ia] + step * direction[a], lo, hi) - beta_trial[ia];
        largest = std::max(largest, std::abs(delta[ia]));
      }
      if (largest == 0.0) break;
      const Vector q_candidate = q_trial + K * delta;
      const Vector beta_candidate = beta_trial + delta;
      const double psi_candidate = psi(beta_candidate, q_candidate);
      if (psi_candidate < psi_current) {
        beta_trial = beta_candidate;
        q_trial = q_candidate;
        psi_current = psi_candidate;
        accepted = true;
      }
    }
    if (!accepted) break;
  }
  if (!(psi_current < psi_start)) return false;
  beta = beta_trial;
  q = q_trial;
  return true;
}

// Exact coordinate ascent on the dual of the pinball problem. In coefficient
// space the dual reads: minimize beta' K beta - 2 beta' y subject to
// beta_i in [-(1-tau)/(2 lambda n), tau/(2 lambda n)]. The primal-dual gap
//   J(beta) - (2 lambda beta' y - lambda beta' K beta)
// is monitored after every sweep and must fall below tol. When sweeps stall,
// which happens on ill-conditioned Gram matrices, the projected-Newton polish
// above closes the remaining gap; rejected polish attempts back off
// exponentially so they cannot dominate the sweep time.
SolveResult fit_pinball(const Matrix& K, const Vector& y, const LossSpec& loss_spec,
                        const FitConfig& config) {
  const Index n = y.size();
  const double scale = 2.0 * config.lambda * static_cast<double>(n);
  const double lo = -(1.0 - loss_spec.tau) / scale;
  const double hi = loss_spec.tau / scale;
  const int max_sweeps = config.max_iter > 0 ? config.max_iter : kDefaultSweeps;

  Vector beta = Vector::Zero(n);
  Vector q = Vector::Zero(n);  // q = K beta, maintained incrementally
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  CounterRng rng(config.seed);

  SolverReport report;
  report.tol = config.tol;
  report.max_iter = max_sweeps;
  report.seed = config.seed;

  const auto duality_gap = [&] {
    const double quad = beta.dot(q);
    const double primal = data_term(loss_spec, y, q) + config.lambda * quad;
    const double dual = 2.0 * config.lambda * beta.dot(y) - config.lambda * quad;
    report.objective_trace.push_back(primal);
    return primal - dual;
  };

  double gap = std::numeric_limits<double>::infinity();
  double stall_reference = gap;
  int next_polish = 9;
  int polish_interval = 10;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    shuffle_indices(order, rng);
    for (const Index i : order) {
      const double target = beta[i] + (y[i] - q[i]) / K(i, i);
      const double next = std::clamp(target, lo, hi);
      const double delta = next - beta[i];
      if (delta != 0.0) {
        q.noalias() += delta * K.col(i);
        beta[i] = next;
      }
    }
    gap = duality_gap();
    report.iterations = sweep + 1;
    if (gap <= config.tol) {
      report.converged = true;
      report.residual = gap;
      return {std::move(beta), std::move(report)};
    }
    if (sweep == next_polish) {
      if (gap > 0.3 * stall_reference) {
        const bool improved = subspace_step(K, y, config.jitter, lo, hi, beta, q);
        if (improved) {
          gap = duality_gap();
          polish_interval = 10;
          if (gap <= config.tol) {
            report.converged = true;
            report.residual = gap;
            return {std::move(beta), std::move(report)};
          }
        } else {
          polish_interval = std::min(polish_interval * 2, 640);  // rejected, back off
        }
      }
      next_polish = sweep + polish_interval;
      stall_reference = gap;
    }
  }
  report.residual = gap;
  throw ConvergenceError("pinball solver: dual gap " + std::to_string(gap) +
                             " above tol after " + std::to_string(max_sweeps) + " sweeps",
                         beta, gap, report.iterations);
}

// Damped Newton-Raphson on the smooth objective. The Newton system uses
// H = (1/n) K diag(d2) K + 2 lambda K + jitter I and falls back to a plain
// gradient step when the factorization fails. Accepted steps satisfy an
// Armijo decrease condition, so the objective trace is nonincreasing.
SolveResult fit_smoothed(const Matrix& K, const Vector& y, const LossSpec& loss_spec,
                           const FitConfig& config) {
  const Index n = y.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  const int max_steps = config.max_iter > 0 ? config.max_iter : kDefaultNewtonSteps;

  Vector beta = Vector::Zero(n);
  Vector q = Vector::Zero(n);
  double obj = data_term(loss_spec, y, q);

  SolverReport report;
  report.tol = config.tol;
  report.max_iter = max_steps;
  report.seed = config.seed;

  Vector d(n), d2_sqrt(n), grad(n), step(n), kstep(n);
  Matrix H(n, n), W(n, n);
  double residual = std::numeric_limits<double>::infinity();
  double previous_residual = std::numeric_limits<double>::infinity();
  bool objective_floored = false;
  int stagnant = 0;

  const auto gradient_norm = [&] {
    for (Index i = 0; i < n; ++i) d[i] = loss_d1(loss_spec, y[i], q[i]);
    grad.noalias() = K * (inv_n * d + 2.0 * config.lambda * beta);
    return grad.lpNorm<Eigen::Infinity>();
  };

  for (int iter = 0; iter < max_steps; ++iter) {
    residual = gradient_norm();
    report.iterations = iter;
    report.objective_trace.push_back(obj);
    if (residual <= config.tol) {
      report.converged = true;
      report.residual = residual;
      return {std::move(beta), std::move(report)};
    }
    // floating-point floor: objective cannot decrease and the gradient has
    // stopped shrinking as well
    stagnant = objective_floored && residual >= 0.9 * previous_residual ? stagnant + 1 : 0;
    if (stagnant >= 3) break;
    previous_residual = residual;

    for (Index i = 0; i < n; ++i) d2_sqrt[i] = std::sqrt(loss_d2(loss_spec, y[i], q[i]));
    W.noalias() = K * d2_sqrt.asDiagonal();
    H = (2.0 * config.lambda) * K;
    H.diagonal().array() += config.jitter;
    H.selfadjointView<Eigen::Lower>().rankUpdate(W, inv_n);

    Eigen::LLT<Eigen::Ref<Matrix>, Eigen::Lower> llt(H);
    if (llt.info() == Eigen::Success) {
      step = llt.solve(-grad);
    } else {
      step = -grad;
    }
    double slope = grad.dot(step);
    if (!(slope < 0.0)) {  // not a descent direction; retreat to gradient
      step = -grad;
      slope = -grad.squaredNorm();
    }

    kstep.noalias() = K * step;
    double s = 1.0;
    bool accepted = false;
    for (int half = 0; half < 60; ++half) {
      const Vector q_trial = q + s * kstep;
      const Vector beta_trial = beta + s * step;
      const double obj_trial = data_term(loss_spec, y, q_trial) +
                               config.lambda * beta_trial.dot(q_trial);
      if (obj_trial <= obj + kArmijo * s * slope) {
        objective_floored = obj - obj_trial <= 1e-15 * (1.0 + std::abs(obj));
        beta = beta_trial;
        q = q_trial;
        obj = obj_trial;
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) break;  // no representable decrease left along the step
  }
  residual = gradient_norm();
  throw ConvergenceError("smoothed solver: gradient norm " + std::to_string(residual) +
                             " above tol after " + std::to_string(report.iterations) +
                             " steps",
                         beta, residual, report.iterations);
}

}  // namespace

void validate(const FitConfig& config) {
  if (!(config.lambda > 0.0 && std::isfinite(config.lambda))) {
    throw InputError("fit: lambda must be positive");
  }
  if (!(config.tol > 0.0)) throw InputError("fit: tol must be positive");
  if (!(config.jitter >= 0.0)) throw InputError("fit: jitter must be nonnegative");
  if (config.max_iter < 0) throw InputError("fit: max_iter must be nonnegative");
}

QuantileModel fit(const Dataset& data, const KernelSpec& kernel,
                  const LossSpec& loss_spec, const FitConfig& config) {
  validate(kernel);
  validate(loss_spec);
  validate(config);
  if (data.n() < 1) throw InputError("fit: dataset must contain at least one point");
  if (data.y.size() != data.n()) throw InputError("fit: x/y row counts disagree");

  const GramMatrix G = gram(kernel, data.x, config.jitter);
  if (!G.entries.allFinite()) throw NumericError("fit: Gram matrix has non-finite entries");

  SolveResult result = loss_spec.family == LossFamily::pinball
                             ? fit_pinball(G.entries, data.y, loss_spec, config)
                             : fit_smoothed(G.entries, data.y, loss_spec, config);

  QuantileModel model;
  model.kernel = kernel;
  model.loss = loss_spec;
  model.lambda = config.lambda;
  model.jitter = config.jitter;
  model.train_inputs = data.x;
  model.coefficients = std::move(result.beta);
  model.report = std::move(result.report);
  const Vector fitted = G.entries * model.coefficients;
  model.objective_value = data_term(loss_spec, data.y, fitted) +
                          config.lambda * model.coefficients.dot(fitted);
  return model;
}

double predict(const QuantileModel& model, ConstVectorRef x) {
  if (x.size() != model.train_inputs.cols()) {
    throw InputError("predict: point dimension " + std::to_string(x.size()) +
                     " does not match training dimension " +
                     std::to_string(model.train_inputs.cols()));
  }
  switch (model.kernel.family) {
    case KernelFamily::gaussian_rbf: {
      const Vector d2 = (model.train_inputs.rowwise() - x.transpose()).rowwise().squaredNorm();
      return ((-model.kernel.gamma * d2.array()).exp() * model.coefficients.array()).sum();
    }
    case KernelFamily::linear:
      return model.coefficients.dot(model.train_inputs * x);
    case KernelFamily::polynomial: {
      const Vector s = model.train_inputs * x;
      return ((s.array() + model.kernel.coef0).pow(model.kernel.degree) *
              model.coefficients.array())
          .sum();
    }
  }
  throw InputError("predict: unknown kernel family");
}

Vector predict_rows(const QuantileModel& model, ConstMatrixRef xs) {
  Vector out(xs.rows());
  for (Index i = 0; i < xs.rows(); ++i) out[i] = predict(model, xs.row(i));
  return out;
}

double objective(const Dataset& data, const KernelSpec& kernel,
                 const LossSpec& loss_spec, const FitConfig& config,
                 ConstVectorRef beta) {
  validate(kernel);
  validate(loss_spec);
  validate(config);
  if (beta.size() != data.n()) throw InputError("objective: beta length must equal n");
  const GramMatrix G = gram(kernel, data.x, config.jitter);
  const Vector fitted = G.entries * beta;
  return data_term(loss_spec, data.y, fitted) + config.lambda * beta.dot(fitted);
}

}  // namespace scalefit
