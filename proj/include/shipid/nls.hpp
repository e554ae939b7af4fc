#pragma once

// Bound- and inequality-constrained nonlinear least squares.
//
// Minimizes  1/2 ||r(theta)||^2 + lambda ||theta||^2 + penalty(h)
// with a Levenberg-Marquardt iteration. Inequalities enter through an
// exterior quadratic penalty whose weight is escalated between rounds;
// bounds are enforced by projecting every trial point.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "shipid/error.hpp"

namespace shipid {

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

enum class ConstraintSense { kPositive, kNegative };

struct InequalityConstraint {
  std::string name;
  std::function<double(const Eigen::VectorXd&)> fn;
  ConstraintSense sense = ConstraintSense::kPositive;

  /// Signed so that a positive value means satisfied.
  double margin(const Eigen::VectorXd& theta) const {
    const double h = fn(theta);
    return sense == ConstraintSense::kPositive ? h : -h;
  }
};

struct NlsProblem {
  ResidualFn residual;
  JacobianFn jacobian;     // optional; finite differences when empty
  Eigen::VectorXd lower;   // empty: unbounded
  Eigen::VectorXd upper;   // empty: unbounded
  std::vector<InequalityConstraint> inequalities;
  double ridge = 0.0;      // lambda
};

struct SolveOptions {
  int max_iterations = 100;  // per penalty round
  double gradient_tolerance = 1e-10;
  double step_tolerance = 1e-10;
  double initial_damping = 1e-3;
  double penalty_initial = 100.0;
  double penalty_growth = 10.0;
  int penalty_rounds = 4;
  double fd_step = 1e-6;
  double constraint_tolerance = 1e-9;
  int max_rejections = 40;
  unsigned threads = 1;
};

enum class SolveStatus {
  kGradientTolerance,
  kStepTolerance,
  kIterationLimit,
  kStalled,
  kNumericalFailure,
};

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kGradientTolerance: return "gradient_tolerance";
    case SolveStatus::kStepTolerance: return "step_tolerance";
    case SolveStatus::kIterationLimit: return "iteration_limit";
    case SolveStatus::kStalled: return "stalled";
    case SolveStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

struct TraceEntry {
  int iteration = 0;
  int round = 0;
  double cost = 0.0;  // penalized cost after the accepted step
  double damping = 0.0;
};

struct SolveReport {
  Eigen::VectorXd theta;
  double cost = 0.0;       // penalized objective at theta
  double data_cost = 0.0;  // 1/2 ||r||^2
  int iterations = 0;      // LM trial steps over all rounds
  int rounds = 0;
  SolveStatus status = SolveStatus::kStalled;
  std::vector<double> constraint_margins;
  double max_violation = 0.0;
  std::vector<TraceEntry> trace;
  std::vector<std::string> warnings;

  bool converged() const {
    return status == SolveStatus::kGradientTolerance || status == SolveStatus::kStepTolerance;
  }
};

/// Central-difference Jacobian, step max(step, step * |theta_i|) per column.
/// Columns may be evaluated on several threads; each column is written by
/// exactly one thread so the result does not depend on the thread count.
inline Eigen::MatrixXd jacobian_fd(const ResidualFn& residual, const Eigen::VectorXd& theta,
                                   double step, unsigned threads = 1) {
  const Eigen::Index n = theta.size();
  const Eigen::VectorXd r0 = residual(theta);
  Eigen::MatrixXd jac(r0.size(), n);

  auto column = [&](Eigen::Index i) {
    const double h = std::max(step, step * std::abs(theta[i]));
    Eigen::VectorXd plus = theta, minus = theta;
    plus[i] += h;
    minus[i] -= h;
    const Eigen::VectorXd rp = residual(plus);
    const Eigen::VectorXd rm = residual(minus);
    if (rp.size() != r0.size() || rm.size() != r0.size() || !rp.allFinite() ||
        !rm.allFinite()) {
      throw Error(ErrorKind::kSolver, "non-finite residual while perturbing parameter " +
                                          std::to_string(i));
    }
    jac.col(i) = (rp - rm) / (2.0 * h);
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (workers == 1) {
    for (Eigen::Index i = 0; i < n; ++i) column(i);
    return jac;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (Eigen::Index i = w; i < n; i += workers) column(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return jac;
}

namespace detail {

class PenalizedObjective {
 public:
  PenalizedObjective(const NlsProblem& problem, const SolveOptions& options)
      : problem_(problem), options_(options) {}

  void set_penalty(double mu) { penalty_ = mu; }

  /// Residual stack [r; sqrt(2 lambda) theta; sqrt(mu) min(0, margin_i)].
  Eigen::VectorXd stacked(const Eigen::VectorXd& theta, const Eigen::VectorXd& data) const {
    const Eigen::Index m = data.size();
    const Eigen::Index n = theta.size();
    const auto q = static_cast<Eigen::Index>(problem_.inequalities.size());
    Eigen::VectorXd out(m + (ridge_rows() ? n : 0) + q);
    out.head(m) = data;
    Eigen::Index row = m;
    if (ridge_rows()) {
      out.segment(row, n) = std::sqrt(2.0 * problem_.ridge) * theta;
      row += n;
    }
    for (Eigen::Index i = 0; i < q; ++i) {
      const double margin = problem_.inequalities[static_cast<std::size_t>(i)].margin(theta);
      out[row + i] = std::sqrt(penalty_) * std::min(0.0, margin);
    }
    return out;
  }

  Eigen::MatrixXd stacked_jacobian(const Eigen::VectorXd& theta,
                                   const Eigen::MatrixXd& data_jac) const {
    const Eigen::Index m = data_jac.rows();
    const Eigen::Index n = theta.size();
    const auto q = static_cast<Eigen::Index>(problem_.inequalities.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m + (ridge_rows() ? n : 0) + q, n);
    out.topRows(m) = data_jac;
    Eigen::Index row = m;
    if (ridge_rows()) {
      out.block(row, 0, n, n) = std::sqrt(2.0 * problem_.ridge) * Eigen::MatrixXd::Identity(n, n);
      row += n;
    }
    for (Eigen::Index i = 0; i < q; ++i) {
      const auto& c = problem_.inequalities[static_cast<std::size_t>(i)];
      if (c.margin(theta) >= 0.0) continue;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double h = std::max(options_.fd_step, options_.fd_step * std::abs(theta[j]));
        Eigen::VectorXd plus = theta, minus = theta;
        plus[j] += h;
        minus[j] -= h;
        out(row + i, j) = std::sqrt(penalty_) * (c.margin(plus) - c.margin(minus)) / (2.0 * h);
      }
    }
    return out;
  }

 private:
  bool ridge_rows() const { return problem_.ridge > 0.0; }

  const NlsProblem& problem_;
  const SolveOptions& options_;
  double penalty_ = 0.0;
};

inline Eigen::VectorXd project(const NlsProblem& p, Eigen::VectorXd theta) {
  if (p.lower.size() == theta.size()) theta = theta.cwiseMax(p.lower);
  if (p.upper.size() == theta.size()) theta = theta.cwiseMin(p.upper);
  return theta;
}

}  // namespace detail

inline SolveReport solve(const NlsProblem& problem, const Eigen::VectorXd& theta0,
                         const SolveOptions& options = {}) {
  if (!problem.residual) throw Error(ErrorKind::kValidation, "solve: residual function missing");
  if (problem.ridge < 0.0) throw Error(ErrorKind::kValidation, "solve: ridge weight must be >= 0");
  const Eigen::Index n = theta0.size();
  if ((problem.lower.size() != 0 && problem.lower.size() != n) ||
      (problem.upper.size() != 0 && problem.upper.size() != n)) {
    throw Error(ErrorKind::kValidation, "solve: bound vectors do not match parameter count");
  }
  if (problem.lower.size() == n && problem.upper.size() == n &&
      (problem.lower.array() > problem.upper.array()).any()) {
    throw Error(ErrorKind::kValidation, "solve: lower bound exceeds upper bound");
  }

  SolveReport report;
  Eigen::VectorXd theta = detail::project(problem, theta0);
  if (theta != theta0) report.warnings.emplace_back("initial point clipped to bounds");

  Eigen::VectorXd data = problem.residual(theta);
  if (!data.allFinite()) {
    throw Error(ErrorKind::kSolver, "residual is not finite at the initial point");
  }
  if (data.size() < n) {
    report.warnings.emplace_back("fewer residuals than parameters (" +
                                 std::to_string(data.size()) + " < " + std::to_string(n) + ")");
  }

  auto data_jacobian = [&](const Eigen::VectorXd& th) {
    return problem.jacobian ? problem.jacobian(th)
                            : jacobian_fd(problem.residual, th, options.fd_step, options.threads);
  };

  detail::PenalizedObjective objective(problem, options);
  const int rounds = problem.inequalities.empty() ? 1 : std::max(1, options.penalty_rounds);
  double penalty = options.penalty_initial;
  double active_penalty = penalty;

  for (int round = 0; round < rounds; ++round) {
    report.rounds = round + 1;
    active_penalty = penalty;
    objective.set_penalty(penalty);
    Eigen::VectorXd stacked = objective.stacked(theta, data);
    double cost = 0.5 * stacked.squaredNorm();
    report.trace.push_back({report.iterations, round, cost, options.initial_damping});

    double damping = options.initial_damping;
    int rejections = 0;
    int round_iterations = 0;
    bool need_jacobian = true;
    Eigen::MatrixXd jac;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd normal;
    report.status = SolveStatus::kIterationLimit;

    while (round_iterations < options.max_iterations) {
      if (need_jacobian) {
        try {
          jac = objective.stacked_jacobian(theta, data_jacobian(theta));
        } catch (const Error& e) {
          report.status = SolveStatus::kNumericalFailure;
          report.warnings.emplace_back(e.what());
          break;
        }
        gradient = jac.transpose() * stacked;
        normal = jac.transpose() * jac;
        need_jacobian = false;
        // Scale-free test: cosine between the residual and each Jacobian
        // column, so tiny residuals do not end the solve early.
        const double rnorm = stacked.norm();
        double worst_cosine = 0.0;
        for (Eigen::Index j = 0; j < jac.cols(); ++j) {
          const double cnorm = jac.col(j).norm();
          if (cnorm > 0.0 && rnorm > 0.0) {
            worst_cosine = std::max(worst_cosine, std::abs(gradient[j]) / (cnorm * rnorm));
          }
        }
        if (worst_cosine <= options.gradient_tolerance) {
          report.status = SolveStatus::kGradientTolerance;
          break;
        }
      }

      const double max_diag = std::max(1.0, normal.diagonal().maxCoeff());
      Eigen::VectorXd scaling = normal.diagonal().cwiseMax(1e-12 * max_diag);
      Eigen::MatrixXd lhs = normal;
      lhs.diagonal() += damping * scaling;
      const Eigen::VectorXd delta = lhs.ldlt().solve(-gradient);
      ++round_iterations;
      ++report.iterations;

      const Eigen::VectorXd trial = detail::project(problem, theta + delta);
      const double step_norm = (trial - theta).norm();
      const bool tiny_step =
          step_norm <= options.step_tolerance * (theta.norm() + options.step_tolerance);

      Eigen::VectorXd trial_data = problem.residual(trial);
      double trial_cost = std::numeric_limits<double>::infinity();
      Eigen::VectorXd trial_stacked;
      if (trial_data.allFinite() && trial_data.size() == data.size()) {
        trial_stacked = objective.stacked(trial, trial_data);
        trial_cost = 0.5 * trial_stacked.squaredNorm();
      }

      if (std::isfinite(trial_cost) && trial_cost < cost) {
        theta = trial;
        data = std::move(trial_data);
        stacked = std::move(trial_stacked);
        cost = trial_cost;
        damping = std::max(damping / 3.0, 1e-15);
        rejections = 0;
        need_jacobian = true;
        report.trace.push_back({report.iterations, round, cost, damping});
        if (tiny_step) {
          report.status = SolveStatus::kStepTolerance;
          break;
        }
      } else {
        // A heavily damped step can be tiny without the point being optimal,
        // so the step test only ends the solve on accepted steps.
        damping *= 2.0;
        if (++rejections >= options.max_rejections) {
          report.status = SolveStatus::kStalled;
          break;
        }
      }
    }

    report.max_violation = 0.0;
    for (const auto& c : problem.inequalities) {
      report.max_violation = std::max(report.max_violation, -c.margin(theta));
    }
    if (report.status == SolveStatus::kNumericalFailure) break;
    if (report.max_violation <= options.constraint_tolerance) break;
    penalty *= options.penalty_growth;
  }

  objective.set_penalty(active_penalty);
  report.theta = theta;
  report.data_cost = 0.5 * data.squaredNorm();
  report.cost = 0.5 * objective.stacked(theta, data).squaredNorm();
  report.constraint_margins.clear();
  for (const auto& c : problem.inequalities) report.constraint_margins.push_back(c.margin(theta));
  return report;
}

}  // namespace shipid
