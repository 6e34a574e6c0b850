#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "pursuit/decomposition.hpp"
#include "pursuit/errors.hpp"
#include "pursuit/forward.hpp"
#include "pursuit/types.hpp"

namespace pursuit {

/// Which quantity the backward loop minimizes when choosing the coefficient to
/// drop. theorem1 is the residual-increase criterion |c_j|^2 / ||beta_j||^2;
/// naive_abs_coeff is the smallest-|c_j| baseline.
enum class DeletionCriterion { theorem1, naive_abs_coeff };

struct BackwardConfig {
  std::optional<std::size_t> target_count;
  std::optional<double> error_budget;  // stop before residual_norm would exceed this
  DeletionCriterion criterion = DeletionCriterion::theorem1;
};

struct DeletionStep {
  std::size_t selected_position = 0;   // position within the then-current selected list
  Eigen::Index dictionary_index = -1;  // dictionary atom that was dropped
  double criterion_value = 0.0;        // |c_j|^2 / ||beta_j||^2 = squared residual increase
  double residual_norm_after = 0.0;
};

using DeletionTrace = std::vector<DeletionStep>;

struct DeletionChoice {
  std::size_t position = 0;
  double value = 0.0;  // value of the active criterion at the chosen position
};

/// argmin over selected positions of the active criterion, lowest position on ties.
inline DeletionChoice select_deletion_index(const Decomposition& state,
                                            DeletionCriterion criterion = DeletionCriterion::theorem1) {
  if (state.empty()) throw EmptyDecomposition("cannot select a deletion from an empty decomposition");
  DeletionChoice best;
  bool have = false;
  for (std::size_t j = 0; j < state.size(); ++j) {
    const double c = state.coefficients[static_cast<Eigen::Index>(j)];
    const double value = criterion == DeletionCriterion::theorem1
                             ? c * c / state.duals[j].squaredNorm()
                             : std::abs(c);
    if (!have || value < best.value) {
      best = DeletionChoice{j, value};
      have = true;
    }
  }
  return best;
}

struct DeletionResidual {
  Eigen::VectorXd vec;    // R_j = c_j beta_j / ||beta_j||^2, the approximation loss
  double norm_sq = 0.0;   // ||R_j||^2 = |c_j|^2 / ||beta_j||^2
};

/// The residual increase incurred by dropping selected position j, computed
/// without mutating the state.
inline DeletionResidual deletion_residual(const Decomposition& state, std::size_t j) {
  if (j >= state.size()) throw IndexOutOfRange("selected position out of range");
  const double c = state.coefficients[static_cast<Eigen::Index>(j)];
  const double beta_norm_sq = state.duals[j].squaredNorm();
  DeletionResidual out;
  out.vec = (c / beta_norm_sq) * state.duals[j];
  out.norm_sq = c * c / beta_norm_sq;
  return out;
}

/// The optimally downdated coefficients after deleting position j:
///   c_n <- c_n - <beta_n, beta_j> / ||beta_j||^2 * c_j,  entry j removed.
/// Must be evaluated with the pre-deletion duals; pure, does not mutate state.
inline Eigen::VectorXd downdate_coefficients(const Decomposition& state, std::size_t j) {
  const std::size_t n = state.size();
  if (j >= n) throw IndexOutOfRange("selected position out of range");
  const Eigen::VectorXd& beta_j = state.duals[j];
  const double beta_j_norm_sq = beta_j.squaredNorm();
  const double c_j = state.coefficients[static_cast<Eigen::Index>(j)];
  Eigen::VectorXd out(static_cast<Eigen::Index>(n - 1));
  Eigen::Index w = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == j) continue;
    const double correction = (state.duals[k].dot(beta_j) / beta_j_norm_sq) * c_j;
    out[w++] = state.coefficients[static_cast<Eigen::Index>(k)] - correction;
  }
  return out;
}

struct BackwardResult {
  Decomposition decomposition;
  DeletionTrace trace;
};

/// Backward OOMP: repeatedly drops the coefficient with the smallest criterion
/// value, downdating coefficients (pre-deletion duals) and then the duals
/// themselves, until target_count is reached or the next deletion would push
/// the residual norm past error_budget. The budget test is predictive
/// (sqrt(||r||^2 + ||R_j||^2)), so a run never overshoots.
inline BackwardResult boomp_run(Decomposition state, const Signal& f, const BackwardConfig& cfg,
                                const StepObserver& observer = {}) {
  validate(f);
  if (!cfg.target_count && !cfg.error_budget) {
    throw InvalidArgument("backward config needs target_count or error_budget");
  }
  if (cfg.target_count && *cfg.target_count > state.size()) {
    throw Infeasible("target_count exceeds the decomposition size");
  }
  if (!state.empty() && f.samples.size() != state.dimension()) {
    throw DimensionMismatch("signal length does not match decomposition");
  }
  if (state.residual.size() != f.samples.size()) {
    // Derive the residual from the stored coefficients when the caller did not.
    Eigen::VectorXd approx = Eigen::VectorXd::Zero(f.samples.size());
    for (std::size_t k = 0; k < state.size(); ++k) {
      approx += state.coefficients[static_cast<Eigen::Index>(k)] * state.atoms[k];
    }
    state.residual = f.samples - approx;
    state.residual_norm = state.residual.norm();
  }

  BackwardResult result;
  const std::size_t target = cfg.target_count.value_or(0);
  while (state.size() > target && !state.empty()) {
    const DeletionChoice choice = select_deletion_index(state, cfg.criterion);
    DeletionResidual loss = deletion_residual(state, choice.position);

    if (cfg.error_budget) {
      const double predicted =
          std::sqrt(state.residual_norm * state.residual_norm + loss.norm_sq);
      if (predicted > *cfg.error_budget) {
        if (cfg.target_count) {
          throw Infeasible("target_count unreachable within error_budget");
        }
        break;
      }
    }

    const Eigen::Index dict_index = state.selected[choice.position];
    Eigen::VectorXd downdated = downdate_coefficients(state, choice.position);
    backward_downdate_duals(state, choice.position);
    state.coefficients = std::move(downdated);
    state.residual += loss.vec;
    state.residual_norm = state.residual.norm();

    result.trace.push_back(DeletionStep{choice.position, dict_index, loss.norm_sq, state.residual_norm});
    if (observer) observer(state);
  }

  result.decomposition = std::move(state);
  return result;
}

}  // namespace pursuit
