#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "pursuit/decomposition.hpp"
#include "pursuit/errors.hpp"
#include "pursuit/types.hpp"

namespace pursuit {

struct ForwardConfig {
  std::size_t max_atoms = 1;
  double residual_tol = 0.0;
  double dependence_eps = kDefaultDependenceEps;
  bool recompute_scores = false;  // score candidates from scratch each step (testing mode)
};

enum class StopReason { residual_tol, max_atoms, exhausted };

inline const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::residual_tol: return "residual_tol";
    case StopReason::max_atoms: return "max_atoms";
    case StopReason::exhausted: return "exhausted";
  }
  return "unknown";
}

struct Selection {
  Eigen::Index index = -1;
  double score = 0.0;  // |<alpha_i, r>|^2 / ||gamma_i||^2, the next residual-norm-sq drop
};

/// Invoked with the updated state after every completed forward or backward step.
using StepObserver = std::function<void(const Decomposition&)>;

struct ForwardResult {
  Decomposition decomposition;
  std::vector<double> residual_history;  // residual norm after each selection
  StopReason stop = StopReason::max_atoms;
};

/// From-scratch selection scan: over unselected atoms whose orthogonal
/// component gamma_i = alpha_i - P alpha_i clears the dependence threshold,
/// picks the maximizer of |<alpha_i, residual>|^2 / ||gamma_i||^2 (the choice
/// that minimizes the next residual norm). Ties go to the lowest index.
inline Selection select_forward_atom(const Dictionary& dict, const Decomposition& state,
                                     const Eigen::VectorXd& residual,
                                     double dependence_eps = kDefaultDependenceEps) {
  if (residual.size() != dict.atom_size()) {
    throw DimensionMismatch("residual length does not match dictionary");
  }
  std::vector<bool> taken(dict.size(), false);
  for (Eigen::Index idx : state.selected) taken[static_cast<std::size_t>(idx)] = true;

  Selection best;
  for (std::size_t i = 0; i < dict.size(); ++i) {
    if (taken[i]) continue;
    const Eigen::VectorXd& alpha = dict.atoms[i].values;
    double projected_sq = 0.0;
    for (std::size_t j = 0; j < state.ortho_basis.size(); ++j) {
      const double t = state.ortho_basis[j].dot(alpha);
      projected_sq += t * t / state.ortho_norms_sq[j];
    }
    const double alpha_sq = alpha.squaredNorm();
    const double gamma_sq = alpha_sq - projected_sq;
    if (gamma_sq < dependence_eps * alpha_sq) continue;
    const double corr = alpha.dot(residual);
    const double score = corr * corr / gamma_sq;
    if (best.index < 0 || score > best.score) {
      best = Selection{static_cast<Eigen::Index>(i), score};
    }
  }
  if (best.index < 0) throw Exhausted("no admissible atom remains");
  return best;
}

namespace detail {

// Incremental candidate scan: per atom i it tracks
//   corr[i] = <alpha_i, r_k>   and   proj_sq[i] = ||P_{V_k} alpha_i||^2,
// refreshed with one pass over the dictionary per accepted atom, so a full
// OOMP run costs one dictionary sweep per iteration.
class CandidateScan {
 public:
  CandidateScan(const Dictionary& dict, const Eigen::VectorXd& f, double dependence_eps)
      : eps_(dependence_eps),
        matrix_(dict.atom_size(), static_cast<Eigen::Index>(dict.size())),
        excluded_(dict.size(), false) {
    for (std::size_t i = 0; i < dict.size(); ++i) {
      matrix_.col(static_cast<Eigen::Index>(i)) = dict.atoms[i].values;
    }
    norms_sq_ = matrix_.colwise().squaredNorm();
    corr_ = matrix_.transpose() * f;
    proj_sq_ = Eigen::VectorXd::Zero(matrix_.cols());
  }

  Selection best() const {
    Selection out;
    for (Eigen::Index i = 0; i < matrix_.cols(); ++i) {
      if (excluded_[static_cast<std::size_t>(i)]) continue;
      const double gamma_sq = norms_sq_[i] - proj_sq_[i];
      if (gamma_sq < eps_ * norms_sq_[i]) continue;
      const double score = corr_[i] * corr_[i] / gamma_sq;
      if (out.index < 0 || score > out.score) out = Selection{i, score};
    }
    if (out.index < 0) throw Exhausted("no admissible atom remains");
    return out;
  }

  // Accounts for the newly accepted basis vector psi (unnormalized, with its
  // squared norm) given the signal f.
  void accept(const Eigen::VectorXd& psi, double psi_norm_sq, const Eigen::VectorXd& f) {
    const Eigen::VectorXd unit = psi / std::sqrt(psi_norm_sq);
    const Eigen::VectorXd overlaps = matrix_.transpose() * unit;
    corr_ -= unit.dot(f) * overlaps;
    proj_sq_ += overlaps.cwiseProduct(overlaps);
  }

  void exclude(Eigen::Index i) { excluded_[static_cast<std::size_t>(i)] = true; }

 private:
  double eps_;
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd norms_sq_;
  Eigen::VectorXd corr_;
  Eigen::VectorXd proj_sq_;
  std::vector<bool> excluded_;
};

}  // namespace detail

/// Forward OOMP: greedy selection minimizing the residual norm at each step,
/// with recursive dual updates, until residual_tol, max_atoms or exhaustion.
/// residual_tol wins when both limits fire on the same iteration.
inline ForwardResult oomp_run(const Signal& f, const Dictionary& dict, const ForwardConfig& cfg,
                              const StepObserver& observer = {}) {
  validate(f);
  validate(dict);
  if (cfg.max_atoms < 1) throw InvalidArgument("max_atoms must be at least 1");
  if (cfg.residual_tol < 0.0) throw InvalidArgument("residual_tol must be non-negative");
  if (f.samples.size() != dict.atom_size()) {
    throw DimensionMismatch("signal length does not match dictionary atoms");
  }

  ForwardResult result;
  Decomposition& state = result.decomposition;
  state.residual = f.samples;
  state.residual_norm = state.residual.norm();
  if (state.residual_norm <= cfg.residual_tol) {
    result.stop = StopReason::residual_tol;
    return result;
  }

  detail::CandidateScan scan(dict, f.samples, cfg.dependence_eps);
  result.stop = StopReason::exhausted;
  while (true) {
    Selection pick;
    try {
      pick = cfg.recompute_scores ? select_forward_atom(dict, state, state.residual, cfg.dependence_eps)
                                  : scan.best();
    } catch (const Exhausted&) {
      if (state.empty()) throw;
      result.stop = StopReason::exhausted;
      break;
    }

    const Eigen::VectorXd& atom = dict.atoms[static_cast<std::size_t>(pick.index)].values;
    OrthogonalComponent component;
    try {
      component = orthogonalize_next(state, atom, cfg.dependence_eps);
    } catch (const DependentAtom&) {
      // The incremental estimate admitted the atom but the exact
      // orthogonalization disagrees; skip it and rescan.
      scan.exclude(pick.index);
      continue;
    }
    scan.accept(component.psi, component.norm_sq, f.samples);
    scan.exclude(pick.index);
    forward_update_duals(state, pick.index, atom, std::move(component));
    compute_coefficients(state, f);
    update_residual(state, dict, f);
    result.residual_history.push_back(state.residual_norm);
    if (observer) observer(state);

    if (state.residual_norm <= cfg.residual_tol) {
      result.stop = StopReason::residual_tol;
      break;
    }
    if (state.size() >= cfg.max_atoms) {
      result.stop = StopReason::max_atoms;
      break;
    }
  }
  return result;
}

}  // namespace pursuit
