#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstddef>

#include "pursuit/decomposition.hpp"
#include "pursuit/types.hpp"

// Invariant measurements used by the test suites and the CLI --verify mode.
namespace pursuit::diagnostics {

/// max_{m,n} |<alpha_m, beta_n> - delta_{m,n}| over the selected atoms.
inline double max_biorthogonality_error(const Decomposition& state) {
  double worst = 0.0;
  for (std::size_t m = 0; m < state.size(); ++m) {
    for (std::size_t n = 0; n < state.size(); ++n) {
      const double expected = m == n ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(state.atoms[m].dot(state.duals[n]) - expected));
    }
  }
  return worst;
}

/// max_n |<alpha_n, residual>| over the selected atoms.
inline double max_residual_correlation(const Decomposition& state) {
  double worst = 0.0;
  for (const Eigen::VectorXd& atom : state.atoms) {
    worst = std::max(worst, std::abs(atom.dot(state.residual)));
  }
  return worst;
}

/// max_j || sum_n alpha_n <beta_n, beta_j> - beta_j ||  (P_{V} beta_j = beta_j).
inline double max_duality_consistency_error(const Decomposition& state) {
  double worst = 0.0;
  for (std::size_t j = 0; j < state.size(); ++j) {
    Eigen::VectorXd projected = Eigen::VectorXd::Zero(state.dimension());
    for (std::size_t n = 0; n < state.size(); ++n) {
      projected += state.atoms[n] * state.duals[n].dot(state.duals[j]);
    }
    worst = std::max(worst, (projected - state.duals[j]).norm());
  }
  return worst;
}

}  // namespace pursuit::diagnostics
