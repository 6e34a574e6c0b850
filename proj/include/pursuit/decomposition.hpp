#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "pursuit/errors.hpp"
#include "pursuit/types.hpp"

namespace pursuit {

/// Candidates whose orthogonal component falls below eps * ||atom||^2 count as
/// dependent on the current span.
inline constexpr double kDefaultDependenceEps = 1e-10;

/// Live pursuit state for a growing/shrinking atomic decomposition.
///
/// Invariants (between operations): selected, atoms, duals and coefficients all
/// have N entries; ortho_basis spans the same subspace as the selected atoms;
/// <atom_m, dual_n> = delta_{m,n}; residual is orthogonal to every selected atom.
struct Decomposition {
  std::vector<Eigen::Index> selected;        // dictionary indices, selection order
  std::vector<Eigen::VectorXd> atoms;        // copies of the selected atoms' values
  std::vector<Eigen::VectorXd> duals;        // biorthogonal duals beta_n
  std::vector<Eigen::VectorXd> ortho_basis;  // Gram-Schmidt vectors psi_j
  std::vector<double> ortho_norms_sq;        // cached ||psi_j||^2
  Eigen::VectorXd coefficients;
  Eigen::VectorXd residual;
  double residual_norm = 0.0;

  std::size_t size() const { return selected.size(); }
  bool empty() const { return selected.empty(); }
  Eigen::Index dimension() const { return atoms.empty() ? 0 : atoms.front().size(); }
};

struct OrthogonalComponent {
  Eigen::VectorXd psi;
  double norm_sq = 0.0;
};

namespace detail {

// One subtraction pass of atom against the stored basis, run twice. The second
// pass removes the projection error the first one leaves behind; without it
// biorthogonality degrades past 1e-6 by N = 60 on redundant dictionaries.
inline Eigen::VectorXd orthogonalize_twice(const Decomposition& state, const Eigen::VectorXd& atom) {
  Eigen::VectorXd psi = atom;
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < state.ortho_basis.size(); ++j) {
      psi -= (state.ortho_basis[j].dot(psi) / state.ortho_norms_sq[j]) * state.ortho_basis[j];
    }
  }
  return psi;
}

}  // namespace detail

/// Orthogonalizes `atom` against the decomposition's basis (iterated
/// Gram-Schmidt, two passes). Throws DependentAtom when the remainder is
/// numerically zero relative to ||atom||^2.
inline OrthogonalComponent orthogonalize_next(const Decomposition& state, const Eigen::VectorXd& atom,
                                              double dependence_eps = kDefaultDependenceEps) {
  if (!state.empty() && atom.size() != state.dimension()) {
    throw DimensionMismatch("atom length does not match decomposition");
  }
  Eigen::VectorXd psi = detail::orthogonalize_twice(state, atom);
  const double norm_sq = psi.squaredNorm();
  if (norm_sq < dependence_eps * atom.squaredNorm()) {
    throw DependentAtom("atom is numerically inside the current span");
  }
  return OrthogonalComponent{std::move(psi), norm_sq};
}

/// Appends an atom: the new dual is psi/||psi||^2 and every existing dual picks
/// up the recursive correction  beta_n <- beta_n - beta_new <atom, beta_n>.
/// `component` must come from orthogonalize_next against the same state.
inline void forward_update_duals(Decomposition& state, Eigen::Index index, const Eigen::VectorXd& atom,
                                 OrthogonalComponent component) {
  Eigen::VectorXd beta_new = component.psi / component.norm_sq;
  for (Eigen::VectorXd& dual : state.duals) {
    dual -= beta_new * atom.dot(dual);
  }
  state.selected.push_back(index);
  state.atoms.push_back(atom);
  state.duals.push_back(std::move(beta_new));
  state.ortho_basis.push_back(std::move(component.psi));
  state.ortho_norms_sq.push_back(component.norm_sq);
  state.coefficients.conservativeResize(state.coefficients.size() + 1);
  state.coefficients[state.coefficients.size() - 1] = 0.0;
}

/// Convenience wrapper: orthogonalize dictionary atom `index` and extend the
/// decomposition with it.
inline void append_atom(Decomposition& state, const Dictionary& dict, Eigen::Index index,
                        double dependence_eps = kDefaultDependenceEps) {
  if (index < 0 || static_cast<std::size_t>(index) >= dict.size()) {
    throw IndexOutOfRange("dictionary index out of range");
  }
  const Eigen::VectorXd& atom = dict.atoms[static_cast<std::size_t>(index)].values;
  forward_update_duals(state, index, atom, orthogonalize_next(state, atom, dependence_eps));
}

/// Removes selected position j. Remaining duals are downdated with
/// beta_n <- beta_n - beta_j <beta_j, beta_n> / ||beta_j||^2, after which they
/// are biorthogonal to the reduced atom set. The orthogonal basis is rebuilt by
/// re-orthogonalizing the retained atoms in their original selection order.
/// Coefficient values are not recomputed here (entry j is dropped so the state
/// stays shape-consistent); see downdate_coefficients for the optimal update.
inline void backward_downdate_duals(Decomposition& state, std::size_t j) {
  const std::size_t n = state.size();
  if (j >= n) throw IndexOutOfRange("selected position out of range");

  const Eigen::VectorXd beta_j = std::move(state.duals[j]);
  const double beta_j_norm_sq = beta_j.squaredNorm();

  state.selected.erase(state.selected.begin() + static_cast<std::ptrdiff_t>(j));
  state.atoms.erase(state.atoms.begin() + static_cast<std::ptrdiff_t>(j));
  state.duals.erase(state.duals.begin() + static_cast<std::ptrdiff_t>(j));
  if (state.coefficients.size() == static_cast<Eigen::Index>(n)) {
    for (Eigen::Index k = static_cast<Eigen::Index>(j); k + 1 < state.coefficients.size(); ++k) {
      state.coefficients[k] = state.coefficients[k + 1];
    }
    state.coefficients.conservativeResize(state.coefficients.size() - 1);
  }

  for (Eigen::VectorXd& dual : state.duals) {
    dual -= beta_j * (beta_j.dot(dual) / beta_j_norm_sq);
  }

  state.ortho_basis.clear();
  state.ortho_norms_sq.clear();
  for (const Eigen::VectorXd& atom : state.atoms) {
    Eigen::VectorXd psi = detail::orthogonalize_twice(state, atom);
    state.ortho_norms_sq.push_back(psi.squaredNorm());
    state.ortho_basis.push_back(std::move(psi));
  }
}

/// c_n = <beta_n, f> for every selected atom; stored into the state and returned.
inline Eigen::VectorXd compute_coefficients(Decomposition& state, const Signal& f) {
  if (!state.empty() && f.samples.size() != state.dimension()) {
    throw DimensionMismatch("signal length does not match decomposition");
  }
  Eigen::VectorXd c(static_cast<Eigen::Index>(state.size()));
  for (std::size_t n = 0; n < state.duals.size(); ++n) {
    c[static_cast<Eigen::Index>(n)] = state.duals[n].dot(f.samples);
  }
  state.coefficients = c;
  return c;
}

/// The current approximation sum_n c_n alpha_n as a sample vector.
inline Eigen::VectorXd reconstruct(const Decomposition& state, const Dictionary& dict) {
  if (!state.empty() && dict.atom_size() != state.dimension()) {
    throw DimensionMismatch("dictionary atom length does not match decomposition");
  }
  Eigen::VectorXd approx = Eigen::VectorXd::Zero(dict.atom_size());
  for (std::size_t n = 0; n < state.selected.size(); ++n) {
    const Eigen::Index idx = state.selected[n];
    if (idx < 0 || static_cast<std::size_t>(idx) >= dict.size()) {
      throw IndexOutOfRange("selected index outside dictionary");
    }
    approx += state.coefficients[static_cast<Eigen::Index>(n)] * dict.atoms[static_cast<std::size_t>(idx)].values;
  }
  return approx;
}

/// Refreshes residual = f - reconstruct(state, dict) and its norm.
inline void update_residual(Decomposition& state, const Dictionary& dict, const Signal& f) {
  if (f.samples.size() != dict.atom_size()) {
    throw DimensionMismatch("signal length does not match dictionary");
  }
  state.residual = f.samples - reconstruct(state, dict);
  state.residual_norm = state.residual.norm();
}

}  // namespace pursuit
