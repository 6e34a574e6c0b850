#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <cstddef>
#include <vector>

#include "pursuit/errors.hpp"
#include "pursuit/types.hpp"

// Brute-force least-squares reference used by the invariant tests. It solves
// the normal equations with a partially pivoted LU factorization on purpose:
// that numerical path shares nothing with the recursive Gram-Schmidt kernels
// it is used to check.
namespace pursuit::oracle {

inline constexpr double kPivotRatioCap = 1e-12;

struct OracleSolution {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd approximation;
  double residual_norm = 0.0;
};

/// Orthogonal projection of f onto the span of `atoms` via the normal
/// equations. Throws IllConditioned when the Gram matrix is numerically
/// singular (pivot ratio below kPivotRatioCap).
inline OracleSolution least_squares_projection(const Signal& f, const std::vector<Atom>& atoms) {
  const Eigen::Index k = static_cast<Eigen::Index>(atoms.size());
  OracleSolution out;
  if (k == 0) {
    out.coefficients = Eigen::VectorXd();
    out.approximation = Eigen::VectorXd::Zero(f.samples.size());
    out.residual_norm = f.samples.norm();
    return out;
  }
  for (const Atom& a : atoms) {
    if (a.values.size() != f.samples.size()) {
      throw DimensionMismatch("atom length does not match signal");
    }
  }

  Eigen::MatrixXd gram(k, k);
  Eigen::VectorXd rhs(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    rhs[i] = atoms[static_cast<std::size_t>(i)].values.dot(f.samples);
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double g = atoms[static_cast<std::size_t>(i)].values.dot(atoms[static_cast<std::size_t>(j)].values);
      gram(i, j) = g;
      gram(j, i) = g;
    }
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(gram);
  const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double pivot_max = pivots.maxCoeff();
  if (!(pivot_max > 0.0) || pivots.minCoeff() < kPivotRatioCap * pivot_max) {
    throw IllConditioned("Gram matrix is numerically singular");
  }

  out.coefficients = lu.solve(rhs);
  out.approximation = Eigen::VectorXd::Zero(f.samples.size());
  for (Eigen::Index i = 0; i < k; ++i) {
    out.approximation += out.coefficients[i] * atoms[static_cast<std::size_t>(i)].values;
  }
  out.residual_norm = (f.samples - out.approximation).norm();
  return out;
}

/// Projection onto the subset of dictionary atoms named by `indices`.
inline OracleSolution least_squares_projection(const Signal& f, const Dictionary& dict,
                                               const std::vector<Eigen::Index>& indices) {
  std::vector<Atom> subset;
  subset.reserve(indices.size());
  for (Eigen::Index idx : indices) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= dict.size()) {
      throw IndexOutOfRange("dictionary index out of range");
    }
    subset.push_back(dict.atoms[static_cast<std::size_t>(idx)]);
  }
  return least_squares_projection(f, subset);
}

struct BestDeletion {
  std::size_t index = 0;       // position within `atoms` whose removal is cheapest
  double residual_norm = 0.0;  // residual of the best leave-one-out projection
};

/// Exhaustive leave-one-out search; lowest index on ties.
inline BestDeletion best_single_deletion(const Signal& f, const std::vector<Atom>& atoms) {
  if (atoms.empty()) throw EmptyDecomposition("best_single_deletion needs at least one atom");
  BestDeletion best;
  bool have = false;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    std::vector<Atom> reduced;
    reduced.reserve(atoms.size() - 1);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      if (k != j) reduced.push_back(atoms[k]);
    }
    const double res = least_squares_projection(f, reduced).residual_norm;
    if (!have || res < best.residual_norm) {
      best = BestDeletion{j, res};
      have = true;
    }
  }
  return best;
}

}  // namespace pursuit::oracle
