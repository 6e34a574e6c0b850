#pragma once

#include <Eigen/Core>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pursuit/errors.hpp"

namespace pursuit {

/// A real-valued signal sampled on a uniform time grid.
struct Signal {
  double grid_start = 0.0;
  double grid_step = 1.0;
  Eigen::VectorXd samples;

  Eigen::Index size() const { return samples.size(); }
  double time_at(Eigen::Index k) const { return grid_start + grid_step * static_cast<double>(k); }
};

inline void validate(const Signal& f) {
  if (f.samples.size() == 0) throw InvalidArgument("signal has no samples");
  if (!(f.grid_step > 0.0)) throw InvalidArgument("signal grid step must be positive");
  if (!f.samples.allFinite()) throw InvalidArgument("signal contains NaN or Inf samples");
}

/// Generation metadata for dictionary atoms produced by a scale/translation family.
struct AtomMeta {
  int scale = 0;        // dyadic scale index m
  int translation = 0;  // translation index n
};

/// One dictionary element, stored with unit Euclidean norm.
struct Atom {
  Eigen::VectorXd values;
  std::optional<AtomMeta> meta;
};

// Atoms within 1e-12 of unit norm are kept bit-for-bit; anything else is rescaled.
// Keeping already-normalized atoms untouched makes save/load round trips exact.
inline Atom make_atom(Eigen::VectorXd values, std::optional<AtomMeta> meta = std::nullopt) {
  const double norm = values.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InvalidArgument("atom has zero or non-finite norm");
  }
  if (std::abs(norm - 1.0) > 1e-12) values /= norm;
  return Atom{std::move(values), meta};
}

/// An ordered collection of unit-norm atoms sharing one sample grid.
struct Dictionary {
  std::vector<Atom> atoms;
  std::string provenance;
  double grid_start = 0.0;
  double grid_step = 1.0;

  std::size_t size() const { return atoms.size(); }
  bool empty() const { return atoms.empty(); }
  Eigen::Index atom_size() const { return atoms.empty() ? 0 : atoms.front().values.size(); }
};

inline void validate(const Dictionary& dict) {
  if (dict.atoms.empty()) throw InvalidArgument("dictionary has no atoms");
  const Eigen::Index n = dict.atoms.front().values.size();
  for (const Atom& a : dict.atoms) {
    if (a.values.size() != n) throw DimensionMismatch("dictionary atoms have unequal lengths");
  }
}

}  // namespace pursuit
