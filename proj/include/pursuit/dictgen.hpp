#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "pursuit/errors.hpp"
#include "pursuit/types.hpp"

namespace pursuit {

/// Mexican-hat wavelet dictionary parameters: atoms are
///   alpha_{m,n}(t) = 2^{m/2} alpha(t 2^m - step * n)
/// sampled on a uniform grid and normalized, with translation indices n whose
/// centers step*n/2^m fall inside [t_min, t_max], extended by margin_indices
/// per side.
struct MexHatSpec {
  std::vector<int> scales = {0, 1, 2, 3, 4};
  double translation_step = 0.2;
  double t_min = 0.0;
  double t_max = 4.0;
  double grid_step = 0.01;
  int margin_indices = 4;
};

/// Linear chirp: cos(2 pi (f0 t + (f1 - f0) t^2 / (2 t1))), zero initial phase.
struct ChirpSpec {
  double f0 = 0.0;
  double t1 = 1.0;
  double f1 = 2.0;
  double grid_start = 0.0;
  double grid_step = 0.01;
  double grid_end = 4.0;
};

/// (2/sqrt(3)) pi^{-1/4} (1 - t^2) exp(-t^2/2)
inline double mexican_hat(double t) {
  static const double amplitude = 2.0 / std::sqrt(3.0) * std::pow(std::numbers::pi, -0.25);
  return amplitude * (1.0 - t * t) * std::exp(-t * t / 2.0);
}

namespace detail {

// Sample count for start:step:end, MATLAB colon semantics (end included when
// it lands on the grid within rounding).
inline Eigen::Index grid_count(double start, double step, double end) {
  if (!(step > 0.0)) throw InvalidArgument("grid step must be positive");
  if (end < start) throw InvalidArgument("grid end precedes start");
  return static_cast<Eigen::Index>(std::floor((end - start) / step + 1e-9)) + 1;
}

}  // namespace detail

inline Dictionary build_mexhat_dictionary(const MexHatSpec& spec) {
  if (spec.scales.empty()) throw InvalidArgument("mexican-hat spec needs at least one scale");
  if (!(spec.translation_step > 0.0)) throw InvalidArgument("translation step must be positive");
  if (!(spec.t_max > spec.t_min)) throw InvalidArgument("interval is degenerate");
  if (spec.margin_indices < 0) throw InvalidArgument("margin must be non-negative");

  const Eigen::Index samples = detail::grid_count(spec.t_min, spec.grid_step, spec.t_max);

  std::vector<int> scales = spec.scales;
  std::sort(scales.begin(), scales.end());
  scales.erase(std::unique(scales.begin(), scales.end()), scales.end());

  Dictionary dict;
  dict.grid_start = spec.t_min;
  dict.grid_step = spec.grid_step;
  for (int m : scales) {
    const double dilation = std::pow(2.0, m);
    const double amplitude = std::pow(2.0, 0.5 * m);
    // Translation indices whose centers step*n / 2^m lie in the interval,
    // extended by the margin on each side.
    const int n_lo =
        static_cast<int>(std::ceil(spec.t_min * dilation / spec.translation_step - 1e-9)) - spec.margin_indices;
    const int n_hi =
        static_cast<int>(std::floor(spec.t_max * dilation / spec.translation_step + 1e-9)) + spec.margin_indices;
    for (int n = n_lo; n <= n_hi; ++n) {
      Eigen::VectorXd values(samples);
      for (Eigen::Index k = 0; k < samples; ++k) {
        const double t = spec.t_min + spec.grid_step * static_cast<double>(k);
        values[k] = amplitude * mexican_hat(t * dilation - spec.translation_step * n);
      }
      dict.atoms.push_back(make_atom(std::move(values), AtomMeta{m, n}));
    }
  }

  std::ostringstream prov;
  prov << "mexican-hat scales=";
  for (std::size_t i = 0; i < scales.size(); ++i) prov << (i ? "," : "") << scales[i];
  prov << " step=" << spec.translation_step << " interval=[" << spec.t_min << "," << spec.t_max
       << "] grid=" << spec.grid_step << " margin=" << spec.margin_indices;
  dict.provenance = prov.str();
  return dict;
}

inline Signal chirp(const ChirpSpec& spec) {
  if (!(spec.t1 > 0.0)) throw InvalidArgument("chirp reference time t1 must be positive");
  const Eigen::Index samples = detail::grid_count(spec.grid_start, spec.grid_step, spec.grid_end);
  Signal out;
  out.grid_start = spec.grid_start;
  out.grid_step = spec.grid_step;
  out.samples.resize(samples);
  const double sweep = (spec.f1 - spec.f0) / (2.0 * spec.t1);
  for (Eigen::Index k = 0; k < samples; ++k) {
    const double t = spec.grid_start + spec.grid_step * static_cast<double>(k);
    out.samples[k] = std::cos(2.0 * std::numbers::pi * (spec.f0 * t + sweep * t * t));
  }
  return out;
}

}  // namespace pursuit
