// Minimal usage example: build a random dictionary, decompose a random signal
// with forward OOMP, then shrink the decomposition with BOOMP and watch the
// residual trade against sparsity.

#include <iostream>
#include <random>

#include "pursuit/backward.hpp"
#include "pursuit/forward.hpp"

int main() {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> gauss;

  const Eigen::Index dim = 64;
  pursuit::Dictionary dict;
  for (int i = 0; i < 160; ++i) {
    Eigen::VectorXd v(dim);
    for (Eigen::Index k = 0; k < dim; ++k) v[k] = gauss(rng);
    dict.atoms.push_back(pursuit::make_atom(std::move(v)));
  }

  pursuit::Signal f;
  f.samples.resize(dim);
  for (Eigen::Index k = 0; k < dim; ++k) f.samples[k] = gauss(rng);

  pursuit::ForwardConfig fwd;
  fwd.max_atoms = 24;
  pursuit::ForwardResult forward = pursuit::oomp_run(f, dict, fwd);
  std::cout << "forward: " << forward.decomposition.size()
            << " atoms, residual " << forward.decomposition.residual_norm << "\n";

  pursuit::BackwardConfig bwd;
  bwd.target_count = 8;
  pursuit::BackwardResult backward = pursuit::boomp_run(forward.decomposition, f, bwd);
  for (const pursuit::DeletionStep& step : backward.trace) {
    std::cout << "dropped atom " << step.dictionary_index << " (cost " << step.criterion_value
              << "), residual now " << step.residual_norm_after << "\n";
  }
  return 0;
}
