#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "pursuit/backward.hpp"
#include "pursuit/diagnostics.hpp"
#include "pursuit/forward.hpp"
#include "pursuit/oracle.hpp"
#include "test_helpers.hpp"

using Catch::Approx;
using Eigen::Vector2d;

TEST_CASE("deletion criterion values on the two-atom fixture") {
  testutil::TwoAtomFixture fx;
  const auto choice = pursuit::select_deletion_index(fx.state);
  REQUIRE(choice.position == 0);
  REQUIRE(choice.value == Approx(0.5));

  // The runner-up quantity, for completeness of the frozen fixture.
  const auto r1 = pursuit::deletion_residual(fx.state, 1);
  REQUIRE(r1.norm_sq == Approx(9.0));

  // Exhaustive agreement: the oracle confirms dropping position 0 is cheapest.
  const auto best = pursuit::oracle::best_single_deletion(fx.f, fx.dict.atoms);
  REQUIRE(best.index == choice.position);
}

TEST_CASE("zero coefficients are free deletions") {
  pursuit::Dictionary dict;
  dict.atoms.push_back(pursuit::make_atom(Eigen::Vector3d(1, 0, 0)));
  dict.atoms.push_back(pursuit::make_atom(Eigen::Vector3d(0, 1, 0)));
  pursuit::Signal f;
  f.samples = Eigen::Vector3d(2, 0, 0);  // orthogonal to the second atom
  pursuit::Decomposition state = testutil::build_decomposition(dict, f, {0, 1});
  const auto choice = pursuit::select_deletion_index(state);
  REQUIRE(choice.position == 1);
  REQUIRE(choice.value == Approx(0.0).margin(1e-20));

  const auto r = pursuit::deletion_residual(state, 1);
  REQUIRE(r.vec.norm() == Approx(0.0).margin(1e-15));
}

TEST_CASE("orthonormal atoms reduce the criterion to the smallest coefficient") {
  pursuit::Dictionary dict;
  dict.atoms.push_back(pursuit::make_atom(Eigen::Vector3d(1, 0, 0)));
  dict.atoms.push_back(pursuit::make_atom(Eigen::Vector3d(0, 1, 0)));
  dict.atoms.push_back(pursuit::make_atom(Eigen::Vector3d(0, 0, 1)));
  pursuit::Signal f;
  f.samples = Eigen::Vector3d(3, -1, 2);
  pursuit::Decomposition state = testutil::build_decomposition(dict, f, {0, 1, 2});
  const auto theorem = pursuit::select_deletion_index(state, pursuit::DeletionCriterion::theorem1);
  const auto naive = pursuit::select_deletion_index(state, pursuit::DeletionCriterion::naive_abs_coeff);
  REQUIRE(theorem.position == 1);
  REQUIRE(naive.position == 1);
}

TEST_CASE("select_deletion_index rejects an empty decomposition") {
  pursuit::Decomposition empty;
  REQUIRE_THROWS_AS(pursuit::select_deletion_index(empty), pursuit::EmptyDecomposition);
}

TEST_CASE("deletion_residual matches the projection difference between subsets") {
  testutil::TwoAtomFixture fx;
  const auto r = pursuit::deletion_residual(fx.state, 0);
  REQUIRE(r.vec.isApprox(Vector2d(-0.5, 0.5), 1e-12));
  REQUIRE(r.norm_sq == Approx(0.5));
  REQUIRE(r.vec.squaredNorm() == Approx(r.norm_sq).epsilon(1e-12));

  // Independent route: project onto both subsets and subtract.
  const auto full = pursuit::oracle::least_squares_projection(fx.f, fx.dict.atoms);
  const auto reduced =
      pursuit::oracle::least_squares_projection(fx.f, std::vector<pursuit::Atom>{fx.dict.atoms[1]});
  REQUIRE(r.vec.isApprox(full.approximation - reduced.approximation, 1e-10));

  SECTION("a single-atom state loses its whole approximation") {
    pursuit::Dictionary dict;
    dict.atoms.push_back(pursuit::make_atom(Vector2d(1.0, 0.0)));
    pursuit::Signal f;
    f.samples = Vector2d(2.0, 5.0);
    pursuit::Decomposition state = testutil::build_decomposition(dict, f, {0});
    const auto loss = pursuit::deletion_residual(state, 0);
    REQUIRE(loss.vec.isApprox(pursuit::reconstruct(state, dict), 1e-12));
  }

  SECTION("out-of-range positions are rejected") {
    REQUIRE_THROWS_AS(pursuit::deletion_residual(fx.state, 5), pursuit::IndexOutOfRange);
  }
}

TEST_CASE("downdated coefficients equal the reduced projection") {
  testutil::TwoAtomFixture fx;

  SECTION("dropping the second atom recovers the direct one-atom projection") {
    const Eigen::VectorXd c = pursuit::downdate_coefficients(fx.state, 1);
    REQUIRE(c.size() == 1);
    REQUIRE(c[0] == Approx(2.0));  // <alpha_1, f>
  }

  SECTION("orthonormal atoms keep their coefficients") {
    pursuit::Dictionary dict;
    dict.atoms.push_back(pursuit::make_atom(Eigen::Vector3d(1, 0, 0)));
    dict.atoms.push_back(pursuit::make_atom(Eigen::Vector3d(0, 1, 0)));
    pursuit::Signal f;
    f.samples = Eigen::Vector3d(3, -1, 0);
    pursuit::Decomposition state = testutil::build_decomposition(dict, f, {0, 1});
    const Eigen::VectorXd c = pursuit::downdate_coefficients(state, 1);
    REQUIRE(c[0] == Approx(3.0));
  }

  SECTION("out-of-range positions are rejected") {
    REQUIRE_THROWS_AS(pursuit::downdate_coefficients(fx.state, 2), pursuit::IndexOutOfRange);
  }

  SECTION("deleting a zero coefficient changes nothing") {
    pursuit::Dictionary dict;
    dict.atoms.push_back(pursuit::make_atom(Eigen::Vector3d(1, 0, 0)));
    dict.atoms.push_back(pursuit::make_atom(Eigen::Vector3d(1, 1, 0)));
    pursuit::Signal f;
    f.samples = Eigen::Vector3d(4, 0, 0);
    pursuit::Decomposition state = testutil::build_decomposition(dict, f, {0, 1});
    REQUIRE(state.coefficients[1] == Approx(0.0).margin(1e-14));
    const Eigen::VectorXd c = pursuit::downdate_coefficients(state, 1);
    REQUIRE(c[0] == Approx(state.coefficients[0]).epsilon(1e-12));
  }
}

TEST_CASE("boomp_run with target_count equal to the size is a no-op") {
  testutil::TwoAtomFixture fx;
  pursuit::BackwardConfig cfg;
  cfg.target_count = 2;
  const auto result = pursuit::boomp_run(fx.state, fx.f, cfg);
  REQUIRE(result.trace.empty());
  REQUIRE(result.decomposition.coefficients.isApprox(fx.state.coefficients));
}

TEST_CASE("boomp_run shrinks to the oracle least-squares solution") {
  std::mt19937_64 rng(9090);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index dim = 10;
    const pursuit::Dictionary dict = testutil::random_dictionary(rng, 6, dim);
    const pursuit::Signal f = testutil::random_signal(rng, dim);
    std::vector<Eigen::Index> all{0, 1, 2, 3, 4, 5};
    pursuit::Decomposition state = testutil::build_decomposition(dict, f, all);

    pursuit::BackwardConfig cfg;
    cfg.target_count = 5;
    const auto result = pursuit::boomp_run(state, f, cfg);
    REQUIRE(result.decomposition.size() == 5);
    const auto oracle =
        pursuit::oracle::least_squares_projection(f, dict, result.decomposition.selected);
    REQUIRE((result.decomposition.coefficients - oracle.coefficients).norm() <=
            1e-8 * std::max(1.0, oracle.coefficients.norm()));
    REQUIRE(result.decomposition.residual_norm == Approx(oracle.residual_norm).epsilon(1e-10));
  }
}

TEST_CASE("deletion choices agree with the exhaustive leave-one-out oracle") {
  std::mt19937_64 rng(112358);
  int checked = 0;
  while (checked < 120) {
    const std::size_t natoms = 2 + rng() % 7;  // up to 8
    const Eigen::Index dim = static_cast<Eigen::Index>(natoms + 2 + rng() % 10);
    const pursuit::Dictionary dict = testutil::random_dictionary(rng, natoms, dim);
    const pursuit::Signal f = testutil::random_signal(rng, dim);
    std::vector<Eigen::Index> indices;
    for (std::size_t i = 0; i < natoms; ++i) indices.push_back(static_cast<Eigen::Index>(i));
    const pursuit::Decomposition state = testutil::build_decomposition(dict, f, indices);

    const auto choice = pursuit::select_deletion_index(state);
    std::vector<pursuit::Atom> atoms;
    for (std::size_t i = 0; i < natoms; ++i) atoms.push_back(dict.atoms[i]);
    const auto oracle_best = pursuit::oracle::best_single_deletion(f, atoms);
    REQUIRE(choice.position == oracle_best.index);

    // The baseline criterion is exactly the smallest-coefficient rule.
    const auto naive = pursuit::select_deletion_index(state, pursuit::DeletionCriterion::naive_abs_coeff);
    Eigen::Index smallest = 0;
    state.coefficients.cwiseAbs().minCoeff(&smallest);
    REQUIRE(naive.position == static_cast<std::size_t>(smallest));

    // Two routes to the residual increase must agree tightly.
    const auto loss = pursuit::deletion_residual(state, choice.position);
    REQUIRE(loss.vec.squaredNorm() == Approx(loss.norm_sq).epsilon(1e-10));
    ++checked;
  }
}

TEST_CASE("boomp_run enforces its stopping contracts") {
  testutil::TwoAtomFixture fx;

  SECTION("a config without stops is rejected") {
    REQUIRE_THROWS_AS(pursuit::boomp_run(fx.state, fx.f, pursuit::BackwardConfig{}),
                      pursuit::InvalidArgument);
  }

  SECTION("a target larger than the decomposition is infeasible") {
    pursuit::BackwardConfig cfg;
    cfg.target_count = 3;
    REQUIRE_THROWS_AS(pursuit::boomp_run(fx.state, fx.f, cfg), pursuit::Infeasible);
  }

  SECTION("a zero error budget on a non-degenerate state deletes nothing") {
    pursuit::BackwardConfig cfg;
    cfg.error_budget = 0.0;
    const auto result = pursuit::boomp_run(fx.state, fx.f, cfg);
    REQUIRE(result.trace.empty());
    REQUIRE(result.decomposition.size() == 2);
  }

  SECTION("a zero budget plus a smaller target is infeasible") {
    pursuit::BackwardConfig cfg;
    cfg.error_budget = 0.0;
    cfg.target_count = 1;
    REQUIRE_THROWS_AS(pursuit::boomp_run(fx.state, fx.f, cfg), pursuit::Infeasible);
  }

  SECTION("a reachable target under a generous budget just reaches the target") {
    std::mt19937_64 rng(314);
    const pursuit::Dictionary dict = testutil::random_dictionary(rng, 6, 16);
    const pursuit::Signal f = testutil::random_signal(rng, 16);
    pursuit::Decomposition state = testutil::build_decomposition(dict, f, {0, 1, 2, 3, 4, 5});
    pursuit::BackwardConfig cfg;
    cfg.target_count = 4;
    cfg.error_budget = 2.0 * f.samples.norm();
    const auto result = pursuit::boomp_run(state, f, cfg);
    REQUIRE(result.decomposition.size() == 4);
    REQUIRE(result.trace.size() == 2);
  }

  SECTION("the budget is honored predictively, never overshot") {
    std::mt19937_64 rng(424242);
    const pursuit::Dictionary dict = testutil::random_dictionary(rng, 8, 12);
    const pursuit::Signal f = testutil::random_signal(rng, 12);
    std::vector<Eigen::Index> indices{0, 1, 2, 3, 4, 5, 6, 7};
    pursuit::Decomposition state = testutil::build_decomposition(dict, f, indices);
    const double budget = 0.9 * f.samples.norm();
    pursuit::BackwardConfig cfg;
    cfg.error_budget = budget;
    const auto result = pursuit::boomp_run(state, f, cfg);
    REQUIRE(result.decomposition.residual_norm <= budget + 1e-12);
    // The next deletion would have crossed the budget.
    if (!result.decomposition.empty()) {
      const auto choice = pursuit::select_deletion_index(result.decomposition);
      const auto loss = pursuit::deletion_residual(result.decomposition, choice.position);
      const double predicted = std::sqrt(result.decomposition.residual_norm *
                                             result.decomposition.residual_norm +
                                         loss.norm_sq);
      REQUIRE(predicted > budget);
    }
  }
}

TEST_CASE("an ample budget with no target shrinks all the way to empty") {
  testutil::TwoAtomFixture fx;
  pursuit::BackwardConfig cfg;
  cfg.error_budget = 2.0 * fx.f.samples.norm();
  const auto result = pursuit::boomp_run(fx.state, fx.f, cfg);
  REQUIRE(result.decomposition.empty());
  REQUIRE(result.trace.size() == 2);
  REQUIRE(result.decomposition.residual_norm == Approx(fx.f.samples.norm()).epsilon(1e-12));
}

TEST_CASE("deletion traces are monotone and additive") {
  std::mt19937_64 rng(998877);
  for (int trial = 0; trial < 15; ++trial) {
    const Eigen::Index dim = 30;
    const std::size_t natoms = 12;
    const pursuit::Dictionary dict = testutil::random_dictionary(rng, natoms, dim);
    const pursuit::Signal f = testutil::random_signal(rng, dim);
    std::vector<Eigen::Index> indices;
    for (std::size_t i = 0; i < natoms; ++i) indices.push_back(static_cast<Eigen::Index>(i));
    pursuit::Decomposition state = testutil::build_decomposition(dict, f, indices);
    const double initial_sq = state.residual_norm * state.residual_norm;

    pursuit::BackwardConfig cfg;
    cfg.target_count = 3;
    const auto result = pursuit::boomp_run(state, f, cfg);
    REQUIRE(result.trace.size() == natoms - 3);

    double prev = 0.0;
    double accumulated = initial_sq;
    for (const pursuit::DeletionStep& step : result.trace) {
      REQUIRE(step.criterion_value >= 0.0);
      REQUIRE(step.residual_norm_after >= prev);
      prev = step.residual_norm_after;
      accumulated += step.criterion_value;
    }
    const double final_sq =
        result.decomposition.residual_norm * result.decomposition.residual_norm;
    REQUIRE(final_sq == Approx(accumulated).epsilon(1e-8));
  }
}

TEST_CASE("naive criterion still downdates optimally") {
  std::mt19937_64 rng(70707);
  const pursuit::Dictionary dict = testutil::random_dictionary(rng, 8, 14);
  const pursuit::Signal f = testutil::random_signal(rng, 14);
  std::vector<Eigen::Index> indices{0, 1, 2, 3, 4, 5, 6, 7};
  pursuit::Decomposition state = testutil::build_decomposition(dict, f, indices);

  pursuit::BackwardConfig cfg;
  cfg.target_count = 4;
  cfg.criterion = pursuit::DeletionCriterion::naive_abs_coeff;
  const auto result = pursuit::boomp_run(state, f, cfg);
  REQUIRE(result.decomposition.size() == 4);
  const auto oracle = pursuit::oracle::least_squares_projection(f, dict, result.decomposition.selected);
  REQUIRE((result.decomposition.coefficients - oracle.coefficients).norm() <=
          1e-8 * std::max(1.0, oracle.coefficients.norm()));
}

TEST_CASE("interleaved forward growth after deletions stays consistent") {
  std::mt19937_64 rng(123321);
  const pursuit::Dictionary dict = testutil::random_dictionary(rng, 20, 24);
  const pursuit::Signal f = testutil::random_signal(rng, 24);
  pursuit::Decomposition state = testutil::build_decomposition(dict, f, {0, 1, 2, 3, 4, 5});

  pursuit::BackwardConfig cfg;
  cfg.target_count = 3;
  auto result = pursuit::boomp_run(state, f, cfg);

  // Resume forward growth on the shrunk state.
  pursuit::append_atom(result.decomposition, dict, 15);
  pursuit::compute_coefficients(result.decomposition, f);
  pursuit::update_residual(result.decomposition, dict, f);

  REQUIRE(pursuit::diagnostics::max_biorthogonality_error(result.decomposition) < 1e-8);
  const auto oracle =
      pursuit::oracle::least_squares_projection(f, dict, result.decomposition.selected);
  REQUIRE((result.decomposition.coefficients - oracle.coefficients).norm() <=
          1e-8 * std::max(1.0, oracle.coefficients.norm()));
}
