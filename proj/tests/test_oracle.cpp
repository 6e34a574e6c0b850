#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "pursuit/oracle.hpp"
#include "test_helpers.hpp"

using Catch::Approx;
using Eigen::Vector2d;
using pursuit::oracle::best_single_deletion;
using pursuit::oracle::least_squares_projection;

TEST_CASE("projection onto orthonormal atoms is the inner-product rule") {
  pursuit::Dictionary dict;
  dict.atoms.push_back(pursuit::make_atom(Eigen::Vector3d(1, 0, 0)));
  dict.atoms.push_back(pursuit::make_atom(Eigen::Vector3d(0, 1, 0)));
  pursuit::Signal f;
  f.samples = Eigen::Vector3d(2, -3, 4);
  const auto sol = least_squares_projection(f, dict.atoms);
  REQUIRE(sol.coefficients[0] == Approx(2.0));
  REQUIRE(sol.coefficients[1] == Approx(-3.0));
  REQUIRE(sol.residual_norm == Approx(4.0));
}

TEST_CASE("projection solves the two-atom fixture exactly") {
  testutil::TwoAtomFixture fx;
  const auto sol = least_squares_projection(fx.f, fx.dict.atoms);
  REQUIRE(sol.coefficients[0] == Approx(-1.0));
  REQUIRE(sol.coefficients[1] == Approx(3.0 * std::sqrt(2.0)));
  REQUIRE(sol.residual_norm == Approx(0.0).margin(1e-12));
}

TEST_CASE("projection onto nothing is the zero approximation") {
  pursuit::Signal f;
  f.samples = Eigen::Vector3d(1, 2, 2);
  const auto sol = least_squares_projection(f, std::vector<pursuit::Atom>{});
  REQUIRE(sol.approximation.norm() == 0.0);
  REQUIRE(sol.residual_norm == Approx(3.0));
}

TEST_CASE("numerically singular atom sets are rejected") {
  pursuit::Signal f;
  f.samples = Vector2d(1, 2);
  std::vector<pursuit::Atom> atoms;
  atoms.push_back(pursuit::make_atom(Vector2d(1, 0)));
  atoms.push_back(pursuit::make_atom(Vector2d(1, 0)));
  REQUIRE_THROWS_AS(least_squares_projection(f, atoms), pursuit::IllConditioned);
}

TEST_CASE("best_single_deletion enumerates leave-one-out subsets") {
  testutil::TwoAtomFixture fx;

  SECTION("two-atom fixture: dropping the first atom is cheapest") {
    const auto best = best_single_deletion(fx.f, fx.dict.atoms);
    REQUIRE(best.index == 0);
    REQUIRE(best.residual_norm == Approx(std::sqrt(0.5)));
  }

  SECTION("one atom: deleting it leaves the whole signal") {
    std::vector<pursuit::Atom> one{fx.dict.atoms[0]};
    const auto best = best_single_deletion(fx.f, one);
    REQUIRE(best.index == 0);
    REQUIRE(best.residual_norm == Approx(fx.f.samples.norm()));
  }

  SECTION("an atom orthogonal to the signal is free to delete") {
    pursuit::Dictionary dict;
    dict.atoms.push_back(pursuit::make_atom(Eigen::Vector3d(1, 0, 0)));
    dict.atoms.push_back(pursuit::make_atom(Eigen::Vector3d(0, 0, 1)));  // orthogonal to f
    pursuit::Signal f;
    f.samples = Eigen::Vector3d(5, 1, 0);
    const auto best = best_single_deletion(f, dict.atoms);
    REQUIRE(best.index == 1);
    REQUIRE(best.residual_norm == Approx(least_squares_projection(f, dict.atoms).residual_norm));
  }

  SECTION("empty input is rejected") {
    REQUIRE_THROWS_AS(best_single_deletion(fx.f, {}), pursuit::EmptyDecomposition);
  }
}

TEST_CASE("oracle residuals are orthogonal to their subset atoms") {
  std::mt19937_64 rng(4151);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t natoms = 2 + rng() % 49;
    const Eigen::Index dim = static_cast<Eigen::Index>(natoms + 5 + rng() % (196 - natoms));
    const pursuit::Dictionary dict = testutil::random_dictionary(rng, natoms, dim);
    const pursuit::Signal f = testutil::random_signal(rng, dim);
    const auto sol = least_squares_projection(f, dict.atoms);
    const Eigen::VectorXd residual = f.samples - sol.approximation;
    for (const pursuit::Atom& a : dict.atoms) {
      REQUIRE(std::abs(a.values.dot(residual)) < 1e-9 * f.samples.norm());
    }
  }
}
