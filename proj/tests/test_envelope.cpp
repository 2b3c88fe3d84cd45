#include <doctest.h>

#include "cbx/envelope.hpp"
#include "oracles.hpp"

using namespace cbx;

namespace {

// Two interior points at distance 1 plus a boundary point.
Compactification two_point_comp() {
  Compactification comp;
  comp.space.points = {"a", "b", "z"};
  Matrix d(3, 3);
  d << 0.0, 1.0, 2.0,
       1.0, 0.0, 1.0,
       2.0, 1.0, 0.0;
  comp.space.dist = d;
  comp.interior = {0, 1};
  comp.boundary_sets = {{2}};
  return comp;
}

}  // namespace

TEST_CASE("lipschitz_envelope: worked two-point example") {
  const Compactification comp = two_point_comp();
  Vector f(2);
  f << 0, 2;
  SUBCASE("n=1 pulls the second point down to the 1-Lipschitz cone") {
    const EnvelopeResult r = lipschitz_envelope(comp, f, 1.0);
    CHECK(r.g[0] == doctest::Approx(oracle::brute_envelope_at(comp, f, 1.0, 0)));
    CHECK(r.g[0] == 0.0);
    CHECK(r.g[1] == 1.0);
    CHECK(r.lipschitz_certificate <= 1.0 + 1e-9);
  }
  SUBCASE("n=3 exceeds the Lipschitz constant, so g = f on X") {
    const EnvelopeResult r = lipschitz_envelope(comp, f, 3.0);
    CHECK(r.g[0] == 0.0);
    CHECK(r.g[1] == 2.0);
  }
  SUBCASE("constant functions are fixed points for every n") {
    const Vector c = Vector::Constant(2, 0.7);
    for (double n : {0.5, 1.0, 8.0}) {
      const EnvelopeResult r = lipschitz_envelope(comp, c, n);
      for (int x : comp.interior) CHECK(r.g[x] == doctest::Approx(0.7));
      // Off X the min still travels: c + n * dist(x, X).
      CHECK(r.g[2] == doctest::Approx(0.7 + n * dist_to_set(comp.space, 2, comp.interior)));
    }
  }
}

TEST_CASE("lipschitz_envelope rejects bad inputs") {
  const Compactification comp = two_point_comp();
  CHECK_THROWS_AS(lipschitz_envelope(comp, Vector::Zero(2), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(lipschitz_envelope(comp, Vector::Zero(3), 1.0), std::invalid_argument);
  Compactification empty = comp;
  empty.interior.clear();
  CHECK_THROWS_AS(lipschitz_envelope(empty, Vector(0), 1.0), std::invalid_argument);
}

TEST_CASE("envelope_sequence: gap table from the worked example") {
  const Compactification comp = two_point_comp();
  Vector f(2);
  f << 0, 2;
  const EnvelopeSweep sweep = envelope_sequence(comp, f, {1.0, 2.0, 3.0});
  // Gaps at the second point: 1, 0, 0.
  CHECK(sweep.gaps_on_X[0][1] == doctest::Approx(1.0));
  CHECK(sweep.gaps_on_X[1][1] == doctest::Approx(0.0));
  CHECK(sweep.gaps_on_X[2][1] == doctest::Approx(0.0));
  CHECK(sweep.seq.direction == SeqDirection::Up);
  CHECK_THROWS_AS(envelope_sequence(comp, f, {2.0, 1.0}), std::invalid_argument);
}

TEST_CASE("envelope invariants on random spaces") {
  Rng rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = rng.uniform_int(3, 8);
    const int nb = rng.uniform_int(1, 2);
    const Compactification comp = oracle::random_planar_compactification(rng, n, nb);
    const Vector f = rng.uniform_vector(comp.interior_size(), -2.0, 2.0);
    const double fn = sup_norm(f);
    const double lip_oracle = oracle::brute_interior_lipschitz(comp, f);

    Vector prev;
    for (double nn : {1.0, 2.0, 4.0, 8.0, 16.0}) {
      const EnvelopeResult r = lipschitz_envelope(comp, f, nn);
      // Exact agreement with the brute-force min at every point of K.
      for (int x = 0; x < comp.size(); ++x) {
        CHECK(r.g[x] == doctest::Approx(oracle::brute_envelope_at(comp, f, nn, x))
                            .epsilon(1e-14));
      }
      // g <= f on X, g >= -‖f‖ everywhere, and off X bounded by travel cost.
      for (int j = 0; j < comp.interior_size(); ++j) {
        CHECK(r.g[comp.interior[static_cast<std::size_t>(j)]] <= f[j] + 1e-12);
      }
      for (int x = 0; x < comp.size(); ++x) {
        CHECK(r.g[x] >= -fn - 1e-12);
        CHECK(r.g[x] <= fn + nn * dist_to_set(comp.space, x, comp.interior) + 1e-12);
      }
      CHECK(r.lipschitz_certificate <= nn + 1e-9);
      // Monotone in n.
      if (prev.size() > 0) CHECK((prev.array() <= r.g.array() + 1e-12).all());
      prev = r.g;
      // Finite-space sharpening: equality exactly once n >= Lip(f).
      if (nn >= lip_oracle) {
        for (int j = 0; j < comp.interior_size(); ++j) {
          CHECK(r.g[comp.interior[static_cast<std::size_t>(j)]] == f[j]);
        }
      }
      // Quantitative gap bound from the approximation argument:
      // g_n(x) >= min { f(y) : d(x,y) <= 2‖f‖/n }.
      for (int j = 0; j < comp.interior_size(); ++j) {
        const int x = comp.interior[static_cast<std::size_t>(j)];
        double nearby_min = kInf;
        for (int l = 0; l < comp.interior_size(); ++l) {
          const int y = comp.interior[static_cast<std::size_t>(l)];
          if (comp.space.dist(x, y) <= 2.0 * fn / nn) {
            nearby_min = std::min(nearby_min, f[l]);
          }
        }
        CHECK(f[j] - r.g[x] <= f[j] - nearby_min + 1e-12);
      }
    }
  }
}

TEST_CASE("lipschitz_constant matches the oracle") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Compactification comp = oracle::random_planar_compactification(rng, 6, 1);
    const Vector f = rng.uniform_vector(comp.interior_size(), -2.0, 2.0);
    CHECK(lipschitz_constant(comp.space, f, comp.interior) ==
          doctest::Approx(oracle::brute_interior_lipschitz(comp, f)).epsilon(1e-14));
  }
}
