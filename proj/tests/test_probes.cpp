#include <doctest.h>

#include <cmath>

#include "cbx/probes.hpp"
#include "oracles.hpp"

using namespace cbx;

namespace {

EntropicFunctional dyadic_entropic(int n) {
  // p_k = 2^{-k}, normalized over the truncation.
  Vector p(n);
  for (int k = 1; k <= n; ++k) p[k - 1] = std::pow(2.0, -k);
  p /= p.sum();
  return EntropicFunctional::from_weights(p);
}

SweepFunctional entropic_geometric(double ratio) {
  return {"entropic-geo",
          [ratio](const FamilyInstance& inst) -> std::unique_ptr<Functional> {
            return std::make_unique<EntropicFunctional>(
                EntropicFunctional::from_log_weights(
                    geometric_log_weights(inst.level(), ratio)));
          }};
}

SweepFunctional max_over_K() {
  return {"max-over-K",
          [](const FamilyInstance& inst) -> std::unique_ptr<Functional> {
            return std::make_unique<SupFunctional>(inst.comp.size(),
                                                   "max-over-compactification");
          }};
}

SweepFunc one_minus_inverse_on_K() {
  SweepFunc f;
  f.label = "one-minus-inverse-K";
  f.on_K = true;
  f.make = [](const FamilyInstance& inst) {
    Vector v(inst.comp.size());
    for (int k = 1; k <= inst.level(); ++k) v[k - 1] = 1.0 - 1.0 / k;
    v[inst.level()] = 1.0;
    return v;
  };
  return f;
}

SweepFunc one_minus_inverse_on_X() {
  SweepFunc f;
  f.label = "one-minus-inverse";
  f.make = [](const FamilyInstance& inst) {
    Vector v(inst.level());
    for (int k = 1; k <= inst.level(); ++k) v[k - 1] = 1.0 - 1.0 / k;
    return v;
  };
  return f;
}

}  // namespace

TEST_CASE("upward_probe: envelope sequences converge under entropic and sup") {
  const FamilyInstance inst = make_instance({}, 6);
  Rng rng(2);
  const Vector f = rng.uniform_vector(6, -1.0, 1.0);
  const EnvelopeSweep env =
      envelope_sequence(inst.comp, f, {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0});
  std::vector<Vector> on_X;
  for (const Vector& g : env.seq.terms) on_X.push_back(restrict_to(g, inst.comp.interior));
  const FuncSequence seq =
      make_sequence(SeqKind::EnvelopeSequence, SeqDirection::Up, on_X, env.seq.bound);

  const EntropicFunctional ent = dyadic_entropic(6);
  const ProbeReport ent_rep = upward_probe(ent, seq, f, 1e-6);
  CHECK(ent_rep.pass);
  CHECK(ent_rep.verdict == "upward-continuous");
  // Once n dominates the Lipschitz constant the gap is exactly zero.
  CHECK(ent_rep.observed.back() == 0.0);

  const SupFunctional sup(6);
  const ProbeReport sup_rep = upward_probe(sup, seq, f, 1e-6);
  CHECK(sup_rep.pass);
  // F(g_m) = max g_m climbs to max f.
  CHECK(sup_rep.observed.back() == 0.0);
}

TEST_CASE("upward_probe: constant sequence sits at the limit") {
  const EntropicFunctional F = dyadic_entropic(3);
  Vector f(3);
  f << 0.2, -0.1, 0.4;
  const FuncSequence seq =
      make_sequence(SeqKind::UserList, SeqDirection::Up, {f, f, f}, 1.0);
  const ProbeReport rep = upward_probe(F, seq, f, 1e-9);
  for (double v : rep.observed) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rep.pass);
  CHECK_THROWS_AS(
      upward_probe(F, make_sequence(SeqKind::UserList, SeqDirection::Down, {f, f}, 1.0),
                   f, 1e-9),
      std::invalid_argument);
}

TEST_CASE("downward_probe: dyadic entropic vs sup on tail indicators") {
  const FamilyInstance inst = make_instance({}, 4);
  const FuncSequence seq = tail_indicator_sequence(inst);

  SUBCASE("entropic: frozen closed-form value log(1 + (e-1)/15) at the deepest cut") {
    const EntropicFunctional F = dyadic_entropic(4);
    Rng rng(3);
    const ProbeReport rep =
        downward_probe(F, seq, 0.2, {rng.uniform_vector(4, -1.0, 1.0)});
    const double expected = std::log1p((std::exp(1.0) - 1.0) / 15.0);
    CHECK(rep.observed.back() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(rep.verdict == "downward-continuous");  // 0.108 below the 0.2 gate
  }
  SUBCASE("sup: trajectory is identically one") {
    const SupFunctional F(4);
    const ProbeReport rep = downward_probe(F, seq, 1e-6);
    for (double v : rep.observed) CHECK(v == 1.0);
    CHECK(rep.verdict == "not-downward-continuous");
  }
  SUBCASE("zero sequence evaluates to zero") {
    const EntropicFunctional F = dyadic_entropic(4);
    const FuncSequence zeros = make_sequence(
        SeqKind::UserList, SeqDirection::Down,
        {Vector::Zero(4), Vector::Zero(4), Vector::Zero(4)}, 0.0);
    const ProbeReport rep = downward_probe(F, zeros, 1e-9);
    for (double v : rep.observed) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.pass);
  }
}

TEST_CASE("downward sandwich inequality holds term by term for the zoo") {
  const FamilyInstance inst = make_instance({}, 5);
  const FuncSequence seq = tail_indicator_sequence(inst);
  Rng rng(7);
  std::vector<Vector> fs;
  for (int i = 0; i < 5; ++i) fs.push_back(rng.uniform_vector(5, -2.0, 2.0));
  const EntropicFunctional ent = dyadic_entropic(5);
  const SupFunctional sup(5);
  for (const Functional* F :
       {static_cast<const Functional*>(&ent), static_cast<const Functional*>(&sup)}) {
    const ProbeReport rep = downward_probe(*F, seq, 1e-6, fs);
    CHECK(rep.verdict != "sandwich-violated");
    for (const Vector& f : fs) {
      for (const Vector& h : seq.terms) {
        const double lo = (*F)(f) - (*F)(f - h);
        const double hi = (*F)(f + h) - (*F)(f);
        CHECK(lo >= -1e-9);
        CHECK(lo <= hi + 1e-9);
      }
    }
  }
}

TEST_CASE("fatou_probe") {
  const FamilyInstance inst = make_instance({}, 4);
  SUBCASE("monotone convergence reduces to upward continuity") {
    const EntropicFunctional F = dyadic_entropic(4);
    Vector f = Vector::Constant(4, 1.0);
    std::vector<Vector> terms;
    for (int n = 1; n <= 12; ++n) terms.push_back(f.array() - std::pow(2.0, -n));
    const ProbeReport rep = fatou_probe(F, terms, f, 2.0, 1e-2);
    CHECK(rep.pass);
  }
  SUBCASE("single-point indicators under sup: strict inequality, still passes") {
    const SupFunctional F(4);
    const FuncSequence seq = single_point_indicator_sequence(inst);
    const ProbeReport rep = fatou_probe(F, seq.terms, Vector::Zero(4), 1.0, 1e-8);
    CHECK(rep.pass);
    for (double v : rep.observed) CHECK(v == 1.0);  // liminf 1 >= F(0) = 0
  }
  SUBCASE("constant sequence gives equality") {
    const SupFunctional F(4);
    Vector f(4);
    f << 0.5, 0.1, -0.2, 0.0;
    const ProbeReport rep = fatou_probe(F, {f, f, f}, f, 1.0, 1e-12);
    CHECK(rep.pass);
  }
  SUBCASE("bound violation throws") {
    const SupFunctional F(4);
    CHECK_THROWS_AS(fatou_probe(F, {Vector::Constant(4, 3.0)}, Vector::Zero(4), 1.0, 1e-8),
                    std::invalid_argument);
  }
}

TEST_CASE("lebesgue_probe verdicts") {
  const FamilyInstance inst = make_instance({}, 16);
  const FuncSequence seq = single_point_indicator_sequence(inst);
  SUBCASE("max functional never lets go") {
    const SupFunctional F(16);
    const ProbeReport rep = lebesgue_probe(F, seq.terms, 1e-3);
    for (double v : rep.observed) CHECK(v == 1.0);
    CHECK(rep.verdict == "fails-lebesgue");
  }
  SUBCASE("dyadic entropic decays") {
    const EntropicFunctional F =
        EntropicFunctional::from_log_weights(geometric_log_weights(16, 0.5));
    const ProbeReport rep = lebesgue_probe(F, seq.terms, 1e-3);
    CHECK(rep.verdict == "has-lebesgue");
    // F(e_n) = log(1 + (e-1) p_n), frozen against the direct formula.
    const Vector lw = geometric_log_weights(16, 0.5);
    const double p16 = std::exp(lw[15]);
    CHECK(rep.observed.back() ==
          doctest::Approx(std::log1p((std::exp(1.0) - 1.0) * p16)).epsilon(1e-9));
  }
  SUBCASE("zero sequence") {
    const SupFunctional F(16);
    std::vector<Vector> zeros(4, Vector::Zero(16));
    const ProbeReport rep = lebesgue_probe(F, zeros, 1e-9);
    CHECK(rep.verdict == "has-lebesgue");
  }
}

TEST_CASE("max_linear_under_kl matches the independent binary-split oracle") {
  // Indicator tails reduce exactly to the two-point problem.
  for (double ratio : {0.5, 0.1}) {
    for (double m : {0.1, 0.5, 1.0}) {
      for (int n : {2, 3, 5}) {
        const int N = 6;
        const Vector log_p = geometric_log_weights(N, ratio);
        Vector h = Vector::Zero(N);
        for (int k = n; k <= N; ++k) h[k - 1] = 1.0;
        double log_q = -kInf;
        for (int k = n; k <= N; ++k) {
          Vector pair(2);
          pair << log_q, log_p[k - 1];
          log_q = log_sum_exp(pair);
        }
        const TiltResult tilt = max_linear_under_kl(log_p, h, m);
        const double brute = oracle::brute_max_tail_mass(log_q, m);
        CHECK(tilt.value == doctest::Approx(brute).epsilon(1e-7));
        CHECK(tilt.kl <= m + 1e-9);
        // The maximizer is a genuine probability in the sublevel set.
        CHECK(tilt.maximizer.sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(oracle::brute_kl(tilt.maximizer, Vector(log_p.array().exp())) <= m + 1e-6);
      }
    }
  }
  // Constraint slack: with a huge budget the whole mass moves to the tail.
  const Vector log_p = geometric_log_weights(4, 0.5);
  Vector h = Vector::Zero(4);
  h[3] = 1.0;
  CHECK(max_linear_under_kl(log_p, h, 100.0).value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("tightness_probe: entropic tight, sup not, explicit list trivially tight") {
  SweepOptions opts;
  opts.levels = {4, 8, 16};
  opts.tol = 1e-2;

  SUBCASE("entropic with aggressive geometric reference") {
    TightnessSubject subject;
    subject.kind = TightnessSubject::Kind::EntropicGeometric;
    subject.ratio = 1e-8;
    const TightnessReport rep = tightness_probe(subject, 0.5, opts);
    CHECK(rep.verdict == "tight");
    for (const auto& sups : rep.per_term_sup) {
      for (std::size_t i = 0; i + 1 < sups.size(); ++i) {
        CHECK(sups[i + 1] <= sups[i] + 1e-9);
      }
    }
    // Deepest-cut sup shrinks with the level.
    CHECK(rep.final_per_level.back() < rep.final_per_level.front());
  }
  SUBCASE("sup functional: Dirac on the tail keeps the sup at one") {
    TightnessSubject subject;
    subject.kind = TightnessSubject::Kind::Sup;
    const TightnessReport rep = tightness_probe(subject, 0.0, opts);
    CHECK(rep.verdict == "not-tight");
    for (const auto& sups : rep.per_term_sup) {
      for (double v : sups) CHECK(v == 1.0);
    }
  }
  SUBCASE("single finitely-supported measure") {
    TightnessSubject subject;
    subject.kind = TightnessSubject::Kind::ExplicitList;
    Vector mu = Vector::Zero(8);
    mu[0] = 0.7;
    subject.measures = {mu};
    SweepOptions single;
    single.levels = {8};
    single.tol = 1e-9;
    const TightnessReport rep = tightness_probe(subject, 1.0, single);
    CHECK(rep.verdict == "tight");
    CHECK(rep.final_per_level.back() == 0.0);
  }
  SUBCASE("negative m is an empty sublevel set, reported not thrown") {
    TightnessSubject subject;
    const TightnessReport rep = tightness_probe(subject, -1.0, opts);
    CHECK(rep.verdict == "inconclusive");
  }
}

TEST_CASE("attainment_probe: escape for max-over-K, attainment for entropic") {
  SweepOptions opts;
  opts.levels = {4, 8, 16};
  opts.tol = 1e-6;
  SUBCASE("max over K with interior measures: gap exactly 1/N, Dirac slides to 0") {
    const AttainmentReport rep =
        attainment_probe(max_over_K(), one_minus_inverse_on_K(), opts);
    REQUIRE(rep.per_level.size() == 3);
    for (const auto& l : rep.per_level) {
      CHECK(l.gap == doctest::Approx(1.0 / l.level).epsilon(1e-12));
      CHECK(l.escape_distance == doctest::Approx(1.0 / l.level).epsilon(1e-12));
      CHECK(l.top_point == (l.level == 1 ? "1" : "1/" + std::to_string(l.level)));
    }
    CHECK(rep.verdict == "escaping");
  }
  SUBCASE("entropic attains via Gibbs with a stable optimizer") {
    const AttainmentReport rep =
        attainment_probe(entropic_geometric(1e-8), one_minus_inverse_on_X(), opts);
    for (const auto& l : rep.per_level) {
      CHECK(std::abs(l.gap) <= 1e-8);
      CHECK(l.top_point == "1");
    }
    CHECK(rep.verdict == "attained");
  }
}

TEST_CASE("mass_escape: boundary-adjacent mass and slope") {
  std::vector<FamilyInstance> instances;
  std::vector<Vector> dirac_deep, dirac_first;
  for (int level : {4, 8, 16}) {
    instances.push_back(make_instance({}, level));
    Vector deep = Vector::Zero(level);
    deep[level - 1] = 1.0;
    dirac_deep.push_back(deep);
    Vector first = Vector::Zero(level);
    first[0] = 1.0;
    dirac_first.push_back(first);
  }
  SUBCASE("escaping Diracs concentrate at the boundary, slope about -1") {
    const EscapeSummary sum = mass_escape(dirac_deep, instances, {0.5, 0.3});
    for (std::size_t l = 0; l < sum.levels.size(); ++l) {
      CHECK(sum.boundary_mass[l][0] == 1.0);  // 1/N within 0.5 of 0
      CHECK(sum.escape_distance[l] == doctest::Approx(1.0 / sum.levels[l]));
    }
    CHECK(sum.slope == doctest::Approx(-1.0).epsilon(1e-9));
  }
  SUBCASE("fixed-support optimizer stays clear below its distance") {
    const EscapeSummary sum = mass_escape(dirac_first, instances, {0.5, 0.999});
    for (std::size_t l = 0; l < sum.levels.size(); ++l) {
      CHECK(sum.boundary_mass[l][0] == 0.0);  // point 1 is at distance 1
      CHECK(sum.escape_distance[l] == 1.0);
    }
  }
}

TEST_CASE("compact_support_probe") {
  SweepOptions opts;
  opts.seed = 11;
  SUBCASE("prefix tables factorize exactly") {
    opts.levels = {4, 8, 16};
    const ProbeReport rep = compact_support_probe(TableRule::Prefix, opts, 50);
    CHECK(rep.verdict == "factorized");
    for (double v : rep.observed) CHECK(v == 0.0);
  }
  SUBCASE("escaping Dirac tables force divergence: F(h) >= n at level n") {
    opts.levels = {1, 2, 3, 4, 5, 6, 7, 8};
    const ProbeReport rep = compact_support_probe(TableRule::Escaping, opts, 10);
    CHECK(rep.verdict == "divergent");
    for (std::size_t i = 0; i < rep.observed.size(); ++i) {
      CHECK(rep.observed[i] >= static_cast<double>(opts.levels[i]) - 1e-9);
    }
  }
  SUBCASE("empty effective table is identically zero and factorizes") {
    opts.levels = {4, 8};
    const ProbeReport rep = compact_support_probe(TableRule::EmptyEffective, opts, 20);
    CHECK(rep.verdict == "factorized");
  }
}
