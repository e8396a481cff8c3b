#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "anyonlab/library.hpp"
#include "anyonlab/state.hpp"

using namespace al;

namespace {

std::shared_ptr<const TargetBasis> basis_for(AnyonModel m) {
  return std::make_shared<TargetBasis>(std::make_shared<const AnyonModel>(std::move(m)));
}

bool check_passed(const ValidationReport& rep, const std::string& name) {
  const auto* c = rep.find(name);
  REQUIRE(c);
  return c->passed;
}

// Random pure state supported on a random subset of basis states.
PairDensityMatrix random_pure(const std::shared_ptr<const TargetBasis>& basis, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<std::pair<BasisState, cplx>> amps;
  double norm = 0.0;
  for (const auto& s : basis->states()) {
    cplx z(g(rng), g(rng));
    amps.emplace_back(s, z);
    norm += std::norm(z);
  }
  for (auto& [s, z] : amps) z /= std::sqrt(norm);
  return PairDensityMatrix::from_pure(basis, amps);
}

}  // namespace

TEST_CASE("basis enumeration") {
  auto is = basis_for(ising());
  // Ising pairs: (1,1),(1,s),(1,p),(s,1),(s,s)x2,(s,p),(p,1),(p,s),(p,p) = 10 states.
  CHECK(is->size() == 10);
  CHECK(is->pairs().size() == 9);
  const Index s = 1, p = 2;
  CHECK(is->find({s, s, 0, 0}) >= 0);
  CHECK(is->find({s, s, s, 0}) < 0);
  CHECK_THROWS_AS(is->require({s, p, 0, 0}), Error);
  for (int i = 0; i < is->size(); ++i) CHECK(is->pair_of(i) >= 0);
}

TEST_CASE("from_pure builds projectors") {
  auto b = basis_for(ising());
  const Index one = 0, s = 1, p = 2;
  auto r1 = PairDensityMatrix::from_pure(b, {{{s, s, one}, 1.0}});
  CHECK(r1.coeff({s, s, one}, {s, s, one}) == cplx(1.0));
  CHECK(r1.matrix().cwiseAbs().sum() == doctest::Approx(1.0));

  const double h = 1.0 / std::sqrt(2.0);
  auto r2 = PairDensityMatrix::from_pure(b, {{{one, one, one}, h}, {{p, p, one}, h}});
  for (BasisState x : {BasisState{one, one, one}, BasisState{p, p, one}})
    for (BasisState y : {BasisState{one, one, one}, BasisState{p, p, one}})
      CHECK(std::abs(r2.coeff(x, y) - 0.5) < 1e-15);
  CHECK(check_state(r2).passed());

  auto fb = basis_for(fib());
  const cplx alpha(0.6, 0.0), beta(0.0, 0.8);
  auto r3 = PairDensityMatrix::from_pure(fb, {{{1, 1, 0}, alpha}, {{1, 1, 1}, beta}});
  CHECK(r3.coeff({1, 1, 0}, {1, 1, 1}) == cplx{});
  CHECK(r3.coeff({1, 1, 1}, {1, 1, 0}) == cplx{});
  CHECK(std::abs(r3.coeff({1, 1, 0}, {1, 1, 0}) - 0.36) < 1e-15);
  CHECK(std::abs(r3.coeff({1, 1, 1}, {1, 1, 1}) - 0.64) < 1e-15);
  CHECK(check_state(r3).passed());

  CHECK_THROWS_AS(PairDensityMatrix::from_pure(b, {{{s, s, one}, 0.9}}), Error);
}

TEST_CASE("quantum and standard traces") {
  auto b = basis_for(ising());
  const Index one = 0, s = 1, p = 2;
  auto r = PairDensityMatrix::from_pure(b, {{{s, s, p}, 1.0}});
  CHECK(std::abs(quantum_trace(r) - 1.0) < 1e-15);
  CHECK(std::abs(standard_trace(r) - 1.0) < 1e-15);
  auto scaled = r;
  scaled *= 2.0;
  CHECK(std::abs(quantum_trace(scaled) - 2.0) < 1e-15);

  auto fb = basis_for(fib());
  auto e = PairDensityMatrix::from_pure(fb, {{{1, 1, 1}, 1.0}});
  CHECK(std::abs(standard_trace(e) - 1.0 / std::numbers::phi) < 1e-12);

  auto vac = PairDensityMatrix::from_pure(b, {{{one, one, one}, 0.6}, {{s, s, one}, 0.8}});
  CHECK(std::abs(standard_trace(vac) - quantum_trace(vac)) < 1e-15);

  auto mix = PairDensityMatrix::from_pure(b, {{{s, s, one}, 1.0}});
  mix *= 0.3;
  auto other = vac;
  other *= 0.7;
  mix += other;
  CHECK(std::abs(quantum_trace(mix) - 1.0) < 1e-15);
  CHECK(check_state(mix).passed());
}

TEST_CASE("partner trace gives the target marginal") {
  auto b = basis_for(ising());
  const Index one = 0, s = 1, p = 2;
  const double h = 1.0 / std::sqrt(2.0);
  auto pr = trace_out_partner(PairDensityMatrix::from_pure(b, {{{one, one, one}, h}, {{p, p, one}, h}}));
  CHECK(pr.at(one) == doctest::Approx(0.5));
  CHECK(pr.at(p) == doctest::Approx(0.5));
  CHECK(pr[s] == 0.0);

  auto sp = trace_out_partner(PairDensityMatrix::from_pure(b, {{{s, s, one}, 1.0}}));
  CHECK(sp.at(s) == doctest::Approx(1.0));

  auto fb = basis_for(fib());
  auto mixed = PairDensityMatrix::from_entries(fb, {{{0, 1, 1}, {0, 1, 1}, 0.25}, {{1, 1, 0}, {1, 1, 0}, 0.75}});
  auto fp = trace_out_partner(mixed);
  CHECK(fp.at(0) == doctest::Approx(0.25));
  CHECK(fp.at(1) == doctest::Approx(0.75));
  CHECK(check_state(mixed).passed());
}

TEST_CASE("check_state flags each broken invariant") {
  auto b = basis_for(ising());
  const Index one = 0, p = 2;
  auto bad = PairDensityMatrix::from_entries(
      b, {{{one, one, one}, {one, one, one}, 0.5}, {{p, p, one}, {p, p, one}, 0.5}, {{one, one, one}, {p, p, one}, 0.6}});
  auto rep = check_state(bad);
  CHECK_FALSE(rep.passed());
  CHECK_FALSE(check_passed(rep, "positivity"));
  CHECK(check_passed(rep, "hermiticity"));
  CHECK(check_passed(rep, "unit quantum trace"));

  auto nonherm = PairDensityMatrix::from_entries(b, {{{one, one, one}, {one, one, one}, 1.0}});
  nonherm.set({one, one, one}, {p, p, one}, 0.1);
  CHECK_FALSE(check_passed(check_state(nonherm), "hermiticity"));

  auto cross = PairDensityMatrix::from_entries(b, {{{one, one, one}, {one, one, one}, 1.0}});
  cross.matrix()(b->require({one, one, one}), b->require({p, 1, 1})) = 0.2;
  cross.matrix()(b->require({p, 1, 1}), b->require({one, one, one})) = 0.2;
  CHECK_FALSE(check_passed(check_state(cross), "charge conservation"));
  CHECK_THROWS_AS(cross.set({one, one, one}, {p, 1, 1}, 0.1), Error);

  // Moore-Read pair superposing target charges with different quasihole counts.
  auto mb = basis_for(moore_read());
  const auto& mr = mb->model();
  const Index a0 = mr.vacuum(), a1 = mr.index("(sigma,[1]_8)");
  const Index c1 = mr.conjugate(a1);
  const double h = 1.0 / std::sqrt(2.0);
  auto sup = PairDensityMatrix::from_pure(mb, {{{a0, a0, a0}, h}, {{a1, c1, a0}, h}});
  CHECK(check_state(sup).passed());
  sup.use_electric_superselection();
  auto srep = check_state(sup);
  CHECK_FALSE(check_passed(srep, "superselection"));
  CHECK(check_passed(srep, "positivity"));

  auto ok = PairDensityMatrix::from_pure(mb, {{{a1, c1, a0}, 1.0}});
  ok.use_electric_superselection();
  CHECK(check_state(ok).passed());

  auto fb = basis_for(fib());
  auto plain = PairDensityMatrix::from_pure(fb, {{{1, 1, 1}, 1.0}});
  CHECK_THROWS_AS(plain.use_electric_superselection(), Error);
}

TEST_CASE("random convex combinations stay valid and traces are linear") {
  std::mt19937_64 rng(20261016);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto model : {ising(), fib(), z_n(4, 1)}) {
    auto b = basis_for(model);
    for (int trial = 0; trial < 20; ++trial) {
      auto x = random_pure(b, rng);
      auto y = random_pure(b, rng);
      CHECK(check_state(x).passed());
      const double w = u(rng);
      auto mix = x;
      mix *= w;
      auto rest = y;
      rest *= 1.0 - w;
      mix += rest;
      CHECK(check_state(mix).passed());
      CHECK(std::abs(standard_trace(mix) - (w * standard_trace(x) + (1 - w) * standard_trace(y))) < 1e-12);
      double total = 0.0;
      auto px = trace_out_partner(x), pm = trace_out_partner(mix), py = trace_out_partner(y);
      for (auto [a, prob] : pm) {
        total += prob;
        CHECK(std::abs(prob - (w * px[a] + (1 - w) * py[a])) < 1e-12);
      }
      CHECK(std::abs(total - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("identity channel transform leaves the state unchanged") {
  std::mt19937_64 rng(7);
  for (auto model : {ising(), fib(), moore_read()}) {
    auto b = basis_for(model);
    auto x = random_pure(b, rng);
    auto y = x.transform_channels([](Index, Index, Index) { return cplx(1.0); });
    CHECK(state_distance(x, y) < 1e-12);
  }
}
