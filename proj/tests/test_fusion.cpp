#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "anyonlab/fusion.hpp"
#include "anyonlab/library.hpp"

using namespace al;

namespace {

bool has_violation(const std::vector<FusionViolation>& vs, const std::string& axiom, const std::string& where) {
  for (const auto& v : vs)
    if (v.axiom == axiom && v.where == where) return true;
  return false;
}

}  // namespace

TEST_CASE("fuse lists channels with multiplicities in index order") {
  auto m = ising();
  const auto& r = m.fusion();
  auto out = r.fuse(r.index("sigma"), r.index("sigma"));
  REQUIRE(out.size() == 2);
  CHECK(r.label(out[0].first) == "1");
  CHECK(out[0].second == 1);
  CHECK(r.label(out[1].first) == "psi");

  auto f = fib().fusion();
  auto ee = f.fuse(f.index("eps"), f.index("eps"));
  REQUIRE(ee.size() == 2);
  CHECK(f.label(ee[0].first) == "1");
  CHECK(f.label(ee[1].first) == "eps");

  for (Index a = 0; a < r.size(); ++a) {
    auto v = r.fuse(r.vacuum(), a);
    REQUIRE(v.size() == 1);
    CHECK(v[0].first == a);
  }
  CHECK_THROWS_AS(r.fuse(0, 7), Error);
  CHECK_THROWS_AS(r.index("tau"), Error);
}

TEST_CASE("greek spellings resolve to ascii labels") {
  auto r = ising().fusion();
  CHECK(r.index("\xcf\x83") == r.index("sigma"));
  CHECK(r.index("\xcf\x88") == r.index("psi"));
  CHECK(normalize_label("(\xce\xb5,[1]_10)") == "(eps,[1]_10)");
}

TEST_CASE("conjugates") {
  auto r = ising().fusion();
  CHECK(r.conjugate(r.index("sigma")) == r.index("sigma"));
  CHECK(r.conjugate(r.vacuum()) == r.vacuum());
  auto z = z_n(8, 1).fusion();
  CHECK(z.label(z.conjugate(z.index("[3]_8"))) == "[5]_8");
  for (Index a = 0; a < z.size(); ++a) CHECK(z.conjugate(z.conjugate(a)) == a);
}

TEST_CASE("quantum dimensions from the Perron-Frobenius eigenvalue") {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  auto f = fib().fusion();
  CHECK(f.quantum_dimension(f.index("eps")) == doctest::Approx(phi).epsilon(1e-12));
  CHECK(f.quantum_dimension(f.vacuum()) == doctest::Approx(1.0));
  auto r = ising().fusion();
  CHECK(r.quantum_dimension(r.index("sigma")) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r.total_dimension() == doctest::Approx(2.0).epsilon(1e-12));

  // d_a d_b = sum_c N_ab^c d_c and D^2 = sum d^2 for every built-in algebra.
  for (const auto& m : {ising(), fib(), z_n(8, 1), moore_read(), rr_bar_31()}) {
    const auto& rules = m.fusion();
    const auto& d = rules.quantum_dimensions();
    double sq = 0.0;
    for (Index a = 0; a < rules.size(); ++a) {
      sq += d[a] * d[a];
      for (Index b = 0; b < rules.size(); ++b) {
        double s = 0.0;
        for (Index c = 0; c < rules.size(); ++c) s += rules.N(a, b, c) * d[c];
        CHECK(std::abs(d[a] * d[b] - s) < 1e-9);
      }
    }
    CHECK(std::abs(rules.total_dimension() * rules.total_dimension() - sq) < 1e-12);
  }
}

TEST_CASE("abelian test agrees with the dimension criterion") {
  auto z = z_n(5, 2).fusion();
  for (Index a = 0; a < z.size(); ++a) CHECK(z.is_abelian(a));
  auto r = ising().fusion();
  CHECK_FALSE(r.is_abelian(r.index("sigma")));
  CHECK(r.is_abelian(r.vacuum()));
  CHECK(r.is_abelian(r.index("psi")));
}

TEST_CASE("validation of the fusion axioms") {
  CHECK(ising().fusion().validate().empty());
  CHECK(fib().fusion().validate().empty());
  CHECK(moore_read().fusion().validate().empty());

  // N_{a1}^b = 1 for b != a breaks the vacuum axiom.
  FusionRules bad_vacuum({"1", "x"}, 0, {{0, 0, 0, 1}, {0, 1, 1, 1}, {1, 0, 1, 1}, {1, 0, 0, 1}, {1, 1, 0, 1}});
  CHECK(has_violation(bad_vacuum.validate(), "vacuum", "(x,1,1)"));

  // "x" never fuses to the vacuum, so it lacks a conjugate.
  FusionRules no_conj({"1", "x"}, 0, {{0, 0, 0, 1}, {0, 1, 1, 1}, {1, 0, 1, 1}, {1, 1, 1, 1}});
  auto v = no_conj.validate();
  CHECK(has_violation(v, "conjugation", "(x)"));
  CHECK_THROWS_AS(no_conj.conjugate(1), Error);

  FusionRules noncomm({"1", "x", "y"}, 0,
                      {{0, 0, 0, 1}, {0, 1, 1, 1}, {1, 0, 1, 1}, {0, 2, 2, 1}, {2, 0, 2, 1},
                       {1, 1, 0, 1}, {2, 2, 0, 1}, {1, 2, 1, 1}, {2, 1, 2, 1}});
  CHECK(has_violation(noncomm.validate(), "commutativity", "(x,y,x)"));
}

TEST_CASE("label uniqueness is enforced") {
  CHECK_THROWS_AS(FusionRules({"1", "1"}, 0, {{0, 0, 0, 1}}), Error);
}
