#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "anyonlab/library.hpp"

using namespace al;

namespace {
const double kPi = std::numbers::pi;
const double kPhi = std::numbers::phi;
cplx phase(double x) { return std::polar(1.0, x); }
}  // namespace

TEST_CASE("Z_N family") {
  auto z = z_n(10, 6);
  CHECK(z.size() == 10);
  CHECK(z.label(3) == "[3]_10");
  for (Index a = 0; a < 10; ++a) CHECK(std::abs(z.theta(a) - phase(2 * kPi * 3 * a * a / 10.0)) < 1e-12);
  // Half-integer w needs even N.
  CHECK_THROWS_AS(z_n(5, 1), Error);
  auto half = z_n(8, 1);
  // F phase for w = n + 1/2: [F^{abc}]_{[a+b],[b+c]} = exp(i pi a (b + c - [b+c]) / N).
  CHECK(std::abs(half.F(3, 5, 6, (3 + 5 + 6) % 8, 0, 3) - phase(kPi / 8 * 3 * 8)) < 1e-12);
  CHECK(std::abs(half.F(1, 2, 3, 6, 3, 5) - 1.0) < 1e-12);
}

TEST_CASE("Fib and its conjugate") {
  auto f = fib();
  CHECK(std::abs(f.R(1, 1, 0) - phase(-4 * kPi / 5)) < 1e-12);
  CHECK(std::abs(f.R(1, 1, 1) - phase(3 * kPi / 5)) < 1e-12);
  auto fb = fib_bar();
  CHECK(std::abs(fb.R(1, 1, 0) - phase(4 * kPi / 5)) < 1e-12);
  Eigen::MatrixXcd want(2, 2);
  want << 1 / kPhi, 1 / std::sqrt(kPhi), 1 / std::sqrt(kPhi), -1 / kPhi;
  for (const auto& m : {f, fb}) CHECK((m.upper_block(1, 1, 1, 1).matrix - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Ising table entries") {
  auto m = ising();
  const Index s = 1, p = 2;
  Eigen::MatrixXcd want(2, 2);
  want << 1, 1, 1, -1;
  CHECK((m.upper_block(s, s, s, s).matrix - want / std::sqrt(2.0)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(m.F(s, p, s, p, s, s) + 1.0) < 1e-12);
  CHECK(std::abs(m.R(p, p, 0) + 1.0) < 1e-12);
}

TEST_CASE("direct products multiply every symbol") {
  auto prod = direct_product(fib_bar(), z_n(10, 6));
  CHECK(prod.total_dimension() == doctest::Approx(std::sqrt(10 * (kPhi + 2))).epsilon(1e-12));

  auto iz = direct_product(ising(), z_n(8, 1));
  const Index sz = iz.index("(sigma,[1]_8)");
  CHECK(std::abs(iz.theta(sz) - phase(kPi / 4)) < 1e-12);

  auto is = ising();
  auto z = z_n(8, 1);
  for (Index a = 0; a < iz.size(); ++a)
    for (Index b = 0; b < iz.size(); ++b) {
      const Index al = a / 8, az = a % 8, bl = b / 8, bz = b % 8;
      CHECK(std::abs(iz.M()(a, b) - is.M()(al, bl) * z.M()(az, bz)) < 1e-12);
      CHECK(std::abs(iz.S()(a, b) - is.S()(al, bl) * z.S()(az, bz)) < 1e-12);
    }
  for (Index a = 0; a < iz.size(); ++a) CHECK(iz.d(a) == doctest::Approx(is.d(a / 8) * z.d(a % 8)));

  auto same = direct_product(fib(), trivial_model());
  auto f = fib();
  CHECK(same.size() == 2);
  CHECK(same.label(1) == "(eps,1)");
  CHECK((same.S() - f.S()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(same.theta(1) - f.theta(1)) < 1e-12);
}

TEST_CASE("restriction recomputes D and S") {
  auto mr = moore_read();
  CHECK(mr.size() == 12);
  CHECK(mr.total_dimension() == doctest::Approx(4.0).epsilon(1e-12));
  auto is = ising();
  auto z = z_n(8, 1);
  // S picks up sqrt(2) relative to the product of component S-matrices.
  for (Index a = 0; a < mr.size(); ++a)
    for (Index b = 0; b < mr.size(); ++b) {
      const auto& la = mr.label(a);
      const auto& lb = mr.label(b);
      auto split = [&](const std::string& l) {
        auto comma = l.find(',');
        return std::make_pair(is.index(l.substr(1, comma - 1)), z.index(l.substr(comma + 1, l.size() - comma - 2)));
      };
      auto [ai, az] = split(la);
      auto [bi, bz] = split(lb);
      CHECK(std::abs(mr.S()(a, b) - std::sqrt(2.0) * is.S()(ai, bi) * z.S()(az, bz)) < 1e-12);
      CHECK(std::abs(mr.M()(a, b) - is.M()(ai, bi) * z.M()(az, bz)) < 1e-12);
    }

  auto full = ising();
  auto again = restrict_model(full, {0, 1, 2});
  CHECK((again.S() - full.S()).cwiseAbs().maxCoeff() < 1e-12);

  auto iz = direct_product(ising(), z_n(8, 1));
  std::vector<Index> even;
  for (int k = 0; k < 8; k += 2) even.push_back(iz.index("(1,[" + std::to_string(k) + "]_8)"));
  auto sub = restrict_model(iz, even);
  CHECK(sub.size() == 4);
  for (Index a = 0; a < 4; ++a) CHECK(sub.fusion().is_abelian(a));
  CHECK(sub.verify().passed());

  CHECK_THROWS_AS(restrict_model(iz, {iz.vacuum(), iz.index("(sigma,[1]_8)")}), Error);
}

TEST_CASE("quantum Hall models and their charge metadata") {
  auto mr = moore_read();
  REQUIRE(mr.fqh());
  CHECK(mr.label(mr.fqh()->quasihole) == "(sigma,[1]_8)");
  CHECK(mr.label(mr.fqh()->electron) == "(psi,[4]_8)");
  CHECK(mr.fqh()->charge_denominator == 4);

  auto rr = rr_bar_31();
  CHECK(rr.label(rr.fqh()->quasihole) == "(eps,[1]_10)");
  CHECK(rr.label(rr.fqh()->electron) == "(1,[5]_10)");
  CHECK(rr.fqh()->charge_denominator == 5);

  CHECK(hierarchy_p(1, 3) == 1);
  CHECK(hierarchy_p(2, 5) == 3);
  CHECK(hierarchy_p(3, 7) == 5);
  auto h = hierarchy(1, 3);
  CHECK(h.size() == 6);
  CHECK(std::abs(h.theta(h.fqh()->quasihole) - phase(kPi / 3)) < 1e-12);
  CHECK(h.label(h.fqh()->electron) == "[3]_6");
  for (auto [n, m] : {std::pair{1, 3}, {2, 5}, {3, 7}, {1, 5}}) {
    auto hm = hierarchy(n, m);
    const int p = hierarchy_p(n, m);
    CHECK(std::abs(hm.theta(1) - phase(kPi * p / m)) < 1e-12);
  }
  CHECK_THROWS_AS(hierarchy(1, 4), Error);

  for (const auto& m : {mr, rr, h}) {
    auto rep = m.verify();
    const auto* add = rep.find("electric charge additivity");
    REQUIRE(add);
    CHECK(add->passed);
  }
}

TEST_CASE("built-in names") {
  CHECK(builtin_model("ising").name() == "ising");
  CHECK(builtin_model("z_n(8,1/2)").name() == "z_n(8,1/2)");
  CHECK(builtin_model("Z_N(8, 0.5)").name() == "z_n(8,1/2)");
  CHECK(builtin_model("z_n(10,3)").name() == "z_n(10,3)");
  CHECK(builtin_model("hierarchy(1,3)").size() == 6);
  CHECK_THROWS_AS(builtin_model("su2_5"), Error);
}
