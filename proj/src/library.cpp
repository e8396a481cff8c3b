#include "anyonlab/library.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <regex>

namespace al {

namespace {

constexpr double kPi = std::numbers::pi;
const double kPhi = std::numbers::phi;

cplx phase(double angle) { return std::polar(1.0, angle); }

using FKey = std::tuple<Index, Index, Index, Index, Index, Index>;

// Multiplicity-free table where every admissible symbol is 1 unless overridden.
std::vector<FEntry> default_f(const FusionRules& rules, const std::map<FKey, cplx>& overrides) {
  std::vector<FEntry> out;
  const int n = rules.size();
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b)
      for (Index c = 0; c < n; ++c)
        for (Index d = 0; d < n; ++d)
          for (Index e = 0; e < n; ++e) {
            if (!rules.N(a, b, e) || !rules.N(e, c, d)) continue;
            for (Index f = 0; f < n; ++f) {
              if (!rules.N(b, c, f) || !rules.N(a, f, d)) continue;
              auto it = overrides.find({a, b, c, d, e, f});
              out.push_back({a, b, c, d, e, f, 0, 0, 0, 0, it == overrides.end() ? cplx{1.0} : it->second});
            }
          }
  return out;
}

std::vector<REntry> default_r(const FusionRules& rules,
                              const std::map<std::tuple<Index, Index, Index>, cplx>& overrides) {
  std::vector<REntry> out;
  const int n = rules.size();
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b)
      for (Index c = 0; c < n; ++c) {
        if (!rules.N(a, b, c)) continue;
        auto it = overrides.find({a, b, c});
        out.push_back({a, b, c, 0, 0, it == overrides.end() ? cplx{1.0} : it->second});
      }
  return out;
}

std::string zn_label(int k, int n) { return "[" + std::to_string(k) + "]_" + std::to_string(n); }

AnyonModel fib_with_chirality(bool conjugate) {
  FusionRules rules({"1", "eps"}, 0, {{0, 0, 0, 1}, {0, 1, 1, 1}, {1, 0, 1, 1}, {1, 1, 0, 1}, {1, 1, 1, 1}});
  const Index one = 0, eps = 1;
  std::map<FKey, cplx> f;
  const double inv = 1.0 / kPhi, inv_sqrt = 1.0 / std::sqrt(kPhi);
  f[{eps, eps, eps, eps, one, one}] = inv;
  f[{eps, eps, eps, eps, one, eps}] = inv_sqrt;
  f[{eps, eps, eps, eps, eps, one}] = inv_sqrt;
  f[{eps, eps, eps, eps, eps, eps}] = -inv;
  const double sign = conjugate ? -1.0 : 1.0;
  std::map<std::tuple<Index, Index, Index>, cplx> r;
  r[{eps, eps, one}] = phase(sign * -4.0 * kPi / 5.0);
  r[{eps, eps, eps}] = phase(sign * 3.0 * kPi / 5.0);
  AnyonModel m(conjugate ? "fib_bar" : "fib", rules, default_f(rules, f), default_r(rules, r));
  m.set_expected({1.0, phase(sign * 4.0 * kPi / 5.0)}, {1.0, kPhi});
  return m;
}

}  // namespace

AnyonModel z_n(int n, int twice_w) {
  if (n < 1) fail(ErrorKind::invalid_argument, "Z_N needs N >= 1");
  if (twice_w % 2 != 0 && n % 2 != 0)
    fail(ErrorKind::invalid_argument, "half-integer w requires even N");
  std::vector<std::string> labels;
  for (int k = 0; k < n; ++k) labels.push_back(zn_label(k, n));
  std::vector<FusionEntry> entries;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) entries.push_back({a, b, (a + b) % n, 1});
  FusionRules rules(labels, 0, entries);

  const double w = twice_w / 2.0;
  std::vector<FEntry> f;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        const int bc = (b + c) % n;
        cplx value = 1.0;
        if (twice_w % 2 != 0) value = phase(kPi / n * a * (b + c - bc));
        f.push_back({a, b, c, (a + b + c) % n, (a + b) % n, bc, 0, 0, 0, 0, value});
      }
  std::vector<REntry> r;
  std::vector<cplx> spins;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) r.push_back({a, b, (a + b) % n, 0, 0, phase(2.0 * kPi * w * a * b / n)});
    spins.push_back(phase(2.0 * kPi * w * a * a / n));
  }
  std::string wtext = twice_w % 2 ? std::to_string(twice_w) + "/2" : std::to_string(twice_w / 2);
  AnyonModel m("z_n(" + std::to_string(n) + "," + wtext + ")", rules, f, r);
  m.set_expected(spins, std::vector<double>(n, 1.0));
  return m;
}

AnyonModel fib() { return fib_with_chirality(false); }
AnyonModel fib_bar() { return fib_with_chirality(true); }

AnyonModel ising() {
  const Index one = 0, sigma = 1, psi = 2;
  FusionRules rules({"1", "sigma", "psi"}, one,
                    {{one, one, one, 1}, {one, sigma, sigma, 1}, {one, psi, psi, 1},
                     {sigma, one, sigma, 1}, {psi, one, psi, 1},
                     {sigma, sigma, one, 1}, {sigma, sigma, psi, 1},
                     {sigma, psi, sigma, 1}, {psi, sigma, sigma, 1}, {psi, psi, one, 1}});
  const double h = 1.0 / std::sqrt(2.0);
  std::map<FKey, cplx> f;
  for (Index e : {one, psi})
    for (Index g : {one, psi}) f[{sigma, sigma, sigma, sigma, e, g}] = (e == psi && g == psi) ? -h : h;
  f[{sigma, psi, sigma, psi, sigma, sigma}] = -1.0;
  f[{psi, sigma, psi, sigma, sigma, sigma}] = -1.0;
  std::map<std::tuple<Index, Index, Index>, cplx> r;
  r[{sigma, sigma, one}] = phase(-kPi / 8.0);
  r[{sigma, sigma, psi}] = phase(3.0 * kPi / 8.0);
  r[{sigma, psi, sigma}] = phase(-kPi / 2.0);
  r[{psi, sigma, sigma}] = phase(-kPi / 2.0);
  r[{psi, psi, one}] = -1.0;
  AnyonModel m("ising", rules, default_f(rules, f), default_r(rules, r));
  m.set_expected({1.0, phase(kPi / 8.0), -1.0}, {1.0, std::sqrt(2.0), 1.0});
  return m;
}

AnyonModel trivial_model() {
  FusionRules rules({"1"}, 0, {{0, 0, 0, 1}});
  AnyonModel m("trivial", rules, {{0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1.0}}, {{0, 0, 0, 0, 0, 1.0}});
  m.set_expected({1.0}, {1.0});
  return m;
}

AnyonModel direct_product(const AnyonModel& left, const AnyonModel& right) {
  const int nl = left.size(), nr = right.size();
  auto idx = [nr](Index x, Index y) { return x * nr + y; };
  std::vector<std::string> labels;
  for (Index x = 0; x < nl; ++x)
    for (Index y = 0; y < nr; ++y) labels.push_back("(" + left.label(x) + "," + right.label(y) + ")");

  std::vector<FusionEntry> fusion;
  for (const auto& [lk, lm] : left.fusion().entries())
    for (const auto& [rk, rm] : right.fusion().entries())
      fusion.push_back({idx(std::get<0>(lk), std::get<0>(rk)), idx(std::get<1>(lk), std::get<1>(rk)),
                        idx(std::get<2>(lk), std::get<2>(rk)), lm * rm});
  FusionRules rules(labels, idx(left.vacuum(), right.vacuum()), fusion);

  // A product vertex index is (left index) * (right multiplicity) + (right index).
  auto greek = [&](int gl, int gr, Index a, Index b, Index c) {
    return gl * right.N(a, b, c) + gr;
  };
  std::vector<FEntry> f;
  const auto left_f = left.upper_entries(), right_f = right.upper_entries();
  f.reserve(left_f.size() * right_f.size());
  for (const auto& p : left_f)
    for (const auto& q : right_f) {
      f.push_back({idx(p.a, q.a), idx(p.b, q.b), idx(p.c, q.c), idx(p.d, q.d), idx(p.e, q.e), idx(p.f, q.f),
                   greek(p.alpha, q.alpha, q.a, q.b, q.e), greek(p.beta, q.beta, q.e, q.c, q.d),
                   greek(p.mu, q.mu, q.b, q.c, q.f), greek(p.nu, q.nu, q.a, q.f, q.d), p.value * q.value});
    }
  std::vector<REntry> r;
  for (const auto& p : left.r_entries())
    for (const auto& q : right.r_entries())
      r.push_back({idx(p.a, q.a), idx(p.b, q.b), idx(p.c, q.c), greek(p.mu, q.mu, q.a, q.b, q.c),
                   greek(p.nu, q.nu, q.a, q.b, q.c), p.value * q.value});

  AnyonModel m(left.name() + " x " + right.name(), rules, f, r);
  if (!left.expected_spins().empty() && !right.expected_spins().empty()) {
    std::vector<cplx> spins;
    std::vector<double> dims;
    for (Index x = 0; x < nl; ++x)
      for (Index y = 0; y < nr; ++y) {
        spins.push_back(left.expected_spins()[x] * right.expected_spins()[y]);
        if (!left.expected_dims().empty() && !right.expected_dims().empty())
          dims.push_back(left.expected_dims()[x] * right.expected_dims()[y]);
      }
    m.set_expected(spins, dims);
  }
  return m;
}

AnyonModel restrict_model(const AnyonModel& model, const std::vector<Index>& spectrum) {
  const int n = model.size();
  std::vector<Index> to_new(n, -1);
  std::vector<std::string> labels;
  for (Index a : spectrum) {
    if (a < 0 || a >= n) fail(ErrorKind::unknown_charge, "spectrum charge out of range");
    if (to_new[a] >= 0) continue;
    to_new[a] = static_cast<Index>(labels.size());
    labels.push_back(model.label(a));
  }
  if (to_new[model.vacuum()] < 0) fail(ErrorKind::invalid_model, "restricted spectrum must contain the vacuum");
  for (Index a : spectrum)
    if (to_new[model.conjugate(a)] < 0)
      fail(ErrorKind::invalid_model, "spectrum not closed under conjugation at " + model.label(a));
  for (Index a : spectrum)
    for (Index b : spectrum)
      for (Index c = 0; c < n; ++c)
        if (model.N(a, b, c) && to_new[c] < 0)
          fail(ErrorKind::invalid_model, "spectrum not closed under fusion at (" + model.label(a) + "," +
                                             model.label(b) + "," + model.label(c) + ")");

  std::vector<FusionEntry> fusion;
  for (const auto& [k, mult] : model.fusion().entries()) {
    auto [a, b, c] = k;
    if (to_new[a] >= 0 && to_new[b] >= 0 && to_new[c] >= 0)
      fusion.push_back({to_new[a], to_new[b], to_new[c], mult});
  }
  FusionRules rules(labels, to_new[model.vacuum()], fusion);

  std::vector<FEntry> f;
  for (auto e : model.upper_entries()) {
    if (to_new[e.a] < 0 || to_new[e.b] < 0 || to_new[e.c] < 0 || to_new[e.d] < 0) continue;
    e.a = to_new[e.a], e.b = to_new[e.b], e.c = to_new[e.c];
    e.d = to_new[e.d], e.e = to_new[e.e], e.f = to_new[e.f];
    f.push_back(e);
  }
  std::vector<REntry> r;
  for (auto e : model.r_entries()) {
    if (to_new[e.a] < 0 || to_new[e.b] < 0) continue;
    e.a = to_new[e.a], e.b = to_new[e.b], e.c = to_new[e.c];
    r.push_back(e);
  }
  AnyonModel out(model.name() + " restricted", rules, f, r);
  if (!model.expected_spins().empty()) {
    std::vector<cplx> spins(labels.size());
    std::vector<double> dims(model.expected_dims().empty() ? 0 : labels.size());
    for (Index a = 0; a < n; ++a) {
      if (to_new[a] < 0) continue;
      spins[to_new[a]] = model.expected_spins()[a];
      if (!dims.empty()) dims[to_new[a]] = model.expected_dims()[a];
    }
    out.set_expected(spins, dims);
  }
  return out;
}

AnyonModel moore_read() {
  AnyonModel product = direct_product(ising(), z_n(8, 1));
  std::vector<Index> spectrum;
  std::vector<int> counts;
  for (const char* x : {"1", "sigma", "psi"})
    for (int k = 0; k < 8; ++k) {
      const bool sigma = std::string(x) == "sigma";
      if (sigma != (k % 2 == 1)) continue;
      spectrum.push_back(product.index("(" + std::string(x) + "," + zn_label(k, 8) + ")"));
    }
  std::sort(spectrum.begin(), spectrum.end());
  AnyonModel m = restrict_model(product, spectrum);
  m.rename("moore_read");
  FqhChargeMeta meta;
  for (Index a = 0; a < m.size(); ++a) {
    const std::string& l = m.label(a);
    meta.quasihole_count.push_back(std::stoi(l.substr(l.find('[') + 1)));
  }
  meta.period = 8;
  meta.charge_denominator = 4;
  meta.quasihole = m.index("(sigma,[1]_8)");
  meta.electron = m.index("(psi,[4]_8)");
  m.set_fqh(meta);
  return m;
}

AnyonModel rr_bar_31() {
  AnyonModel m = direct_product(fib_bar(), z_n(10, 6));
  m.rename("rr_bar_31");
  FqhChargeMeta meta;
  for (Index a = 0; a < m.size(); ++a) meta.quasihole_count.push_back(a % 10);
  meta.period = 10;
  meta.charge_denominator = 5;
  meta.quasihole = m.index("(eps,[1]_10)");
  meta.electron = m.index("(1,[5]_10)");
  m.set_fqh(meta);
  return m;
}

int hierarchy_p(int n, int m) {
  if (m < 1 || m % 2 == 0) fail(ErrorKind::invalid_argument, "hierarchy needs odd m >= 1");
  if (n < 1 || n >= m) {
    if (!(m == 1 && n == 1)) fail(ErrorKind::invalid_argument, "hierarchy needs 1 <= n < m");
  }
  if (std::gcd(n, m) != 1) fail(ErrorKind::invalid_argument, "hierarchy needs gcd(n, m) = 1");
  for (int p = 1; p < 2 * m; p += 2)
    if ((static_cast<long>(n) * p - 1) % m == 0) return p;
  fail(ErrorKind::invalid_argument, "no odd p solves n p = 1 mod m");
}

AnyonModel hierarchy(int n, int m) {
  const int p = hierarchy_p(n, m);
  AnyonModel model = z_n(2 * m, 2 * p);
  model.rename("hierarchy(" + std::to_string(n) + "," + std::to_string(m) + ")");
  FqhChargeMeta meta;
  for (Index a = 0; a < model.size(); ++a) meta.quasihole_count.push_back(a);
  meta.period = 2 * m;
  meta.charge_denominator = m;
  meta.quasihole = 1 % model.size();
  meta.electron = m % model.size();
  model.set_fqh(meta);
  return model;
}

std::vector<std::string> builtin_model_names() {
  return {"trivial", "ising", "fib", "fib_bar", "moore_read", "rr_bar_31", "z_n(N,w)", "hierarchy(n,m)"};
}

AnyonModel builtin_model(const std::string& name) {
  std::string s;
  for (char ch : name)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += static_cast<char>(std::tolower(ch));
  if (s == "trivial") return trivial_model();
  if (s == "ising") return ising();
  if (s == "fib") return fib();
  if (s == "fib_bar" || s == "fibbar") return fib_bar();
  if (s == "moore_read" || s == "mr") return moore_read();
  if (s == "rr_bar_31" || s == "rr") return rr_bar_31();

  static const std::regex zn(R"(z_?n?\((\d+),(-?\d+)(\.5|\.0)?\))");
  static const std::regex zn_half(R"(z_?n?\((\d+),(-?\d+)/2\))");
  static const std::regex hier(R"(hierarchy\((\d+),(\d+)\))");
  std::smatch match;
  if (std::regex_match(s, match, zn_half)) return z_n(std::stoi(match[1]), std::stoi(match[2]));
  if (std::regex_match(s, match, zn)) {
    int whole = std::stoi(match[2]);
    int twice = 2 * whole;
    if (match[3] == ".5") twice += whole < 0 ? -1 : 1;
    return z_n(std::stoi(match[1]), twice);
  }
  if (std::regex_match(s, match, hier)) return hierarchy(std::stoi(match[1]), std::stoi(match[2]));
  fail(ErrorKind::invalid_argument, "unknown built-in model '" + name + "'");
}

}  // namespace al
