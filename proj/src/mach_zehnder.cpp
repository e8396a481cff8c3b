#include "anyonlab/mach_zehnder.hpp"

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace al {

namespace {

constexpr double kZeroProbability = 1e-15;
constexpr double kUnitTol = 1e-12;
constexpr double kElementaryCharge = 1.602176634e-19;

// Loop factors Z_{PP'} between a ket path P and a bra path P' (0 = bottom
// arm, 1 = top arm) for target charges a, a', difference charge e and probe b.
struct LoopFactors {
  cplx z[2][2];
};

LoopFactors loops_below(cplx m_ab, cplx m_apb, cplx m_eb) {
  return {{{m_eb, m_ab}, {std::conj(m_apb), 1.0}}};
}

LoopFactors loops_above(cplx m_ab, cplx m_apb, cplx m_eb) {
  return {{{1.0, m_apb}, {std::conj(m_ab), std::conj(m_eb)}}};
}

// amplitude[s][P][r]: output s, path P, input direction r.
using PathAmplitudes = std::array<std::array<std::array<cplx, 2>, 2>, 2>;

PathAmplitudes path_amplitudes(const InterferometerSettings& st) {
  const cplx e1 = std::polar(1.0, st.theta_I), e2 = std::polar(1.0, st.theta_II);
  const cplx t1 = st.t1, r1 = st.r1, t2 = st.t2, r2 = st.r2;
  PathAmplitudes A{};
  A[kOutcomeRight][0][0] = t1 * std::conj(r2) * e1;
  A[kOutcomeRight][0][1] = std::conj(r1) * std::conj(r2) * e1;
  A[kOutcomeRight][1][0] = r1 * t2 * e2;
  A[kOutcomeRight][1][1] = -std::conj(t1) * t2 * e2;
  A[kOutcomeOther][0][0] = t1 * std::conj(t2) * e1;
  A[kOutcomeOther][0][1] = std::conj(r1) * std::conj(t2) * e1;
  A[kOutcomeOther][1][0] = -r1 * r2 * e2;
  A[kOutcomeOther][1][1] = std::conj(t1) * r2 * e2;
  return A;
}

double xlogy(double x, double y) {
  if (x == 0.0) return 0.0;
  if (y <= 0.0) return -std::numeric_limits<double>::infinity();
  return x * std::log(y);
}

cplx safe_log(cplx z) {
  if (z == cplx{}) return {-std::numeric_limits<double>::infinity(), 0.0};
  return std::log(z);
}

cplx weight_from_log(cplx lw) {
  if (!std::isfinite(lw.real())) return {};
  return std::exp(lw);
}

void require_outcome(int s) {
  if (s != kOutcomeRight && s != kOutcomeOther)
    fail(ErrorKind::invalid_argument, "outcome must be 0 (horizontal) or 1 (vertical)");
}

void require_same_model(const PairDensityMatrix& rho, const PCoefficients& p) {
  if (rho.model().size() != p.n)
    fail(ErrorKind::invalid_argument, "probe coefficients were computed for a different model");
}

}  // namespace

const char* placement_name(Placement p) {
  switch (p) {
    case Placement::below_right: return "below_right";
    case Placement::above: return "above";
    case Placement::between_outputs: return "between_outputs";
  }
  return "?";
}

Placement parse_placement(const std::string& name) {
  std::string k = name;
  std::transform(k.begin(), k.end(), k.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (k == "below_right" || k == "c_below_right" || k == "default") return Placement::below_right;
  if (k == "above" || k == "c_above") return Placement::above;
  if (k == "between_outputs" || k == "c_between_outputs") return Placement::between_outputs;
  fail(ErrorKind::invalid_argument, "unknown partner placement '" + name + "'");
}

InterferometerSettings InterferometerSettings::symmetric(double transmission, double theta) {
  if (!(transmission >= 0.0 && transmission <= 1.0))
    fail(ErrorKind::invalid_argument, "transmission probability must lie in [0, 1]");
  InterferometerSettings s;
  const double t = std::sqrt(transmission), r = std::sqrt(1.0 - transmission);
  s.t1 = s.t2 = t;
  s.r1 = s.r2 = r;
  s.theta_I = theta;
  s.theta_II = 0.0;
  return s;
}

cplx InterferometerSettings::visibility_phasor() const {
  return t1 * std::conj(r1) * std::conj(t2) * std::conj(r2) * std::polar(1.0, theta_I - theta_II);
}

void InterferometerSettings::validate() const {
  if (std::abs(std::norm(t1) + std::norm(r1) - 1.0) > kUnitTol)
    fail(ErrorKind::invalid_argument, "beam splitter 1 is not lossless: |t1|^2 + |r1|^2 != 1");
  if (std::abs(std::norm(t2) + std::norm(r2) - 1.0) > kUnitTol)
    fail(ErrorKind::invalid_argument, "beam splitter 2 is not lossless: |t2|^2 + |r2|^2 != 1");
  if (!(Q >= 0.0 && Q <= 1.0)) fail(ErrorKind::invalid_argument, "coherence factor Q must lie in [0, 1]");
  if (!std::isfinite(theta_I) || !std::isfinite(theta_II))
    fail(ErrorKind::invalid_argument, "path phases must be finite");
}

ProbeEnsemble ProbeEnsemble::single(Index b) { return distribution({{b, 1.0}}); }

ProbeEnsemble ProbeEnsemble::distribution(const std::vector<std::pair<Index, double>>& weights) {
  ProbeEnsemble out;
  for (const auto& [b, w] : weights) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(0, 0) = w;
    out.components.push_back({b, m});
  }
  return out;
}

void ProbeEnsemble::validate(const AnyonModel& model) const {
  if (components.empty()) fail(ErrorKind::invalid_argument, "probe ensemble is empty");
  double total = 0.0;
  for (const auto& c : components) {
    if (c.charge < 0 || c.charge >= model.size())
      fail(ErrorKind::unknown_charge, "probe charge index " + std::to_string(c.charge) + " is out of range");
    if ((c.directions - c.directions.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
      fail(ErrorKind::invalid_argument, "probe direction matrix for " + model.label(c.charge) +
                                            " is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(c.directions, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12)
      fail(ErrorKind::invalid_argument, "probe direction matrix for " + model.label(c.charge) +
                                            " is not positive semidefinite");
    total += c.directions.trace().real();
  }
  if (std::abs(total - 1.0) > 1e-9)
    fail(ErrorKind::invalid_argument, "probe weights sum to " + std::to_string(total) + ", not 1");
}

cplx ProbeEnsemble::monodromy(const AnyonModel& model, Index x) const {
  cplx sum = 0.0;
  for (const auto& c : components) sum += c.directions.trace().real() * model.M()(x, c.charge);
  return sum;
}

PCoefficients::PCoefficients(int charges, Index vac) : n(charges), vacuum(vac) {
  const size_t total = static_cast<size_t>(n) * n * n;
  p[0].assign(total, cplx{});
  p[1].assign(total, cplx{});
  m_eB.assign(n, cplx{});
}

PCoefficients p_coefficients(const AnyonModel& model, const ProbeEnsemble& probe,
                             const InterferometerSettings& settings) {
  settings.validate();
  probe.validate(model);
  const int n = model.size();
  PCoefficients out(n, model.vacuum());
  for (Index e = 0; e < n; ++e) out.m_eB[e] = probe.monodromy(model, e);

  const PathAmplitudes A = path_amplitudes(settings);
  const auto& M = model.M();
  for (Index a = 0; a < n; ++a)
    for (Index ap = 0; ap < n; ++ap) {
      const Index apbar = model.conjugate(ap);
      for (Index e = 0; e < n; ++e) {
        if (model.N(a, apbar, e) == 0) continue;
        for (const auto& comp : probe.components) {
          const Index b = comp.charge;
          const LoopFactors below = loops_below(M(a, b), M(ap, b), M(e, b));
          const LoopFactors above = loops_above(M(a, b), M(ap, b), M(e, b));
          for (int s = 0; s < 2; ++s) {
            const LoopFactors* z = &below;
            if (settings.placement == Placement::above ||
                (settings.placement == Placement::between_outputs && s == kOutcomeRight))
              z = &above;
            cplx total = 0.0;
            for (int r = 0; r < 2; ++r)
              for (int rp = 0; rp < 2; ++rp) {
                const cplx w = comp.directions(r, rp);
                if (w == cplx{}) continue;
                for (int P = 0; P < 2; ++P)
                  for (int Pp = 0; Pp < 2; ++Pp) {
                    const double coherence = P == Pp ? 1.0 : settings.Q;
                    total += w * coherence * A[s][P][r] * std::conj(A[s][Pp][rp]) * z->z[P][Pp];
                  }
              }
            out.at(s, a, ap, e) += total;
          }
        }
      }
    }
  return out;
}

double outcome_probability(const PairDensityMatrix& rho, const PCoefficients& p, int outcome) {
  require_outcome(outcome);
  require_same_model(rho, p);
  const auto& basis = rho.basis();
  double pr = 0.0;
  for (int i = 0; i < basis.size(); ++i) pr += rho.matrix()(i, i).real() * p.diagonal(outcome, basis.state(i).a);
  return pr;
}

Posterior single_probe_update(const PairDensityMatrix& rho, const PCoefficients& p, int outcome) {
  const double pr = outcome_probability(rho, p, outcome);
  if (pr < kZeroProbability)
    fail(ErrorKind::zero_probability, "outcome " + std::to_string(outcome) + " has probability " +
                                          std::to_string(pr));
  const auto& table = p.p[outcome];
  auto next = rho.transform_channels(
      [&](Index a, Index ap, Index e) { return table[p.slot(a, ap, e)] / pr; });
  return {pr, std::move(next)};
}

cplx log_binomial_weight(long long N, long long n, cplx pv, cplx qv) {
  if (n < 0 || n > N) return {-std::numeric_limits<double>::infinity(), 0.0};
  const double lc = std::lgamma(static_cast<double>(N) + 1) - std::lgamma(static_cast<double>(n) + 1) -
                    std::lgamma(static_cast<double>(N - n) + 1);
  cplx out = lc;
  if (n > 0) out += static_cast<double>(n) * safe_log(pv);
  if (N - n > 0) out += static_cast<double>(N - n) * safe_log(qv);
  return out;
}

namespace {

// log Pr_N(n), summed in log space over the diagonal.
double log_n_probability(const PairDensityMatrix& rho, const PCoefficients& p, long long N, long long n) {
  const auto& basis = rho.basis();
  std::vector<double> terms;
  for (int i = 0; i < basis.size(); ++i) {
    const double w = rho.matrix()(i, i).real();
    if (w <= 0.0) continue;
    const Index a = basis.state(i).a;
    const double lw = log_binomial_weight(N, n, p.diagonal(kOutcomeRight, a), p.diagonal(kOutcomeOther, a)).real();
    if (std::isfinite(lw)) terms.push_back(std::log(w) + lw);
  }
  if (terms.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - top);
  return top + std::log(acc);
}

void check_probe_count(long long N, long long n) {
  if (N < 0) fail(ErrorKind::invalid_argument, "probe count must be non-negative");
  if (n < 0 || n > N) fail(ErrorKind::invalid_argument, "outcome count n must satisfy 0 <= n <= N");
}

}  // namespace

double n_probe_probability(const PairDensityMatrix& rho, const PCoefficients& p, long long N, long long n) {
  check_probe_count(N, n);
  require_same_model(rho, p);
  const double lp = log_n_probability(rho, p, N, n);
  return std::isfinite(lp) ? std::exp(lp) : 0.0;
}

Posterior n_probe_posterior(const PairDensityMatrix& rho, const PCoefficients& p, long long N, long long n) {
  check_probe_count(N, n);
  require_same_model(rho, p);
  const double lp = log_n_probability(rho, p, N, n);
  const double pr = std::isfinite(lp) ? std::exp(lp) : 0.0;
  if (pr < kZeroProbability)
  {
    std::ostringstream msg;
    msg << n << " of " << N << " horizontal outcomes has probability " << std::setprecision(3) << pr
        << " (log " << lp << "), below the zero-probability threshold " << kZeroProbability;
    fail(ErrorKind::zero_probability, msg.str());
  }
  // Each e-component is scaled by W_N(n; p^->, p^other) / Pr_N(n).
  const int cells = p.n;
  std::vector<cplx> factor(static_cast<size_t>(cells) * cells * cells);
  for (size_t k = 0; k < factor.size(); ++k)
    factor[k] = weight_from_log(log_binomial_weight(N, n, p.p[0][k], p.p[1][k]) - lp);
  auto next = rho.transform_channels([&](Index a, Index ap, Index e) { return factor[p.slot(a, ap, e)]; });
  return {pr, std::move(next)};
}

PairDensityMatrix averaged_state(const PairDensityMatrix& rho, const PCoefficients& p, long long N) {
  if (N < 0) fail(ErrorKind::invalid_argument, "probe count must be non-negative");
  require_same_model(rho, p);
  return rho.transform_channels([&](Index a, Index ap, Index e) {
    const size_t k = p.slot(a, ap, e);
    return std::pow(p.p[0][k] + p.p[1][k], static_cast<double>(N));
  });
}

ChargeClassPartition charge_classes(const PCoefficients& p, double tol) {
  ChargeClassPartition out;
  out.tol = tol;
  out.class_of.assign(p.n, -1);
  for (Index a = 0; a < p.n; ++a) {
    const double pa = p.diagonal(kOutcomeRight, a);
    int found = -1;
    for (size_t k = 0; k < out.classes.size() && found < 0; ++k)
      if (std::abs(out.classes[k].p - pa) <= tol) found = static_cast<int>(k);
    if (found < 0) {
      out.classes.push_back({{}, pa});
      found = static_cast<int>(out.classes.size()) - 1;
    }
    out.classes[found].charges.push_back(a);
    out.class_of[a] = found;
  }
  return out;
}

double class_probability(const PairDensityMatrix& rho, const ChargeClassPartition& partition, int kappa) {
  if (kappa < 0 || kappa >= static_cast<int>(partition.classes.size()))
    fail(ErrorKind::invalid_argument, "class index out of range");
  const auto& basis = rho.basis();
  double pr = 0.0;
  for (int i = 0; i < basis.size(); ++i)
    if (partition.class_of.at(basis.state(i).a) == kappa) pr += rho.matrix()(i, i).real();
  return pr;
}

bool is_fixed_component(const PCoefficients& p, const ChargeClassPartition& partition, Index a, Index ap,
                        Index e) {
  const int k = partition.class_of.at(a);
  if (k != partition.class_of.at(ap)) return false;
  const double pk = partition.classes[k].p;
  return std::abs(p(kOutcomeRight, a, ap, e) - pk) <= partition.tol &&
         std::abs(p(kOutcomeOther, a, ap, e) - (1.0 - pk)) <= partition.tol;
}

namespace {

PairDensityMatrix project_onto_classes(const PairDensityMatrix& rho, const PCoefficients& p,
                                       const ChargeClassPartition& partition, const std::vector<int>& keep,
                                       double scale) {
  std::vector<char> kept(partition.classes.size(), 0);
  for (int k : keep) kept[k] = 1;
  return rho.transform_channels([&](Index a, Index ap, Index e) -> cplx {
    const int k = partition.class_of[a];
    if (!kept[k] || !is_fixed_component(p, partition, a, ap, e)) return 0.0;
    return scale;
  });
}

}  // namespace

Posterior fixed_state(const PairDensityMatrix& rho, const PCoefficients& p,
                      const ChargeClassPartition& partition, int kappa) {
  require_same_model(rho, p);
  const double pr = class_probability(rho, partition, kappa);
  if (pr < kZeroProbability)
    fail(ErrorKind::zero_probability, "charge class " + std::to_string(kappa) + " has probability " +
                                          std::to_string(pr));
  return {pr, project_onto_classes(rho, p, partition, {kappa}, 1.0 / pr)};
}

LimitDescription classify_limit(const PairDensityMatrix& rho, const PCoefficients& p,
                                const ChargeClassPartition& partition, double r) {
  if (!(r >= 0.0 && r <= 1.0)) fail(ErrorKind::invalid_argument, "outcome fraction r must lie in [0, 1]");
  require_same_model(rho, p);
  const int nk = static_cast<int>(partition.classes.size());
  std::vector<double> pr(nk), score(nk);
  for (int k = 0; k < nk; ++k) {
    pr[k] = class_probability(rho, partition, k);
    const double pk = std::clamp(partition.classes[k].p, 0.0, 1.0);
    score[k] = xlogy(r, pk) + xlogy(1.0 - r, 1.0 - pk);
  }
  const double inf = std::numeric_limits<double>::infinity();
  double best_all = -inf, best_supported = -inf;
  for (int k = 0; k < nk; ++k) {
    best_all = std::max(best_all, score[k]);
    if (pr[k] > kZeroProbability) best_supported = std::max(best_supported, score[k]);
  }
  if (!std::isfinite(best_supported))
    fail(ErrorKind::zero_probability, "no charge class with nonzero probability can produce this fraction");

  LimitDescription out;
  out.r = r;
  double mass = 0.0;
  for (int k = 0; k < nk; ++k)
    if (pr[k] > kZeroProbability && std::abs(score[k] - best_supported) <= partition.tol) {
      out.congruous.push_back(k);
      mass += pr[k];
    }
  bool supported_top = false;
  for (int k = 0; k < nk; ++k)
    if (std::abs(score[k] - best_all) <= partition.tol && pr[k] > kZeroProbability) supported_top = true;
  if (!supported_top)
    out.kind = LimitCase::nearest_supported;
  else
    out.kind = out.congruous.size() > 1 ? LimitCase::interval_endpoint : LimitCase::single_class;
  out.delta.assign(nk, 0.0);
  for (int k : out.congruous) out.delta[k] = 1.0 / mass;
  out.state = project_onto_classes(rho, p, partition, out.congruous, 1.0 / mass);
  return out;
}

RogueReport detect_rogue(const AnyonModel& model, const ProbeEnsemble& probe,
                         const InterferometerSettings& settings, double tol) {
  const PCoefficients p = p_coefficients(model, probe, settings);
  const auto partition = charge_classes(p, tol);
  RogueReport out;
  const double zero = 1e-12;
  if (std::abs(settings.t1) < zero)
    out.trivial_case = "t1 = 0";
  else if (std::abs(settings.r1) < zero)
    out.trivial_case = "r1 = 0";
  else if (std::abs(settings.t2) < zero)
    out.trivial_case = "t2 = 0";
  else if (std::abs(settings.r2) < zero)
    out.trivial_case = "r2 = 0";

  const int n = model.size();
  const double theta = std::arg(settings.visibility_phasor());
  for (Index a = 0; a < n; ++a)
    for (Index ap = a + 1; ap < n; ++ap) {
      if (partition.class_of[a] != partition.class_of[ap]) continue;
      const cplx diff = probe.monodromy(model, a) - probe.monodromy(model, ap);
      if (std::abs(diff) <= tol) continue;
      // Admissible theta = -arg(M_aB - M_a'B) +- pi/2.
      double best = std::numeric_limits<double>::infinity();
      for (double sign : {1.0, -1.0}) {
        const double target = -std::arg(diff) + sign * std::numbers::pi / 2;
        best = std::min(best, std::abs(std::remainder(theta - target, 2 * std::numbers::pi)));
      }
      out.tuned_pairs.push_back({a, ap, theta, best});
    }

  for (Index a = 0; a < n; ++a)
    for (Index ap = 0; ap < n; ++ap) {
      const int k = partition.class_of[a];
      if (k != partition.class_of[ap]) continue;
      const double pk = partition.classes[k].p;
      for (Index e = 0; e < n; ++e) {
        if (model.N(a, model.conjugate(ap), e) == 0) continue;
        const cplx right = p(kOutcomeRight, a, ap, e), other = p(kOutcomeOther, a, ap, e);
        const bool moduli_match = std::abs(std::abs(right) - pk) <= tol && std::abs(std::abs(other) - (1 - pk)) <= tol;
        if (!moduli_match || is_fixed_component(p, partition, a, ap, e)) continue;
        out.quasi_fixed.push_back({a, ap, e, pk, std::arg(right), std::arg(other), p.m_eB[e]});
      }
    }
  return out;
}

double unit_draw(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

SampleRun sample_run(const PairDensityMatrix& rho, const std::vector<const PCoefficients*>& probes,
                     std::uint64_t seed, bool many_to_many) {
  if (probes.empty()) fail(ErrorKind::invalid_argument, "sample run needs at least one probe");
  std::mt19937_64 rng(seed);
  SampleRun run;
  run.seed = seed;
  run.outcomes.reserve(probes.size());
  run.r_trace.reserve(probes.size());
  PairDensityMatrix current = rho;
  long long right = 0;
  for (const PCoefficients* p : probes) {
    const PairDensityMatrix& target = many_to_many ? rho : current;
    const double pr_right = outcome_probability(target, *p, kOutcomeRight);
    const int s = unit_draw(rng()) < pr_right ? kOutcomeRight : kOutcomeOther;
    auto post = single_probe_update(target, *p, s);
    current = std::move(post.state);
    right += s == kOutcomeRight;
    run.outcomes.push_back(s);
    run.r_trace.push_back(static_cast<double>(right) / static_cast<double>(run.outcomes.size()));
  }
  run.final_state = std::move(current);
  return run;
}

SampleRun sample_run(const PairDensityMatrix& rho, const PCoefficients& p, long long N, std::uint64_t seed,
                     bool many_to_many) {
  if (N <= 0) fail(ErrorKind::invalid_argument, "sample run needs at least one probe");
  std::vector<const PCoefficients*> probes(static_cast<size_t>(N), &p);
  return sample_run(rho, probes, seed, many_to_many);
}

std::vector<SampleRun> sample_runs(const PairDensityMatrix& rho, const PCoefficients& p, long long N,
                                   std::uint64_t base_seed, int runs, int threads, bool many_to_many) {
  if (runs < 0) fail(ErrorKind::invalid_argument, "run count must be non-negative");
  std::vector<SampleRun> out(runs);
  const int workers = std::max(1, std::min(threads, runs));
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < runs; i += workers) out[i] = sample_run(rho, p, N, base_seed + i, many_to_many);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

double z_star(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::invalid_argument, "alpha must lie in (0, 1)");
  return std::numbers::sqrt2 * boost::math::erf_inv(1.0 - alpha);
}

namespace {

long long ceil_count(double x) {
  if (!std::isfinite(x) || x > 9.0e18) fail(ErrorKind::numerical, "probe count estimate overflows");
  return static_cast<long long>(std::ceil(x - 1e-9));
}

}  // namespace

std::optional<double> probes_estimate(double p1, double p2, double alpha) {
  for (double v : {p1, p2})
    if (!(v >= 0.0 && v <= 1.0)) fail(ErrorKind::invalid_argument, "probabilities must lie in [0, 1]");
  const double z = z_star(alpha);
  const double dp = std::abs(p1 - p2);
  if (dp == 0.0) return std::nullopt;
  const double spread = std::sqrt(p1 * (1 - p1)) + std::sqrt(p2 * (1 - p2));
  return std::pow(z * spread / dp, 2);
}

std::optional<long long> probes_needed(double p1, double p2, double alpha) {
  const auto estimate = probes_estimate(p1, p2, alpha);
  if (!estimate) return std::nullopt;
  return std::max(1LL, ceil_count(*estimate));
}

long long probes_needed_conservative(double dp, double alpha) {
  if (!(dp > 0.0 && dp <= 1.0)) fail(ErrorKind::invalid_argument, "probability gap must lie in (0, 1]");
  return ceil_count(std::pow(z_star(alpha) / dp, 2));
}

long long probes_needed_small_t(double t, double dM, double alpha) {
  if (!(t > 0.0 && t <= 1.0)) fail(ErrorKind::invalid_argument, "tunneling amplitude must lie in (0, 1]");
  if (!(dM > 0.0)) fail(ErrorKind::invalid_argument, "monodromy gap must be positive");
  return ceil_count(std::pow(z_star(alpha) / (t * dM), 2));
}

double measurement_time(double t, double dM, double alpha, double current) {
  if (!(std::abs(current) > 0.0)) fail(ErrorKind::invalid_argument, "probe current must be nonzero");
  if (!(t > 0.0 && t <= 1.0)) fail(ErrorKind::invalid_argument, "tunneling amplitude must lie in (0, 1]");
  if (!(dM > 0.0)) fail(ErrorKind::invalid_argument, "monodromy gap must be positive");
  return kElementaryCharge / std::abs(current) * std::pow(z_star(alpha) / (t * dM), 2);
}

const char* distinguishability_name(Distinguishability d) {
  switch (d) {
    case Distinguishability::never: return "never";
    case Distinguishability::sometimes: return "sometimes";
    case Distinguishability::always: return "always";
  }
  return "?";
}

std::vector<ClassPairVerdict> perfect_distinguishability(const ChargeClassPartition& partition) {
  std::vector<ClassPairVerdict> out;
  const double tol = partition.tol;
  auto extreme = [&](double v) { return std::abs(v) <= tol || std::abs(v - 1.0) <= tol; };
  const int nk = static_cast<int>(partition.classes.size());
  for (int i = 0; i < nk; ++i)
    for (int j = i + 1; j < nk; ++j) {
      const double a = partition.classes[i].p, b = partition.classes[j].p;
      Distinguishability v = Distinguishability::never;
      if (extreme(a) && extreme(b) && std::abs(a - b) > tol)
        v = Distinguishability::always;
      else if (extreme(a) != extreme(b))
        v = Distinguishability::sometimes;
      out.push_back({i, j, v});
    }
  return out;
}

}  // namespace al
