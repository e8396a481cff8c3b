#include "anyonlab/fqh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace al {

namespace {

constexpr double kPhaseTol = 1e-9;
constexpr double kPoleTol = 1e-12;
constexpr int kMaxSeriesTerms = 100000;

double wrap_phase(double x) {
  x = std::remainder(x, 2.0 * std::numbers::pi);
  return x <= -std::numbers::pi ? x + 2.0 * std::numbers::pi : x;
}

// x0 = conj(t1) t2 e^{i(theta_I + theta_II)}; each channel sees x0 * lambda_c.
cplx winding_phasor(const FqhSettings& st) {
  return std::conj(st.t1) * st.t2 * std::polar(1.0, st.theta_I + st.theta_II);
}

// Both outcome amplitudes for a bottom-edge probe have the form u + v w, with
// w = 1/(1 + x0 lambda) = sum_k zeta^k and zeta = -x0 lambda.
struct AmplitudeForm {
  cplx u, v;
};

AmplitudeForm amplitude_form(const FqhSettings& st, int outcome) {
  if (outcome == kOutcomeRight) return {0.0, st.r1() * st.r2() * std::polar(1.0, st.theta_II)};
  // (1/conj t1)(1 - |r1|^2 w); at t1 = 0 the amplitude is analytic, handled by the caller.
  const cplx inv = 1.0 / std::conj(st.t1);
  return {inv, -std::norm(st.r1()) * inv};
}

// Coherence sum H = sum_{k,l>=0} zeta^k conj(zeta')^l Q^{|k-l|}, truncated once
// the geometric tail 2 rho^K / (1 - rho)^2 falls below tol.
cplx winding_sum(cplx zeta, cplx zetap, double Q, double rho, double tol) {
  if (rho == 0.0) return 1.0;
  if (rho >= 1.0) fail(ErrorKind::numerical, "winding series does not converge for |t1 t2| >= 1");
  int K = 1;
  while (2.0 * std::pow(rho, K) / ((1.0 - rho) * (1.0 - rho)) >= tol) {
    if (++K > kMaxSeriesTerms) fail(ErrorKind::numerical, "winding series needs too many terms");
  }
  std::vector<cplx> ket(K), bra(K), q(K);
  ket[0] = bra[0] = q[0] = 1.0;
  for (int k = 1; k < K; ++k) {
    ket[k] = ket[k - 1] * zeta;
    bra[k] = bra[k - 1] * std::conj(zetap);
    q[k] = q[k - 1] * Q;
  }
  cplx h = 0.0;
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < K; ++l) h += ket[k] * bra[l] * q[std::abs(k - l)];
  return h;
}

// Same sum in closed form, for the diagonal where no truncation is wanted.
cplx winding_sum_closed(cplx zeta, cplx zetap, double Q) {
  const cplx zb = std::conj(zetap);
  return (1.0 + Q * zeta / (1.0 - Q * zeta) + Q * zb / (1.0 - Q * zb)) / (1.0 - zeta * zb);
}

// Ket/bra contraction for outcome amplitudes u + v w(lambda), u' + v' w(lambda').
cplx outcome_kernel(const AmplitudeForm& f, cplx zeta, cplx zetap, double Q, cplx h) {
  const cplx u = f.u, v = f.v;
  return std::norm(u) + u * std::conj(v) / (1.0 - Q * std::conj(zetap)) + v * std::conj(u) / (1.0 - Q * zeta) +
         std::norm(v) * h;
}

// The u + v w split divides by conj(t1). At t1 = 0 the tunnel-back amplitude
// is exactly t2 e^{i phi} lambda: one winding and nothing else.
bool tunnel_back_degenerate(const FqhSettings& st) { return st.t1 == cplx{}; }

struct Spectrum {
  std::vector<cplx> phases;  // distinct monodromy eigenphases
  // lagrange[j][i]: lambda^k restricted to the spectrum is
  // sum_j (sum_i lagrange[j][i] phases[i]^k) lambda^j for j = 0, 1.
  std::array<std::vector<cplx>, 2> lagrange;
};

Spectrum spectrum(const AnyonModel& model, Index a, Index b) {
  Spectrum s;
  for (const auto& ch : model.channels(a, b)) {
    bool seen = false;
    for (const auto& z : s.phases)
      if (std::abs(z - ch.eigenvalue) < kPhaseTol) seen = true;
    if (!seen) s.phases.push_back(ch.eigenvalue);
  }
  if (s.phases.empty())
    fail(ErrorKind::invalid_argument, model.label(a) + " x " + model.label(b) + " has no fusion channel");
  if (s.phases.size() > 2)
    fail(ErrorKind::unsupported, "off-diagonal coefficients need at most two distinct monodromy eigenphases; " +
                                     model.label(a) + " x " + model.label(b) + " has " +
                                     std::to_string(s.phases.size()));
  if (s.phases.size() == 1) {
    s.lagrange[0] = {1.0};
    s.lagrange[1] = {0.0};
  } else {
    const cplx l1 = s.phases[0], l2 = s.phases[1], gap = l1 - l2;
    s.lagrange[0] = {-l2 / gap, l1 / gap};
    s.lagrange[1] = {1.0 / gap, -1.0 / gap};
  }
  return s;
}

void require_charge(const AnyonModel& model, Index x) {
  if (x < 0 || x >= model.size())
    fail(ErrorKind::unknown_charge, "charge index " + std::to_string(x) + " is out of range");
}

}  // namespace

FqhSettings FqhSettings::symmetric(double t, double beta) {
  FqhSettings s;
  s.t1 = s.t2 = t;
  s.theta_I = beta;
  s.theta_II = 0.0;
  return s;
}

cplx FqhSettings::r1() const { return std::polar(std::sqrt(std::max(0.0, 1.0 - std::norm(t1))), r1_phase); }
cplx FqhSettings::r2() const { return std::polar(std::sqrt(std::max(0.0, 1.0 - std::norm(t2))), r2_phase); }

double FqhSettings::beta() const {
  const cplx x = std::conj(t1) * t2;
  const double base = x == cplx{} ? 0.0 : std::arg(x);
  return wrap_phase(base + theta_I + theta_II);
}

void FqhSettings::set_beta(double target) {
  const cplx x = std::conj(t1) * t2;
  const double base = x == cplx{} ? 0.0 : std::arg(x);
  theta_I = target - base - theta_II;
}

void FqhSettings::validate() const {
  if (!(max_tunneling > 0.0 && max_tunneling <= 1.0))
    fail(ErrorKind::invalid_argument, "max_tunneling must lie in (0, 1]");
  if (std::abs(t1) > max_tunneling + 1e-15 || std::abs(t2) > max_tunneling + 1e-15)
    fail(ErrorKind::invalid_argument, "tunneling amplitude exceeds the weak-tunneling bound " +
                                          std::to_string(max_tunneling));
  if (!(Q >= 0.0 && Q <= 1.0)) fail(ErrorKind::invalid_argument, "coherence factor Q must lie in [0, 1]");
  if (!std::isfinite(theta_I) || !std::isfinite(theta_II) || !std::isfinite(r1_phase) || !std::isfinite(r2_phase))
    fail(ErrorKind::invalid_argument, "phases must be finite");
}

std::vector<ChannelMatrix> channel_evolution(const AnyonModel& model, Index a, Index b, const FqhSettings& st) {
  st.validate();
  require_charge(model, a);
  require_charge(model, b);
  const cplx x0 = winding_phasor(st);
  const cplx r1 = st.r1(), r2 = st.r2(), t1 = st.t1, t2 = st.t2;
  const cplx eI = std::polar(1.0, st.theta_I), eII = std::polar(1.0, st.theta_II);
  const cplx ephi = eI * eII;
  std::vector<ChannelMatrix> out;
  for (const auto& ch : model.channels(a, b)) {
    const auto& Rab = model.R_matrix(a, b, ch.c);
    const auto& Rba = model.R_matrix(b, a, ch.c);
    if (Rab.rows() > 1 && (Rab - Eigen::MatrixXcd(Rab.diagonal().asDiagonal())).cwiseAbs().maxCoeff() > kPhaseTol)
      fail(ErrorKind::unsupported, "channel evolution requires diagonal R-matrices");
    const cplx rab = Rab(ch.mu, ch.mu), rba = Rba(ch.mu, ch.mu);
    const cplx lambda = ch.eigenvalue;
    const cplx denom = 1.0 + x0 * lambda;
    if (std::norm(denom) < kPoleTol) fail(ErrorKind::numerical, "channel evolution hits a pole");
    ChannelMatrix m{ch.c, ch.mu, lambda, ch.weight, Eigen::Matrix2cd::Zero()};
    m.U(0, 0) = std::conj(r1) * std::conj(r2) * eI * rab / denom;
    m.U(0, 1) = (t1 + t2 * ephi * lambda) / denom;
    m.U(1, 0) = -(std::conj(t2) + std::conj(t1) * ephi * lambda) / denom;
    m.U(1, 1) = r1 * r2 * eII * rba / denom;
    out.push_back(m);
  }
  return out;
}

OutcomePair p_exact_diagonal(const AnyonModel& model, Index a, Index b, const FqhSettings& st) {
  st.validate();
  require_charge(model, a);
  require_charge(model, b);
  const cplx x0 = winding_phasor(st);
  const AmplitudeForm right = amplitude_form(st, kOutcomeRight);
  double p_right = 0.0;
  for (const auto& ch : model.channels(a, b)) {
    const cplx denom = 1.0 + x0 * ch.eigenvalue;
    if (std::norm(denom) < kPoleTol) fail(ErrorKind::numerical, "all-order probability hits a pole");
    double value;
    if (st.Q == 1.0) {
      value = std::norm(right.v) / std::norm(denom);
    } else {
      const cplx zeta = -x0 * ch.eigenvalue;
      value = std::real(outcome_kernel(right, zeta, zeta, st.Q, winding_sum_closed(zeta, zeta, st.Q)));
    }
    p_right += ch.weight * value;
  }
  return {p_right, 1.0 - p_right};
}

OutcomePair p_first_order(const AnyonModel& model, Index a, Index ap, Index e, Index b, const FqhSettings& st) {
  for (Index x : {a, ap, e, b}) require_charge(model, x);
  const auto& M = model.M();
  const cplx eb = std::polar(1.0, st.beta());
  const double T1 = std::norm(st.t1), T2 = std::norm(st.t2), cross = std::abs(st.t1 * st.t2) * st.Q;
  const cplx fringe = cross * (eb * M(a, b) + std::conj(eb) * std::conj(M(ap, b)));
  return {1.0 - T1 - T2 - fringe, T1 + fringe + T2 * M(e, b)};
}

OutcomePair p_offdiagonal_exact(const AnyonModel& model, Index a, Index ap, Index e, Index b,
                                const FqhSettings& st, double series_tol) {
  st.validate();
  for (Index x : {a, ap, e, b}) require_charge(model, x);
  if (!(series_tol > 0.0)) fail(ErrorKind::invalid_argument, "series tolerance must be positive");
  if (model.N(a, model.conjugate(ap), e) == 0) return {0.0, 0.0};

  const auto& M = model.M();
  const cplx moment[2][2] = {{1.0, std::conj(M(ap, b))}, {M(a, b), M(e, b)}};
  const Spectrum ket = spectrum(model, a, b), bra = spectrum(model, ap, b);
  const cplx x0 = winding_phasor(st);
  const double rho = std::abs(x0);

  const AmplitudeForm back =
      tunnel_back_degenerate(st) ? AmplitudeForm{0.0, 0.0} : amplitude_form(st, kOutcomeOther);
  const AmplitudeForm right = amplitude_form(st, kOutcomeRight);
  const cplx single_winding = st.t2 * std::polar(1.0, st.theta_I + st.theta_II);

  OutcomePair out{0.0, 0.0};
  for (size_t i = 0; i < ket.phases.size(); ++i)
    for (size_t ip = 0; ip < bra.phases.size(); ++ip) {
      cplx weight = 0.0;
      for (int j = 0; j < 2; ++j)
        for (int m = 0; m < 2; ++m) weight += ket.lagrange[j][i] * std::conj(bra.lagrange[m][ip]) * moment[j][m];
      if (weight == cplx{}) continue;
      const cplx lam = ket.phases[i], lamp = bra.phases[ip];
      const cplx zeta = -x0 * lam, zetap = -x0 * lamp;
      // The tail multiplies |v|^2 and the Lagrange weight; |v| grows like 1/|t1|.
      const double scale = std::max(1.0, std::norm(back.v)) * std::max(1.0, std::abs(weight));
      const cplx h = winding_sum(zeta, zetap, st.Q, rho, series_tol / scale);
      out.right += weight * outcome_kernel(right, zeta, zetap, st.Q, h);
      if (tunnel_back_degenerate(st))
        out.back += weight * single_winding * std::conj(single_winding) * lam * std::conj(lamp);
      else
        out.back += weight * outcome_kernel(back, zeta, zetap, st.Q, h);
    }
  return out;
}

PCoefficients fqh_p_coefficients(const AnyonModel& model, Index b, const FqhSettings& st, bool same_sector_only,
                                 double series_tol) {
  st.validate();
  require_charge(model, b);
  const int n = model.size();
  const auto& meta = model.fqh();
  if (same_sector_only && !meta)
    fail(ErrorKind::invalid_argument, "model '" + model.name() + "' has no electric-charge data");
  PCoefficients out(n, model.vacuum());
  for (Index e = 0; e < n; ++e) out.m_eB[e] = model.M()(e, b);
  for (Index a = 0; a < n; ++a) {
    const OutcomePair diag = p_exact_diagonal(model, a, b, st);
    for (Index ap = 0; ap < n; ++ap) {
      if (same_sector_only && meta->sector(a) != meta->sector(ap)) continue;
      for (Index e = 0; e < n; ++e) {
        if (model.N(a, model.conjugate(ap), e) == 0) continue;
        const OutcomePair v = (a == ap && e == model.vacuum()) ? diag
                                                                : p_offdiagonal_exact(model, a, ap, e, b, st, series_tol);
        out.at(kOutcomeRight, a, ap, e) = v.right;
        out.at(kOutcomeOther, a, ap, e) = v.back;
      }
    }
  }
  return out;
}

std::vector<double> uniform_beta_grid(int points) {
  if (points <= 0) fail(ErrorKind::invalid_argument, "beta grid needs at least one point");
  std::vector<double> out(points);
  for (int k = 0; k < points; ++k) out[k] = -std::numbers::pi + 2.0 * std::numbers::pi * k / points;
  return out;
}

std::vector<CurvePoint> conductance_curve(const PairDensityMatrix& rho, Index b, const FqhSettings& st,
                                          const std::vector<double>& beta_grid) {
  st.validate();
  const auto weights = trace_out_partner(rho);
  const auto& model = rho.model();
  std::vector<CurvePoint> out(beta_grid.size());
  auto fill = [&](size_t first, size_t stride) {
    for (size_t k = first; k < beta_grid.size(); k += stride) {
      FqhSettings local = st;
      local.set_beta(beta_grid[k]);
      double g = 0.0;
      for (const auto& [a, w] : weights) g += w * p_exact_diagonal(model, a, b, local).back.real();
      out[k] = {beta_grid[k], g};
    }
  };
  const size_t workers =
      std::min<size_t>(std::max(1u, std::thread::hardware_concurrency()), (beta_grid.size() + 255) / 256);
  if (workers <= 1) {
    fill(0, 1);
    return out;
  }
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) pool.emplace_back(fill, w, workers);
  for (auto& th : pool) th.join();
  return out;
}

cplx curve_harmonic(const std::vector<CurvePoint>& curve, int k) {
  if (curve.empty()) fail(ErrorKind::invalid_argument, "empty conductance curve");
  cplx acc = 0.0;
  for (const auto& pt : curve) acc += pt.conductance * std::polar(1.0, -k * pt.beta);
  return acc / static_cast<double>(curve.size());
}

SurvivalResult survival_condition(const AnyonModel& model, Index a, Index ap, Index b) {
  for (Index x : {a, ap, b}) require_charge(model, x);
  // Moments sum_c N_xb^c (d_c/d_x)(theta_c/theta_x)^n; the ratios lie on the
  // union of both spectra, so matching that many orders pins all of them.
  std::vector<cplx> ratios;
  auto collect = [&](Index x) {
    for (Index c = 0; c < model.size(); ++c) {
      if (model.N(x, b, c) == 0) continue;
      const cplx z = model.theta(c) / model.theta(x);
      if (std::none_of(ratios.begin(), ratios.end(), [&](cplx y) { return std::abs(y - z) < kPhaseTol; }))
        ratios.push_back(z);
    }
  };
  collect(a);
  collect(ap);
  const int orders = static_cast<int>(ratios.size()) + 1;
  auto moment = [&](Index x, int order) {
    cplx s = 0.0;
    for (Index c = 0; c < model.size(); ++c) {
      const int mult = model.N(x, b, c);
      if (mult == 0) continue;
      s += static_cast<double>(mult) * model.d(c) / model.d(x) * std::pow(model.theta(c) / model.theta(x), order);
    }
    return s;
  };
  for (int order = 0; order < orders; ++order)
    if (std::abs(moment(a, order) - moment(ap, order)) > kPhaseTol) return {false, order, order + 1};
  return {true, -1, orders};
}

std::optional<Suppression> suppression_settings(const AnyonModel& model, Index a, Index b) {
  require_charge(model, a);
  require_charge(model, b);
  const auto chans = model.channels(a, b);
  if (chans.empty()) return std::nullopt;
  const cplx lambda = chans.front().eigenvalue;
  for (const auto& ch : chans)
    if (std::abs(ch.eigenvalue - lambda) > kPhaseTol) return std::nullopt;
  return Suppression{wrap_phase(std::numbers::pi - std::arg(lambda))};
}

Posterior fqh_collapse(const PairDensityMatrix& rho, Index b, const FqhSettings& st, long long N, long long n) {
  const auto& model = rho.model();
  if (!model.fqh()) fail(ErrorKind::invalid_argument, "model '" + model.name() + "' has no electric-charge data");
  PairDensityMatrix target = rho;
  if (!target.sectors()) target.use_electric_superselection();
  const auto report = check_state(target);
  if (const auto* ss = report.find("superselection"); ss && !ss->passed)
    fail(ErrorKind::invalid_argument, "target has coherence between different electric-charge sectors");
  const PCoefficients p = fqh_p_coefficients(model, b, st, true);
  return n_probe_posterior(target, p, N, n);
}

}  // namespace al
