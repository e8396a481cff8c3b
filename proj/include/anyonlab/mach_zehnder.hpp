#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "anyonlab/model.hpp"
#include "anyonlab/state.hpp"

namespace al {

// Where the partner anyon C sits relative to the interferometer arms.
enum class Placement { below_right, above, between_outputs };

const char* placement_name(Placement p);
Placement parse_placement(const std::string& name);

struct InterferometerSettings {
  cplx t1{1.0 / std::numbers::sqrt2}, r1{1.0 / std::numbers::sqrt2};
  cplx t2{1.0 / std::numbers::sqrt2}, r2{1.0 / std::numbers::sqrt2};
  double theta_I = 0.0, theta_II = 0.0;
  double Q = 1.0;
  Placement placement = Placement::below_right;

  // Real beam splitters with |t1|^2 = |t2|^2 = transmission and
  // theta_I - theta_II = theta, so that T e^{i theta} has phase theta.
  static InterferometerSettings symmetric(double transmission, double theta);

  // T e^{i theta} = t1 conj(r1) conj(t2) conj(r2) e^{i(theta_I - theta_II)}.
  cplx visibility_phasor() const;
  double T() const { return std::abs(visibility_phasor()); }
  void validate() const;
};

// Probe density matrix: per probe charge b, the 2x2 matrix <r|rho_B|r'>
// over the input directions (0 = horizontal, 1 = vertical).
struct ProbeComponent {
  Index charge;
  Eigen::Matrix2cd directions;
};

struct ProbeEnsemble {
  std::vector<ProbeComponent> components;

  static ProbeEnsemble single(Index b);
  static ProbeEnsemble distribution(const std::vector<std::pair<Index, double>>& weights);
  void validate(const AnyonModel& model) const;
  // M_xB = sum_b Pr_B(b) M_xb.
  cplx monodromy(const AnyonModel& model, Index x) const;
};

inline constexpr int kOutcomeRight = 0;  // transmitted horizontally
inline constexpr int kOutcomeOther = 1;  // vertical exit (MZ) or tunneled back (FQH)

// p^s_{a a' e, B} for both outcomes, stored densely over (a, a', e).
struct PCoefficients {
  int n = 0;
  Index vacuum = 0;
  std::array<std::vector<cplx>, 2> p;
  std::vector<cplx> m_eB;  // M_eB per charge, for reporting

  PCoefficients() = default;
  PCoefficients(int charges, Index vac);
  size_t slot(Index a, Index ap, Index e) const { return (static_cast<size_t>(a) * n + ap) * n + e; }
  cplx operator()(int s, Index a, Index ap, Index e) const { return p[s][slot(a, ap, e)]; }
  cplx& at(int s, Index a, Index ap, Index e) { return p[s][slot(a, ap, e)]; }
  double diagonal(int s, Index a) const { return p[s][slot(a, a, vacuum)].real(); }
};

PCoefficients p_coefficients(const AnyonModel& model, const ProbeEnsemble& probe,
                             const InterferometerSettings& settings);

struct Posterior {
  double probability = 0.0;
  PairDensityMatrix state;
};

// Probability of outcome s for the current target state.
double outcome_probability(const PairDensityMatrix& rho, const PCoefficients& p, int outcome);
Posterior single_probe_update(const PairDensityMatrix& rho, const PCoefficients& p, int outcome);
// n of N probes exit horizontally, in any order.
Posterior n_probe_posterior(const PairDensityMatrix& rho, const PCoefficients& p, long long N, long long n);
double n_probe_probability(const PairDensityMatrix& rho, const PCoefficients& p, long long N, long long n);
PairDensityMatrix averaged_state(const PairDensityMatrix& rho, const PCoefficients& p, long long N);

// log of C(N,n) p^n q^(N-n) for complex p, q; -inf real part encodes zero.
cplx log_binomial_weight(long long N, long long n, cplx p, cplx q);

struct ChargeClass {
  std::vector<Index> charges;
  double p = 0.0;  // shared p^->_{aa1,B}
};

struct ChargeClassPartition {
  std::vector<ChargeClass> classes;
  std::vector<int> class_of;  // per charge
  double tol = 1e-7;
};

ChargeClassPartition charge_classes(const PCoefficients& p, double tol = 1e-7);
double class_probability(const PairDensityMatrix& rho, const ChargeClassPartition& partition, int kappa);
// True when p^->_{aa'e} = p_kappa and p^other_{aa'e} = 1 - p_kappa within tol.
bool is_fixed_component(const PCoefficients& p, const ChargeClassPartition& partition, Index a, Index ap,
                        Index e);
Posterior fixed_state(const PairDensityMatrix& rho, const PCoefficients& p,
                      const ChargeClassPartition& partition, int kappa);

enum class LimitCase { single_class, interval_endpoint, nearest_supported };

struct LimitDescription {
  double r = 0.0;
  LimitCase kind = LimitCase::single_class;
  std::vector<int> congruous;  // winning class indices
  std::vector<double> delta;   // limiting Delta factor per class
  PairDensityMatrix state;
};

LimitDescription classify_limit(const PairDensityMatrix& rho, const PCoefficients& p,
                                const ChargeClassPartition& partition, double r);

struct QuasiFixedElement {
  Index a, ap, e;
  double p_kappa;
  double alpha, beta;  // phases of p^-> and p^other
  cplx m_eB;
};

struct RogueReport {
  // Empty unless one of t1, r1, t2, r2 vanishes; then names the trivial case.
  std::string trivial_case;
  // Same-class pairs whose probe monodromies differ: only possible at a tuned
  // theta, reported with the distance to the nearest admissible value.
  struct TunedPair {
    Index a, ap;
    double theta, theta_residual;
  };
  std::vector<TunedPair> tuned_pairs;
  std::vector<QuasiFixedElement> quasi_fixed;
};

RogueReport detect_rogue(const AnyonModel& model, const ProbeEnsemble& probe,
                         const InterferometerSettings& settings, double tol = 1e-7);

struct SampleRun {
  std::uint64_t seed = 0;
  std::vector<int> outcomes;
  std::vector<double> r_trace;  // fraction of horizontal outcomes after k probes
  PairDensityMatrix final_state;
};

// Uniform double in [0,1) from the top 53 bits of a 64-bit draw.
double unit_draw(std::uint64_t bits);

// One probe per entry of `probes`, applied in order. In many-to-many mode
// every probe meets a fresh copy of the initial target.
SampleRun sample_run(const PairDensityMatrix& rho, const std::vector<const PCoefficients*>& probes,
                     std::uint64_t seed, bool many_to_many = false);
SampleRun sample_run(const PairDensityMatrix& rho, const PCoefficients& p, long long N, std::uint64_t seed,
                     bool many_to_many = false);
// Independent runs with seeds base_seed, base_seed+1, ...; results in seed order.
std::vector<SampleRun> sample_runs(const PairDensityMatrix& rho, const PCoefficients& p, long long N,
                                   std::uint64_t base_seed, int runs, int threads, bool many_to_many = false);

// z*_{alpha/2} with 1 - alpha = erf(z / sqrt 2).
double z_star(double alpha);
// Nullopt when p1 == p2 (the classes cannot be told apart). The estimate is
// the unrounded Gaussian-approximation count; probes_needed rounds it up.
std::optional<double> probes_estimate(double p1, double p2, double alpha);
std::optional<long long> probes_needed(double p1, double p2, double alpha);
long long probes_needed_conservative(double dp, double alpha);
long long probes_needed_small_t(double t, double dM, double alpha);
// Seconds, for total probe current `current` in amperes.
double measurement_time(double t, double dM, double alpha, double current);

enum class Distinguishability { never, sometimes, always };
const char* distinguishability_name(Distinguishability d);

struct ClassPairVerdict {
  int first, second;
  Distinguishability verdict;
};

std::vector<ClassPairVerdict> perfect_distinguishability(const ChargeClassPartition& partition);

}  // namespace al
