#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "anyonlab/mach_zehnder.hpp"

namespace al {

// Double point-contact interferometer. Outcome 0 (kOutcomeRight) is the probe
// continuing along the bottom edge; outcome 1 is the probe tunneling back
// along the top edge, which is what the longitudinal conductance sees.
struct FqhSettings {
  cplx t1{0.1}, t2{0.1};
  double r1_phase = 0.0, r2_phase = 0.0;
  double theta_I = 0.0, theta_II = 0.0;
  double Q = 1.0;
  double max_tunneling = 0.2;

  // |t1| = |t2| = t with real amplitudes and the interference phase set to beta.
  static FqhSettings symmetric(double t, double beta);

  cplx r1() const;
  cplx r2() const;
  // beta = arg{conj(t1) t2 e^{i(theta_I + theta_II)}}.
  double beta() const;
  // Shifts theta_I so that beta() returns the requested value.
  void set_beta(double beta);
  void validate() const;
};

struct ChannelMatrix {
  Index c;
  int mu;
  cplx eigenphase;  // theta_c / (theta_a theta_b)
  double weight;    // d_c / (d_a d_b)
  Eigen::Matrix2cd U;  // rows/cols: 0 = top edge, 1 = bottom edge
};

std::vector<ChannelMatrix> channel_evolution(const AnyonModel& model, Index a, Index b, const FqhSettings& settings);

struct OutcomePair {
  cplx right;  // bottom-edge transmission
  cplx back;   // tunneled to the top edge
};

OutcomePair p_exact_diagonal(const AnyonModel& model, Index a, Index b, const FqhSettings& settings);
OutcomePair p_first_order(const AnyonModel& model, Index a, Index ap, Index e, Index b, const FqhSettings& settings);
OutcomePair p_offdiagonal_exact(const AnyonModel& model, Index a, Index ap, Index e, Index b,
                                const FqhSettings& settings, double series_tol = 1e-12);

// Coefficients for every (a, a', e); with same_sector_only, pairs in different
// quasihole-count sectors are left at zero.
PCoefficients fqh_p_coefficients(const AnyonModel& model, Index b, const FqhSettings& settings,
                                 bool same_sector_only = false, double series_tol = 1e-12);

struct CurvePoint {
  double beta;
  double conductance;
};

// G(beta) = sum_a Pr(a) p^back_{aa1,b}(beta), in arbitrary units.
std::vector<CurvePoint> conductance_curve(const PairDensityMatrix& rho, Index b, const FqhSettings& settings,
                                          const std::vector<double>& beta_grid);
std::vector<double> uniform_beta_grid(int points);
// Complex Fourier coefficient (1/M) sum_j G_j e^{-i k beta_j} over a uniform grid.
cplx curve_harmonic(const std::vector<CurvePoint>& curve, int k);

struct SurvivalResult {
  bool survives;
  int witness;  // first violated moment order, -1 when none
  int orders_checked;
};

SurvivalResult survival_condition(const AnyonModel& model, Index a, Index ap, Index b);

struct Suppression {
  double beta;  // with |t1| = |t2|, p^back_{aa1,b} vanishes to all orders
};

std::optional<Suppression> suppression_settings(const AnyonModel& model, Index a, Index b);

// N-probe collapse with electric superselection enforced on the target.
Posterior fqh_collapse(const PairDensityMatrix& rho, Index b, const FqhSettings& settings, long long N, long long n);

}  // namespace al
