#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "anyonlab/mach_zehnder.hpp"
#include "anyonlab/state.hpp"

namespace testing_support {

using al::cplx;

inline std::shared_ptr<const al::TargetBasis> basis_for(al::AnyonModel m) {
  return std::make_shared<al::TargetBasis>(std::make_shared<const al::AnyonModel>(std::move(m)));
}

inline al::PairDensityMatrix random_pure(const std::shared_ptr<const al::TargetBasis>& basis, std::mt19937_64& rng,
                                         double keep = 1.0) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u;
  std::vector<std::pair<al::BasisState, cplx>> amps;
  double norm = 0.0;
  for (const auto& s : basis->states()) {
    if (u(rng) > keep) continue;
    cplx z(g(rng), g(rng));
    amps.emplace_back(s, z);
    norm += std::norm(z);
  }
  if (amps.empty()) {
    amps.emplace_back(basis->state(0), 1.0);
    norm = 1.0;
  }
  for (auto& [s, z] : amps) z /= std::sqrt(norm);
  return al::PairDensityMatrix::from_pure(basis, amps);
}

// Convex mixture of `terms` random pure states.
inline al::PairDensityMatrix random_mixed(const std::shared_ptr<const al::TargetBasis>& basis, std::mt19937_64& rng,
                                          int terms, double keep = 1.0) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<double> w(terms);
  double total = 0.0;
  for (auto& x : w) total += (x = u(rng));
  al::PairDensityMatrix out(basis);
  for (int k = 0; k < terms; ++k) {
    auto p = random_pure(basis, rng, keep);
    p *= w[k] / total;
    out += p;
  }
  return out;
}

// Beam splitters with random transmission and independent random phases.
inline al::InterferometerSettings random_settings(std::mt19937_64& rng, bool allow_q = true) {
  std::uniform_real_distribution<double> u(0.0, 1.0), ph(-std::numbers::pi, std::numbers::pi);
  al::InterferometerSettings s;
  const double T1 = u(rng), T2 = u(rng);
  s.t1 = std::polar(std::sqrt(T1), ph(rng));
  s.r1 = std::polar(std::sqrt(1 - T1), ph(rng));
  s.t2 = std::polar(std::sqrt(T2), ph(rng));
  s.r2 = std::polar(std::sqrt(1 - T2), ph(rng));
  s.theta_I = ph(rng);
  s.theta_II = ph(rng);
  s.Q = allow_q ? u(rng) : 1.0;
  return s;
}

inline al::ProbeEnsemble random_ensemble(const al::AnyonModel& m, std::mt19937_64& rng, bool directions) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g;
  al::ProbeEnsemble out;
  double total = 0.0;
  for (al::Index b = 0; b < m.size(); ++b) {
    if (u(rng) < 0.4) continue;
    Eigen::Matrix2cd w = Eigen::Matrix2cd::Zero();
    if (directions) {
      Eigen::Matrix2cd g2;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) g2(i, j) = cplx(g(rng), g(rng));
      w = g2 * g2.adjoint();
    } else {
      w(0, 0) = u(rng) + 0.05;
    }
    total += w.trace().real();
    out.components.push_back({b, w});
  }
  if (out.components.empty()) return al::ProbeEnsemble::single(m.size() - 1);
  for (auto& c : out.components) c.directions /= total;
  return out;
}

}  // namespace testing_support
