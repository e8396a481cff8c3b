#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "anyonlab/model.hpp"

namespace al {

// |a, c; f, mu>: target charge a, partner charge c, overall charge f.
struct BasisState {
  Index a, c, f;
  int mu = 0;
  auto operator<=>(const BasisState&) const = default;
};

// Change of basis for one (a, c, a', c') coefficient block between the
// overall-charge slots (f, mu, mu') and the difference-charge slots (e, alpha, beta).
struct ChannelBlock {
  std::vector<int> f_states_ket, f_states_bra;  // basis indices per f slot
  std::vector<Index> e_charge;                  // difference charge per e slot
  Eigen::MatrixXcd to_e, from_e;
};

// Enumerates every admissible |a,c;f,mu> of a model and caches the
// bent-F block transforms used by probe updates.
class TargetBasis {
 public:
  explicit TargetBasis(std::shared_ptr<const AnyonModel> model);

  const AnyonModel& model() const { return *model_; }
  const std::shared_ptr<const AnyonModel>& model_ptr() const { return model_; }
  int size() const { return static_cast<int>(states_.size()); }
  const BasisState& state(int i) const { return states_[i]; }
  const std::vector<BasisState>& states() const { return states_; }
  int find(const BasisState& s) const;
  int require(const BasisState& s) const;

  // Distinct (a, c) pairs, and the basis indices belonging to each.
  const std::vector<std::pair<Index, Index>>& pairs() const { return pairs_; }
  const std::vector<int>& pair_states(int pair) const { return pair_states_[pair]; }
  int pair_of(int state) const { return state_pair_[state]; }

  const ChannelBlock& block(int ket_pair, int bra_pair) const;

 private:
  ChannelBlock build_block(int ket_pair, int bra_pair) const;

  std::shared_ptr<const AnyonModel> model_;
  std::vector<BasisState> states_;
  std::map<BasisState, int> lookup_;
  std::vector<std::pair<Index, Index>> pairs_;
  std::vector<std::vector<int>> pair_states_;
  std::vector<int> state_pair_;
  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<long, std::unique_ptr<ChannelBlock>> cache_;
};

// Target pair density matrix. Stored coefficients follow the convention in
// which the operator carries an extra 1/d_f, so the quantum trace is a plain
// diagonal sum. Entries between different f are structurally zero.
class PairDensityMatrix {
 public:
  PairDensityMatrix() = default;
  explicit PairDensityMatrix(std::shared_ptr<const TargetBasis> basis);

  static PairDensityMatrix from_pure(std::shared_ptr<const TargetBasis> basis,
                                     const std::vector<std::pair<BasisState, cplx>>& amplitudes);
  // Entries (ket, bra, value). A missing mirror entry is filled with the conjugate.
  static PairDensityMatrix from_entries(
      std::shared_ptr<const TargetBasis> basis,
      const std::vector<std::tuple<BasisState, BasisState, cplx>>& entries);

  const TargetBasis& basis() const { return *basis_; }
  const std::shared_ptr<const TargetBasis>& basis_ptr() const { return basis_; }
  const AnyonModel& model() const { return basis_->model(); }

  cplx coeff(const BasisState& ket, const BasisState& bra) const;
  void set(const BasisState& ket, const BasisState& bra, cplx value);
  const Eigen::MatrixXcd& matrix() const { return coeff_; }
  Eigen::MatrixXcd& matrix() { return coeff_; }

  // Charge sector ids; coherences across sectors are forbidden when set.
  const std::optional<std::vector<int>>& sectors() const { return sectors_; }
  void set_sectors(std::vector<int> sector_of_charge);
  void use_electric_superselection();

  PairDensityMatrix& operator+=(const PairDensityMatrix& other);
  PairDensityMatrix& operator*=(cplx s);

  // Rewrites every (a,c)(a',c') block as x -> from_e diag(m(a,a',e)) to_e x.
  PairDensityMatrix transform_channels(const std::function<cplx(Index, Index, Index)>& factor) const;

 private:
  std::shared_ptr<const TargetBasis> basis_;
  Eigen::MatrixXcd coeff_;
  std::optional<std::vector<int>> sectors_;
};

cplx quantum_trace(const PairDensityMatrix& rho);
cplx standard_trace(const PairDensityMatrix& rho);
std::map<Index, double> trace_out_partner(const PairDensityMatrix& rho);
ValidationReport check_state(const PairDensityMatrix& rho, double tol = 1e-9);
double state_distance(const PairDensityMatrix& x, const PairDensityMatrix& y);

}  // namespace al
