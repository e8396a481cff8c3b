#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "anyonlab/errors.hpp"
#include "anyonlab/fusion.hpp"

namespace al {

// Greek vertex-multiplicity indices are zero based internally.
struct FEntry {
  Index a, b, c, d, e, f;
  int alpha = 0, beta = 0, mu = 0, nu = 0;
  cplx value;
};

struct REntry {
  Index a, b, c;
  int mu = 0, nu = 0;
  cplx value;
};

// Electric-charge bookkeeping for quantum Hall models. A charge with
// quasihole count n carries electric charge n/charge_denominator (units of e);
// counts are compared modulo `period`.
struct FqhChargeMeta {
  std::vector<int> quasihole_count;
  int period = 1;
  int charge_denominator = 1;
  Index quasihole = 0;
  Index electron = 0;

  int sector(Index a) const { return ((quasihole_count[a] % period) + period) % period; }
};

// One (charge, Greek, Greek) slot of an F-matrix row or column.
struct FSlot {
  Index charge;
  int first, second;
  bool operator==(const FSlot&) const = default;
};

struct FBlock {
  std::vector<FSlot> rows, cols;
  Eigen::MatrixXcd matrix;
};

// A fusion channel of a x b with its monodromy eigenvalue and the weight
// d_c / (d_a d_b) it carries in loop averages.
struct MonodromyChannel {
  Index c;
  int mu;
  cplx eigenvalue;
  double weight;
};

class AnyonModel {
 public:
  static constexpr double kTolerance = 1e-9;

  AnyonModel() = default;
  AnyonModel(std::string name, FusionRules fusion, const std::vector<FEntry>& upper_f,
             const std::vector<REntry>& r_symbols);

  const std::string& name() const { return name_; }
  void rename(std::string name) { name_ = std::move(name); }
  const FusionRules& fusion() const { return fusion_; }
  int size() const { return fusion_.size(); }
  Index vacuum() const { return fusion_.vacuum(); }
  const std::string& label(Index a) const { return fusion_.label(a); }
  Index index(std::string_view label) const { return fusion_.index(label); }
  int N(Index a, Index b, Index c) const { return fusion_.N(a, b, c); }
  Index conjugate(Index a) const { return fusion_.conjugate(a); }
  double d(Index a) const { return fusion_.quantum_dimension(a); }
  double total_dimension() const { return fusion_.total_dimension(); }

  // [F_d^{abc}]_{(e,alpha,beta)(f,mu,nu)}; zero whenever a vertex is forbidden.
  cplx F(Index a, Index b, Index c, Index d, Index e, Index f, int alpha = 0, int beta = 0,
         int mu = 0, int nu = 0) const;
  // [F_{cd}^{ab}]_{(e,alpha,beta)(f,mu,nu)}, the leg-bent variant.
  cplx F_bent(Index a, Index b, Index c, Index d, Index e, Index f, int alpha = 0, int beta = 0,
              int mu = 0, int nu = 0) const;
  cplx R(Index a, Index b, Index c, int mu = 0, int nu = 0) const;
  const Eigen::MatrixXcd& R_matrix(Index a, Index b, Index c) const;

  FBlock upper_block(Index a, Index b, Index c, Index d) const;
  FBlock bent_block(Index a, Index b, Index c, Index d) const;

  // Raw spin from the trace formula; topological_spin additionally insists on |theta| = 1.
  cplx theta(Index a) const { return theta_.at(a); }
  cplx topological_spin(Index a) const;
  const Eigen::MatrixXcd& S() const { return S_; }
  const Eigen::MatrixXcd& M() const { return M_; }
  cplx monodromy_scalar(Index a, Index b) const;
  bool modular() const { return modular_; }

  Eigen::MatrixXcd monodromy_matrix(Index a, Index b) const;
  std::vector<MonodromyChannel> channels(Index a, Index b) const;

  ValidationReport verify() const;
  CheckOutcome check_fused_monodromy() const;

  const std::optional<FqhChargeMeta>& fqh() const { return fqh_; }
  void set_fqh(FqhChargeMeta meta);

  // Reference values from a table or file; verify() compares against them.
  void set_expected(std::vector<cplx> spins, std::vector<double> dims);
  const std::vector<cplx>& expected_spins() const { return expected_spins_; }
  const std::vector<double>& expected_dims() const { return expected_dims_; }

  std::vector<FEntry> upper_entries() const;
  std::vector<REntry> r_entries() const;

 private:
  using Key = std::uint64_t;
  static Key pack(Index a, Index b, Index c, Index d, Index e, Index f, int alpha, int beta,
                  int mu, int nu);
  static FEntry unpack(Key key, cplx value);

  std::vector<FSlot> upper_row_slots(Index a, Index b, Index c, Index d) const;
  std::vector<FSlot> upper_col_slots(Index a, Index b, Index c, Index d) const;
  std::vector<FSlot> bent_row_slots(Index a, Index b, Index c, Index d) const;
  std::vector<FSlot> bent_col_slots(Index a, Index b, Index c, Index d) const;
  void derive_bent();
  void derive_topological_data();

  std::string name_;
  FusionRules fusion_;
  std::unordered_map<Key, cplx> upper_, bent_;
  std::vector<Eigen::MatrixXcd> r_;
  std::vector<cplx> theta_;
  Eigen::MatrixXcd S_, M_, M_via_S_;
  bool modular_ = false;
  std::optional<FqhChargeMeta> fqh_;
  std::vector<cplx> expected_spins_;
  std::vector<double> expected_dims_;
};

ValidationReport verify_model(const AnyonModel& model);

}  // namespace al
