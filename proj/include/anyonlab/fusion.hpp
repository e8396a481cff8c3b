#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "anyonlab/errors.hpp"

namespace al {

struct FusionEntry {
  Index a, b, c;
  int multiplicity;
};

// A violated fusion axiom together with the charge tuple that breaks it.
struct FusionViolation {
  std::string axiom;  // commutativity | vacuum | conjugation | associativity | dimension
  std::string where;
  std::string message;
};

// Charges of a finite anyon model and their fusion multiplicities N_ab^c.
// Labels are interned once; every table downstream is keyed by dense indices.
class FusionRules {
 public:
  static constexpr double kTolerance = 1e-9;

  FusionRules() = default;
  FusionRules(std::vector<std::string> labels, Index vacuum, const std::vector<FusionEntry>& entries);

  int size() const { return static_cast<int>(labels_.size()); }
  Index vacuum() const { return vacuum_; }
  const std::string& label(Index a) const;
  const std::vector<std::string>& labels() const { return labels_; }

  // Accepts the ASCII labels as well as the Greek spellings sigma/psi/eps.
  Index index(std::string_view label) const;
  std::optional<Index> find(std::string_view label) const;

  int N(Index a, Index b, Index c) const {
    return dense_[(static_cast<size_t>(a) * n_ + b) * n_ + c];
  }
  const std::map<std::tuple<Index, Index, Index>, int>& entries() const { return sparse_; }

  // Channels c of a x b with N_ab^c >= 1, in increasing index order.
  std::vector<std::pair<Index, int>> fuse(Index a, Index b) const;

  Index conjugate(Index a) const;
  double quantum_dimension(Index a) const;
  const std::vector<double>& quantum_dimensions() const;
  double total_dimension() const;
  bool is_abelian(Index a) const;

  std::vector<FusionViolation> validate() const;

 private:
  void check_index(Index a) const;
  void compute_dimensions();

  std::vector<std::string> labels_;
  std::unordered_map<std::string, Index> lookup_;
  Index vacuum_ = 0;
  size_t n_ = 0;
  std::map<std::tuple<Index, Index, Index>, int> sparse_;
  std::vector<int> dense_;

  std::vector<double> dims_;
  std::string dims_error_;
};

std::vector<FusionViolation> validate_fusion(const FusionRules& rules);

// Replaces the Greek spellings with the ASCII labels used internally.
std::string normalize_label(std::string_view label);

}  // namespace al
