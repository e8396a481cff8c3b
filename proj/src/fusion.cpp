#include "anyonlab/fusion.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace al {

namespace {

std::string tuple_str(const FusionRules& r, std::initializer_list<Index> xs) {
  std::string s = "(";
  bool first = true;
  for (Index x : xs) {
    if (!first) s += ",";
    s += r.label(x);
    first = false;
  }
  return s + ")";
}

}  // namespace

std::string normalize_label(std::string_view label) {
  static const std::pair<std::string_view, std::string_view> greek[] = {
      {"\xcf\x83", "sigma"}, {"\xcf\x88", "psi"}, {"\xce\xb5", "eps"}, {"\xcf\xb5", "eps"}};
  std::string out(label);
  for (const auto& [from, to] : greek) {
    for (size_t pos = out.find(from); pos != std::string::npos; pos = out.find(from, pos + to.size()))
      out.replace(pos, from.size(), to);
  }
  return out;
}

FusionRules::FusionRules(std::vector<std::string> labels, Index vacuum,
                         const std::vector<FusionEntry>& entries)
    : labels_(std::move(labels)), vacuum_(vacuum), n_(labels_.size()) {
  if (labels_.empty()) fail(ErrorKind::invalid_model, "a model needs at least one charge");
  for (size_t i = 0; i < labels_.size(); ++i) {
    if (!lookup_.emplace(labels_[i], static_cast<Index>(i)).second)
      fail(ErrorKind::invalid_model, "duplicate charge label '" + labels_[i] + "'");
  }
  check_index(vacuum_);
  dense_.assign(n_ * n_ * n_, 0);
  for (const auto& e : entries) {
    check_index(e.a);
    check_index(e.b);
    check_index(e.c);
    if (e.multiplicity < 0) fail(ErrorKind::invalid_model, "negative fusion multiplicity");
    if (e.multiplicity == 0) continue;
    sparse_[{e.a, e.b, e.c}] = e.multiplicity;
    dense_[(static_cast<size_t>(e.a) * n_ + e.b) * n_ + e.c] = e.multiplicity;
  }
  compute_dimensions();
}

void FusionRules::check_index(Index a) const {
  if (a < 0 || static_cast<size_t>(a) >= n_)
    fail(ErrorKind::unknown_charge, "charge index " + std::to_string(a) + " out of range");
}

const std::string& FusionRules::label(Index a) const {
  check_index(a);
  return labels_[a];
}

std::optional<Index> FusionRules::find(std::string_view label) const {
  if (auto it = lookup_.find(std::string(label)); it != lookup_.end()) return it->second;
  if (auto it = lookup_.find(normalize_label(label)); it != lookup_.end()) return it->second;
  return std::nullopt;
}

Index FusionRules::index(std::string_view label) const {
  if (auto i = find(label)) return *i;
  fail(ErrorKind::unknown_charge, "unknown charge '" + std::string(label) + "'");
}

std::vector<std::pair<Index, int>> FusionRules::fuse(Index a, Index b) const {
  check_index(a);
  check_index(b);
  std::vector<std::pair<Index, int>> out;
  for (Index c = 0; c < size(); ++c)
    if (int m = N(a, b, c); m > 0) out.emplace_back(c, m);
  return out;
}

Index FusionRules::conjugate(Index a) const {
  check_index(a);
  Index found = -1;
  for (Index b = 0; b < size(); ++b) {
    int m = N(a, b, vacuum_);
    if (m == 0) continue;
    if (m != 1 || found >= 0)
      fail(ErrorKind::invalid_model, "charge '" + labels_[a] + "' has no unique conjugate");
    found = b;
  }
  if (found < 0) fail(ErrorKind::invalid_model, "charge '" + labels_[a] + "' has no conjugate");
  return found;
}

// d_a is the spectral radius of the non-negative matrix (N_a)_{bc} = N_ab^c.
void FusionRules::compute_dimensions() {
  dims_.assign(n_, 0.0);
  for (Index a = 0; a < size(); ++a) {
    Eigen::MatrixXd na(n_, n_);
    for (Index b = 0; b < size(); ++b)
      for (Index c = 0; c < size(); ++c) na(b, c) = N(a, b, c);
    Eigen::EigenSolver<Eigen::MatrixXd> es(na, false);
    if (es.info() != Eigen::Success) {
      dims_error_ = "eigensolve failed for the fusion matrix of '" + labels_[a] + "'";
      return;
    }
    double radius = 0.0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
      radius = std::max(radius, std::abs(es.eigenvalues()[k]));
    dims_[a] = radius;
  }
}

const std::vector<double>& FusionRules::quantum_dimensions() const {
  if (!dims_error_.empty()) fail(ErrorKind::numerical, dims_error_);
  return dims_;
}

double FusionRules::quantum_dimension(Index a) const {
  check_index(a);
  return quantum_dimensions()[a];
}

double FusionRules::total_dimension() const {
  double sum = 0.0;
  for (double d : quantum_dimensions()) sum += d * d;
  return std::sqrt(sum);
}

bool FusionRules::is_abelian(Index a) const {
  bool by_fusion = true;
  for (Index b = 0; b < size() && by_fusion; ++b) {
    int total = 0;
    for (Index c = 0; c < size(); ++c) total += N(a, b, c);
    by_fusion = (total == 1);
  }
  bool by_dimension = std::abs(quantum_dimension(a) - 1.0) < kTolerance;
  if (by_fusion != by_dimension)
    fail(ErrorKind::invalid_model,
         "abelian criteria disagree for '" + labels_[a] + "' (fusion vs quantum dimension)");
  return by_fusion;
}

std::vector<FusionViolation> FusionRules::validate() const { return validate_fusion(*this); }

std::vector<FusionViolation> validate_fusion(const FusionRules& r) {
  std::vector<FusionViolation> out;
  const int n = r.size();
  const Index one = r.vacuum();

  for (Index a = 0; a < n; ++a)
    for (Index b = a + 1; b < n; ++b)
      for (Index c = 0; c < n; ++c)
        if (r.N(a, b, c) != r.N(b, a, c))
          out.push_back({"commutativity", tuple_str(r, {a, b, c}), "N_ab^c != N_ba^c"});

  for (Index a = 0; a < n; ++a)
    for (Index c = 0; c < n; ++c) {
      int expect = (a == c) ? 1 : 0;
      if (r.N(a, one, c) != expect)
        out.push_back({"vacuum", tuple_str(r, {a, one, c}), "N_{a1}^c must equal delta_ac"});
      else if (r.N(one, a, c) != expect)
        out.push_back({"vacuum", tuple_str(r, {one, a, c}), "N_{1a}^c must equal delta_ac"});
    }

  std::vector<Index> conj(n, -1);
  for (Index a = 0; a < n; ++a) {
    int count = 0;
    bool bad_mult = false;
    for (Index b = 0; b < n; ++b) {
      int m = r.N(a, b, one);
      if (m > 0) {
        ++count;
        conj[a] = b;
        bad_mult = bad_mult || (m != 1);
      }
    }
    if (count != 1 || bad_mult) {
      out.push_back({"conjugation", "(" + r.label(a) + ")",
                     count == 0 ? "no conjugate charge" : "conjugate charge is not unique"});
      conj[a] = -1;
    }
  }
  if (conj[one] >= 0 && conj[one] != one)
    out.push_back({"conjugation", "(" + r.label(one) + ")", "vacuum is not self-conjugate"});
  for (Index a = 0; a < n; ++a)
    if (conj[a] >= 0 && conj[conj[a]] != a)
      out.push_back({"conjugation", "(" + r.label(a) + ")", "conjugation is not an involution"});

  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b)
      for (Index c = 0; c < n; ++c)
        for (Index d = 0; d < n; ++d) {
          long lhs = 0, rhs = 0;
          for (Index x = 0; x < n; ++x) {
            lhs += static_cast<long>(r.N(a, b, x)) * r.N(x, c, d);
            rhs += static_cast<long>(r.N(a, x, d)) * r.N(b, c, x);
          }
          if (lhs != rhs)
            out.push_back({"associativity", tuple_str(r, {a, b, c, d}),
                           "sum_e N_ab^e N_ec^d != sum_f N_af^d N_bc^f"});
        }
  return out;
}

}  // namespace al
