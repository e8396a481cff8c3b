#include "anyonlab/model.hpp"

#include <cmath>
#include <sstream>

namespace al {

namespace {

constexpr int kMaxCharges = 255;
constexpr int kMaxGreek = 16;

std::string tuple_label(const AnyonModel& m, std::initializer_list<Index> xs) {
  std::string s = "(";
  bool first = true;
  for (Index x : xs) {
    if (!first) s += ",";
    s += m.label(x);
    first = false;
  }
  return s + ")";
}

double unitarity_residual(const Eigen::MatrixXcd& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  return (u * u.adjoint() - id).cwiseAbs().maxCoeff();
}

}  // namespace

AnyonModel::Key AnyonModel::pack(Index a, Index b, Index c, Index d, Index e, Index f, int alpha,
                                 int beta, int mu, int nu) {
  Key k = 0;
  for (Index x : {a, b, c, d, e, f}) k = (k << 8) | static_cast<Key>(x);
  for (int g : {alpha, beta, mu, nu}) k = (k << 4) | static_cast<Key>(g);
  return k;
}

FEntry AnyonModel::unpack(Key key, cplx value) {
  FEntry out;
  out.nu = static_cast<int>(key & 0xF);
  out.mu = static_cast<int>((key >> 4) & 0xF);
  out.beta = static_cast<int>((key >> 8) & 0xF);
  out.alpha = static_cast<int>((key >> 12) & 0xF);
  key >>= 16;
  Index* charges[] = {&out.f, &out.e, &out.d, &out.c, &out.b, &out.a};
  for (Index* x : charges) {
    *x = static_cast<Index>(key & 0xFF);
    key >>= 8;
  }
  out.value = value;
  return out;
}

AnyonModel::AnyonModel(std::string name, FusionRules fusion, const std::vector<FEntry>& upper_f,
                       const std::vector<REntry>& r_symbols)
    : name_(std::move(name)), fusion_(std::move(fusion)) {
  const int n = size();
  if (n > kMaxCharges) fail(ErrorKind::invalid_model, "too many charges (limit 255)");

  for (const auto& e : upper_f) {
    for (Index x : {e.a, e.b, e.c, e.d, e.e, e.f})
      if (x < 0 || x >= n) fail(ErrorKind::unknown_charge, "F entry references an unknown charge");
    const int na = N(e.a, e.b, e.e), nb = N(e.e, e.c, e.d);
    const int nc = N(e.b, e.c, e.f), nd = N(e.a, e.f, e.d);
    if (na == 0 || nb == 0 || nc == 0 || nd == 0)
      fail(ErrorKind::invalid_model, "F entry on a forbidden vertex at " +
                                         tuple_label(*this, {e.a, e.b, e.c, e.d, e.e, e.f}));
    if (e.alpha < 0 || e.alpha >= na || e.beta < 0 || e.beta >= nb || e.mu < 0 || e.mu >= nc ||
        e.nu < 0 || e.nu >= nd || std::max({na, nb, nc, nd}) > kMaxGreek)
      fail(ErrorKind::invalid_model, "F entry has a multiplicity index out of range at " +
                                         tuple_label(*this, {e.a, e.b, e.c, e.d, e.e, e.f}));
    upper_[pack(e.a, e.b, e.c, e.d, e.e, e.f, e.alpha, e.beta, e.mu, e.nu)] = e.value;
  }

  r_.assign(static_cast<size_t>(n) * n * n, Eigen::MatrixXcd());
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b)
      for (Index c = 0; c < n; ++c)
        if (int m = N(a, b, c); m > 0)
          r_[(static_cast<size_t>(a) * n + b) * n + c] = Eigen::MatrixXcd::Zero(m, m);
  for (const auto& e : r_symbols) {
    for (Index x : {e.a, e.b, e.c})
      if (x < 0 || x >= n) fail(ErrorKind::unknown_charge, "R entry references an unknown charge");
    const int m = N(e.a, e.b, e.c);
    if (m == 0)
      fail(ErrorKind::invalid_model,
           "R entry on a forbidden vertex at " + tuple_label(*this, {e.a, e.b, e.c}));
    if (e.mu < 0 || e.mu >= m || e.nu < 0 || e.nu >= m)
      fail(ErrorKind::invalid_model,
           "R entry has a multiplicity index out of range at " + tuple_label(*this, {e.a, e.b, e.c}));
    r_[(static_cast<size_t>(e.a) * n + e.b) * n + e.c](e.mu, e.nu) = e.value;
  }

  derive_bent();
  derive_topological_data();
}

cplx AnyonModel::F(Index a, Index b, Index c, Index d, Index e, Index f, int alpha, int beta,
                   int mu, int nu) const {
  auto it = upper_.find(pack(a, b, c, d, e, f, alpha, beta, mu, nu));
  return it == upper_.end() ? cplx{} : it->second;
}

cplx AnyonModel::F_bent(Index a, Index b, Index c, Index d, Index e, Index f, int alpha, int beta,
                        int mu, int nu) const {
  auto it = bent_.find(pack(a, b, c, d, e, f, alpha, beta, mu, nu));
  return it == bent_.end() ? cplx{} : it->second;
}

const Eigen::MatrixXcd& AnyonModel::R_matrix(Index a, Index b, Index c) const {
  static const Eigen::MatrixXcd empty;
  const int n = size();
  if (a < 0 || b < 0 || c < 0 || a >= n || b >= n || c >= n) return empty;
  return r_[(static_cast<size_t>(a) * n + b) * n + c];
}

cplx AnyonModel::R(Index a, Index b, Index c, int mu, int nu) const {
  const auto& m = R_matrix(a, b, c);
  if (mu < 0 || nu < 0 || mu >= m.rows() || nu >= m.cols()) return {};
  return m(mu, nu);
}

// Upper F_d^{abc}: rows (e, alpha, beta) with e in a x b and d in e x c,
// columns (f, mu, nu) with f in b x c and d in a x f.
std::vector<FSlot> AnyonModel::upper_row_slots(Index a, Index b, Index c, Index d) const {
  std::vector<FSlot> out;
  for (Index e = 0; e < size(); ++e)
    for (int al = 0; al < N(a, b, e); ++al)
      for (int be = 0; be < N(e, c, d); ++be) out.push_back({e, al, be});
  return out;
}

std::vector<FSlot> AnyonModel::upper_col_slots(Index a, Index b, Index c, Index d) const {
  std::vector<FSlot> out;
  for (Index f = 0; f < size(); ++f)
    for (int mu = 0; mu < N(b, c, f); ++mu)
      for (int nu = 0; nu < N(a, f, d); ++nu) out.push_back({f, mu, nu});
  return out;
}

// Bent F_{cd}^{ab}: rows (e, alpha, beta) with a in c x e and d in e x b,
// columns (f, mu, nu) with f in a x b and f in c x d.
std::vector<FSlot> AnyonModel::bent_row_slots(Index a, Index b, Index c, Index d) const {
  std::vector<FSlot> out;
  for (Index e = 0; e < size(); ++e)
    for (int al = 0; al < N(c, e, a); ++al)
      for (int be = 0; be < N(e, b, d); ++be) out.push_back({e, al, be});
  return out;
}

std::vector<FSlot> AnyonModel::bent_col_slots(Index a, Index b, Index c, Index d) const {
  std::vector<FSlot> out;
  for (Index f = 0; f < size(); ++f)
    for (int mu = 0; mu < N(a, b, f); ++mu)
      for (int nu = 0; nu < N(c, d, f); ++nu) out.push_back({f, mu, nu});
  return out;
}

FBlock AnyonModel::upper_block(Index a, Index b, Index c, Index d) const {
  FBlock blk{upper_row_slots(a, b, c, d), upper_col_slots(a, b, c, d), {}};
  blk.matrix.resize(blk.rows.size(), blk.cols.size());
  for (size_t i = 0; i < blk.rows.size(); ++i)
    for (size_t j = 0; j < blk.cols.size(); ++j) {
      const auto &r = blk.rows[i], &s = blk.cols[j];
      blk.matrix(i, j) = F(a, b, c, d, r.charge, s.charge, r.first, r.second, s.first, s.second);
    }
  return blk;
}

FBlock AnyonModel::bent_block(Index a, Index b, Index c, Index d) const {
  FBlock blk{bent_row_slots(a, b, c, d), bent_col_slots(a, b, c, d), {}};
  blk.matrix.resize(blk.rows.size(), blk.cols.size());
  for (size_t i = 0; i < blk.rows.size(); ++i)
    for (size_t j = 0; j < blk.cols.size(); ++j) {
      const auto &r = blk.rows[i], &s = blk.cols[j];
      blk.matrix(i, j) =
          F_bent(a, b, c, d, r.charge, s.charge, r.first, r.second, s.first, s.second);
    }
  return blk;
}

void AnyonModel::derive_bent() {
  const int n = size();
  const auto& dims = fusion_.quantum_dimensions();
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b)
      for (Index c = 0; c < n; ++c)
        for (Index d = 0; d < n; ++d) {
          auto rows = bent_row_slots(a, b, c, d);
          if (rows.empty()) continue;
          auto cols = bent_col_slots(a, b, c, d);
          for (const auto& r : rows)
            for (const auto& s : cols) {
              const double scale = std::sqrt(dims[r.charge] * dims[s.charge] / (dims[a] * dims[d]));
              // conj([F_f^{ceb}]_{(a,alpha,mu)(d,beta,nu)})
              cplx v = std::conj(F(c, r.charge, b, s.charge, a, d, r.first, s.first, r.second,
                                   s.second));
              if (v != cplx{})
                bent_[pack(a, b, c, d, r.charge, s.charge, r.first, r.second, s.first, s.second)] =
                    scale * v;
            }
        }
}

void AnyonModel::derive_topological_data() {
  const int n = size();
  const auto& dims = fusion_.quantum_dimensions();
  const double D = fusion_.total_dimension();

  theta_.assign(n, cplx{});
  for (Index a = 0; a < n; ++a)
    for (Index c = 0; c < n; ++c) {
      const auto& rm = R_matrix(a, a, c);
      if (rm.size() > 0) theta_[a] += (dims[c] / dims[a]) * rm.trace();
    }

  // Both S and M are built from the same channel sum of spin ratios.
  Eigen::MatrixXcd loop = Eigen::MatrixXcd::Zero(n, n);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b)
      for (Index c = 0; c < n; ++c)
        if (int m = N(a, b, c); m > 0) loop(a, b) += double(m) * theta_[c] / (theta_[a] * theta_[b]) * dims[c];

  S_ = loop / D;
  M_.resize(n, n);
  M_via_S_.resize(n, n);
  const Index one = vacuum();
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) {
      M_(a, b) = loop(a, b) / (dims[a] * dims[b]);
      M_via_S_(a, b) = S_(a, b) * S_(one, one) / (S_(one, a) * S_(one, b));
    }
  modular_ = unitarity_residual(S_) < kTolerance;
}

cplx AnyonModel::topological_spin(Index a) const {
  cplx t = theta_.at(a);
  if (std::abs(std::abs(t) - 1.0) > kTolerance)
    fail(ErrorKind::numerical, "topological spin of '" + label(a) +
                                   "' is not a unit phase; the R-symbols are inconsistent");
  return t;
}

cplx AnyonModel::monodromy_scalar(Index a, Index b) const {
  cplx v = M_(a, b);
  if (std::abs(v - M_via_S_(a, b)) > kTolerance)
    fail(ErrorKind::numerical, "monodromy cross-check failed at " + tuple_label(*this, {a, b}));
  return v;
}

Eigen::MatrixXcd AnyonModel::monodromy_matrix(Index a, Index b) const {
  int dim = 0;
  for (Index c = 0; c < size(); ++c) dim += N(a, b, c);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  int offset = 0;
  for (Index c = 0; c < size(); ++c) {
    const int m = N(a, b, c);
    if (m == 0) continue;
    out.block(offset, offset, m, m) = R_matrix(a, b, c) * R_matrix(b, a, c);
    offset += m;
  }
  return out;
}

std::vector<MonodromyChannel> AnyonModel::channels(Index a, Index b) const {
  std::vector<MonodromyChannel> out;
  const double norm = d(a) * d(b);
  for (Index c = 0; c < size(); ++c)
    for (int mu = 0; mu < N(a, b, c); ++mu)
      out.push_back({c, mu, theta_[c] / (theta_[a] * theta_[b]), d(c) / norm});
  return out;
}

void AnyonModel::set_fqh(FqhChargeMeta meta) {
  if (static_cast<int>(meta.quasihole_count.size()) != size())
    fail(ErrorKind::invalid_model, "quasihole counts must cover every charge");
  if (meta.period <= 0 || meta.charge_denominator <= 0)
    fail(ErrorKind::invalid_model, "electric period and denominator must be positive");
  fqh_ = std::move(meta);
}

void AnyonModel::set_expected(std::vector<cplx> spins, std::vector<double> dims) {
  if ((!spins.empty() && static_cast<int>(spins.size()) != size()) ||
      (!dims.empty() && static_cast<int>(dims.size()) != size()))
    fail(ErrorKind::invalid_model, "reference spins/dimensions must cover every charge");
  expected_spins_ = std::move(spins);
  expected_dims_ = std::move(dims);
}

std::vector<FEntry> AnyonModel::upper_entries() const {
  std::vector<std::pair<Key, cplx>> sorted(upper_.begin(), upper_.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<FEntry> out;
  out.reserve(sorted.size());
  for (const auto& [k, v] : sorted) out.push_back(unpack(k, v));
  return out;
}

std::vector<REntry> AnyonModel::r_entries() const {
  std::vector<REntry> out;
  const int n = size();
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b)
      for (Index c = 0; c < n; ++c) {
        const auto& m = R_matrix(a, b, c);
        for (int i = 0; i < m.rows(); ++i)
          for (int j = 0; j < m.cols(); ++j) out.push_back({a, b, c, i, j, m(i, j)});
      }
  return out;
}

CheckOutcome AnyonModel::check_fused_monodromy() const {
  CheckOutcome out{"fused monodromy"};
  const int n = size();
  for (Index b = 0; b < n; ++b)
    for (Index e = 0; e < n; ++e) {
      if (std::abs(std::abs(M_(b, e)) - 1.0) > kTolerance) continue;
      for (Index a = 0; a < n; ++a)
        for (Index c = 0; c < n; ++c)
          if (N(a, b, c) != 0)
            out.record(std::abs(M_(c, e) - M_(a, e) * M_(b, e)), kTolerance,
                       tuple_label(*this, {a, b, c, e}));
    }
  return out;
}

ValidationReport AnyonModel::verify() const {
  ValidationReport rep;
  const int n = size();
  const Index one = vacuum();

  CheckOutcome fusion_check{"fusion axioms"};
  for (const auto& v : fusion_.validate()) fusion_check.record(1.0, 0.0, v.axiom + " " + v.where);
  std::vector<double> dims;
  try {
    dims = fusion_.quantum_dimensions();
  } catch (const Error& e) {
    fusion_check.record(1.0, 0.0, std::string("dimension ") + e.what());
  }
  if (!dims.empty()) {
    for (Index a = 0; a < n; ++a)
      for (Index b = 0; b < n; ++b) {
        double sum = 0.0;
        for (Index c = 0; c < n; ++c) sum += N(a, b, c) * dims[c];
        fusion_check.record(std::abs(dims[a] * dims[b] - sum), kTolerance,
                            "dimension " + tuple_label(*this, {a, b}));
      }
  }
  rep.checks.push_back(fusion_check);
  // Later checks need conjugates and dimensions; a broken fusion algebra ends the run here.
  if (!fusion_check.passed) return rep;

  CheckOutcome unitary{"F unitarity"};
  CheckOutcome normalization{"F normalization"};
  CheckOutcome bent_rel{"bent/upper relation"};
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b)
      for (Index c = 0; c < n; ++c)
        for (Index d = 0; d < n; ++d) {
          auto up = upper_block(a, b, c, d);
          if (!up.rows.empty() || !up.cols.empty())
            unitary.record(unitarity_residual(up.matrix), kTolerance,
                           "F" + tuple_label(*this, {a, b, c, d}));
          auto bent = bent_block(a, b, c, d);
          if (!bent.rows.empty() || !bent.cols.empty())
            unitary.record(unitarity_residual(bent.matrix), kTolerance,
                           "bentF" + tuple_label(*this, {a, b, c, d}));
          // Every admissible bent entry must agree with the upper table.
          for (const auto& r : bent.rows)
            for (const auto& s : bent.cols) {
              cplx expect = std::sqrt(dims[r.charge] * dims[s.charge] / (dims[a] * dims[d])) *
                            std::conj(F(c, r.charge, b, s.charge, a, d, r.first, s.first, r.second,
                                        s.second));
              cplx got = F_bent(a, b, c, d, r.charge, s.charge, r.first, r.second, s.first, s.second);
              bent_rel.record(std::abs(got - expect), kTolerance,
                              tuple_label(*this, {a, b, c, d, r.charge, s.charge}));
            }
        }
  for (const auto& [key, value] : bent_) {
    FEntry e = unpack(key, value);
    const bool admissible = e.alpha < N(e.c, e.e, e.a) && e.beta < N(e.e, e.b, e.d) &&
                            e.mu < N(e.a, e.b, e.f) && e.nu < N(e.c, e.d, e.f);
    if (!admissible)
      bent_rel.record(std::abs(value), 0.0, "forbidden " + tuple_label(*this, {e.a, e.b, e.c, e.d, e.e, e.f}));
  }
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b)
      for (Index c = 0; c < n; ++c)
        for (int mu = 0; mu < N(a, b, c); ++mu)
          for (int nu = 0; nu < N(a, b, c); ++nu) {
            double expect = mu == nu ? std::sqrt(dims[c] / (dims[a] * dims[b])) : 0.0;
            normalization.record(std::abs(F_bent(a, b, a, b, one, c, 0, 0, mu, nu) - expect),
                                 kTolerance, tuple_label(*this, {a, b, c}));
          }
  rep.checks.push_back(unitary);
  rep.checks.push_back(normalization);
  rep.checks.push_back(bent_rel);

  CheckOutcome r_unitary{"R unitarity"};
  CheckOutcome ribbon{"ribbon property"};
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b)
      for (Index c = 0; c < n; ++c) {
        const int m = N(a, b, c);
        if (m == 0) continue;
        const auto& rab = R_matrix(a, b, c);
        r_unitary.record(unitarity_residual(rab), kTolerance, tuple_label(*this, {a, b, c}));
        Eigen::MatrixXcd twist = rab * R_matrix(b, a, c);
        Eigen::MatrixXcd expect =
            (theta_[c] / (theta_[a] * theta_[b])) * Eigen::MatrixXcd::Identity(m, m);
        ribbon.record((twist - expect).cwiseAbs().maxCoeff(), kTolerance,
                      tuple_label(*this, {a, b, c}));
      }
  for (Index a = 0; a < n; ++a) {
    ribbon.record(std::abs(std::abs(theta_[a]) - 1.0), kTolerance, "|theta| " + label(a));
    ribbon.record(std::abs(theta_[a] - theta_[conjugate(a)]), kTolerance, "theta conj " + label(a));
  }
  ribbon.record(std::abs(theta_[one] - 1.0), kTolerance, "theta vacuum");
  rep.checks.push_back(r_unitary);
  rep.checks.push_back(ribbon);

  CheckOutcome s_check{"S symmetry/conjugation/dimensions"};
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) {
      s_check.record(std::abs(S_(a, b) - S_(b, a)), kTolerance, "symmetry " + tuple_label(*this, {a, b}));
      s_check.record(std::abs(S_(a, b) - std::conj(S_(conjugate(a), b))), kTolerance,
                     "conjugation " + tuple_label(*this, {a, b}));
    }
    s_check.record(std::abs(dims[a] - S_(one, a) / S_(one, one)), kTolerance, "d-row " + label(a));
  }
  rep.checks.push_back(s_check);

  CheckOutcome m_cross{"M cross-check"};
  CheckOutcome m_bound{"|M| <= 1"};
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) {
      m_cross.record(std::abs(M_(a, b) - M_via_S_(a, b)), kTolerance, tuple_label(*this, {a, b}));
      m_bound.record(std::max(0.0, std::abs(M_(a, b)) - 1.0), kTolerance, tuple_label(*this, {a, b}));
    }
    m_bound.record(std::abs(M_(one, a) - 1.0), kTolerance, "vacuum row " + label(a));
  }
  rep.checks.push_back(m_cross);
  rep.checks.push_back(m_bound);
  rep.checks.push_back(check_fused_monodromy());

  if (!expected_spins_.empty()) {
    CheckOutcome c{"reference spins"};
    for (Index a = 0; a < n; ++a)
      c.record(std::abs(theta_[a] - expected_spins_[a]), kTolerance, label(a));
    rep.checks.push_back(c);
  }
  if (!expected_dims_.empty()) {
    CheckOutcome c{"reference dimensions"};
    for (Index a = 0; a < n; ++a) c.record(std::abs(dims[a] - expected_dims_[a]), kTolerance, label(a));
    rep.checks.push_back(c);
  }
  if (fqh_) {
    CheckOutcome c{"electric charge additivity"};
    for (Index a = 0; a < n; ++a)
      for (Index b = 0; b < n; ++b)
        for (Index x = 0; x < n; ++x)
          if (N(a, b, x) && (fqh_->quasihole_count[a] + fqh_->quasihole_count[b] -
                             fqh_->quasihole_count[x]) % fqh_->period != 0)
            c.record(1.0, 0.0, tuple_label(*this, {a, b, x}));
    rep.checks.push_back(c);
  }

  rep.modular = modular_;
  return rep;
}

ValidationReport verify_model(const AnyonModel& model) { return model.verify(); }

}  // namespace al
