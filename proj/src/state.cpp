#include "anyonlab/state.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace al {

TargetBasis::TargetBasis(std::shared_ptr<const AnyonModel> model) : model_(std::move(model)) {
  if (!model_) fail(ErrorKind::invalid_argument, "target basis needs a model");
  const int n = model_->size();
  for (Index a = 0; a < n; ++a)
    for (Index c = 0; c < n; ++c) {
      bool any = false;
      for (Index f = 0; f < n; ++f)
        for (int mu = 0; mu < model_->N(a, c, f); ++mu) {
          if (!any) {
            pairs_.emplace_back(a, c);
            pair_states_.emplace_back();
            any = true;
          }
          const int id = static_cast<int>(states_.size());
          states_.push_back({a, c, f, mu});
          lookup_[states_.back()] = id;
          pair_states_.back().push_back(id);
          state_pair_.push_back(static_cast<int>(pairs_.size()) - 1);
        }
    }
}

int TargetBasis::find(const BasisState& s) const {
  auto it = lookup_.find(s);
  return it == lookup_.end() ? -1 : it->second;
}

int TargetBasis::require(const BasisState& s) const {
  int i = find(s);
  if (i < 0) {
    const auto& m = *model_;
    auto name = [&](Index x) { return (x >= 0 && x < m.size()) ? m.label(x) : std::string("?"); };
    fail(ErrorKind::invalid_argument, "no basis state |" + name(s.a) + "," + name(s.c) + ";" +
                                          name(s.f) + "," + std::to_string(s.mu) + ">");
  }
  return i;
}

const ChannelBlock& TargetBasis::block(int ket_pair, int bra_pair) const {
  const long key = static_cast<long>(ket_pair) * static_cast<long>(pairs_.size()) + bra_pair;
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = cache_.find(key);
  if (it != cache_.end()) return *it->second;
  auto blk = std::make_unique<ChannelBlock>(build_block(ket_pair, bra_pair));
  const ChannelBlock& ref = *blk;
  cache_.emplace(key, std::move(blk));
  return ref;
}

// Uses the bent move F_{a'c'}^{ac}: its columns are the shared overall
// charges f (with both vertex labels), its rows the difference charges e.
ChannelBlock TargetBasis::build_block(int ket_pair, int bra_pair) const {
  const auto [a, c] = pairs_[ket_pair];
  const auto [ap, cp] = pairs_[bra_pair];
  const AnyonModel& m = *model_;
  FBlock bent = m.bent_block(a, c, ap, cp);

  ChannelBlock out;
  for (const auto& slot : bent.cols) {
    out.f_states_ket.push_back(require({a, c, slot.charge, slot.first}));
    out.f_states_bra.push_back(require({ap, cp, slot.charge, slot.second}));
  }
  for (const auto& slot : bent.rows) out.e_charge.push_back(slot.charge);
  const auto nf = static_cast<Eigen::Index>(bent.cols.size());
  const auto ne = static_cast<Eigen::Index>(bent.rows.size());
  if (nf == 0) return out;
  if (ne != nf)
    fail(ErrorKind::invalid_model, "bent F block for (" + m.label(a) + "," + m.label(c) + "," +
                                       m.label(ap) + "," + m.label(cp) + ") is not square");
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(bent.matrix);
  if (!lu.isInvertible())
    fail(ErrorKind::invalid_model, "bent F block for (" + m.label(a) + "," + m.label(c) + "," +
                                       m.label(ap) + "," + m.label(cp) + ") is singular");
  Eigen::MatrixXcd inv = lu.inverse();
  out.to_e.resize(ne, nf);
  out.from_e.resize(nf, ne);
  for (Eigen::Index j = 0; j < nf; ++j) {
    const double root_d = std::sqrt(m.d(bent.cols[j].charge));
    for (Eigen::Index e = 0; e < ne; ++e) {
      out.to_e(e, j) = inv(j, e) / root_d;
      out.from_e(j, e) = root_d * bent.matrix(e, j);
    }
  }
  return out;
}

PairDensityMatrix::PairDensityMatrix(std::shared_ptr<const TargetBasis> basis)
    : basis_(std::move(basis)) {
  if (!basis_) fail(ErrorKind::invalid_argument, "density matrix needs a basis");
  coeff_ = Eigen::MatrixXcd::Zero(basis_->size(), basis_->size());
}

PairDensityMatrix PairDensityMatrix::from_pure(
    std::shared_ptr<const TargetBasis> basis, const std::vector<std::pair<BasisState, cplx>>& amplitudes) {
  PairDensityMatrix rho(std::move(basis));
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(rho.basis_->size());
  for (const auto& [s, amp] : amplitudes) psi(rho.basis_->require(s)) += amp;
  const double norm = psi.squaredNorm();
  if (std::abs(norm - 1.0) > 1e-9)
    fail(ErrorKind::invalid_argument, "pure-state amplitudes are not normalized (sum |psi|^2 = " +
                                          std::to_string(norm) + ")");
  // Charge conservation: coherences only between equal overall charge.
  for (int i = 0; i < psi.size(); ++i)
    for (int j = 0; j < psi.size(); ++j)
      if (rho.basis_->state(i).f == rho.basis_->state(j).f)
        rho.coeff_(i, j) = psi(i) * std::conj(psi(j));
  return rho;
}

PairDensityMatrix PairDensityMatrix::from_entries(
    std::shared_ptr<const TargetBasis> basis,
    const std::vector<std::tuple<BasisState, BasisState, cplx>>& entries) {
  PairDensityMatrix rho(std::move(basis));
  Eigen::MatrixXi given = Eigen::MatrixXi::Zero(rho.basis_->size(), rho.basis_->size());
  for (const auto& [ket, bra, v] : entries) {
    rho.set(ket, bra, v);
    given(rho.basis_->require(ket), rho.basis_->require(bra)) = 1;
  }
  for (int i = 0; i < given.rows(); ++i)
    for (int j = 0; j < given.cols(); ++j)
      if (given(i, j) && !given(j, i)) rho.coeff_(j, i) = std::conj(rho.coeff_(i, j));
  return rho;
}

cplx PairDensityMatrix::coeff(const BasisState& ket, const BasisState& bra) const {
  const int i = basis_->find(ket), j = basis_->find(bra);
  if (i < 0 || j < 0) return {};
  return coeff_(i, j);
}

void PairDensityMatrix::set(const BasisState& ket, const BasisState& bra, cplx value) {
  if (ket.f != bra.f)
    fail(ErrorKind::invalid_argument, "density-matrix entries must share the overall charge");
  coeff_(basis_->require(ket), basis_->require(bra)) = value;
}

void PairDensityMatrix::set_sectors(std::vector<int> sector_of_charge) {
  if (static_cast<int>(sector_of_charge.size()) != model().size())
    fail(ErrorKind::invalid_argument, "sector list must cover every charge");
  sectors_ = std::move(sector_of_charge);
}

void PairDensityMatrix::use_electric_superselection() {
  const auto& meta = model().fqh();
  if (!meta) fail(ErrorKind::invalid_argument, "model '" + model().name() + "' has no electric-charge data");
  std::vector<int> s;
  for (Index a = 0; a < model().size(); ++a) s.push_back(meta->sector(a));
  sectors_ = std::move(s);
}

PairDensityMatrix& PairDensityMatrix::operator+=(const PairDensityMatrix& other) {
  if (other.basis_.get() != basis_.get() && &other.model() != &model())
    fail(ErrorKind::invalid_argument, "cannot add density matrices over different models");
  coeff_ += other.coeff_;
  return *this;
}

PairDensityMatrix& PairDensityMatrix::operator*=(cplx s) {
  coeff_ *= s;
  return *this;
}

PairDensityMatrix PairDensityMatrix::transform_channels(
    const std::function<cplx(Index, Index, Index)>& factor) const {
  PairDensityMatrix out(basis_);
  out.sectors_ = sectors_;
  const int np = static_cast<int>(basis_->pairs().size());
  Eigen::VectorXcd x, y;
  for (int p = 0; p < np; ++p)
    for (int q = 0; q < np; ++q) {
      bool nonzero = false;
      for (int i : basis_->pair_states(p)) {
        for (int j : basis_->pair_states(q))
          if (coeff_(i, j) != cplx{}) {
            nonzero = true;
            break;
          }
        if (nonzero) break;
      }
      if (!nonzero) continue;
      const ChannelBlock& blk = basis_->block(p, q);
      const auto nf = static_cast<Eigen::Index>(blk.f_states_ket.size());
      if (nf == 0) continue;
      x.resize(nf);
      for (Eigen::Index k = 0; k < nf; ++k) x(k) = coeff_(blk.f_states_ket[k], blk.f_states_bra[k]);
      const Index a = basis_->pairs()[p].first, ap = basis_->pairs()[q].first;
      Eigen::VectorXcd mid = blk.to_e * x;
      for (Eigen::Index e = 0; e < mid.size(); ++e) mid(e) *= factor(a, ap, blk.e_charge[e]);
      y = blk.from_e * mid;
      for (Eigen::Index k = 0; k < nf; ++k) out.coeff_(blk.f_states_ket[k], blk.f_states_bra[k]) = y(k);
    }
  return out;
}

cplx quantum_trace(const PairDensityMatrix& rho) { return rho.matrix().diagonal().sum(); }

cplx standard_trace(const PairDensityMatrix& rho) {
  cplx sum = 0.0;
  const auto& basis = rho.basis();
  for (int i = 0; i < basis.size(); ++i) sum += rho.matrix()(i, i) / rho.model().d(basis.state(i).f);
  return sum;
}

std::map<Index, double> trace_out_partner(const PairDensityMatrix& rho) {
  std::map<Index, double> out;
  const auto& basis = rho.basis();
  for (int i = 0; i < basis.size(); ++i) {
    const double v = rho.matrix()(i, i).real();
    if (v != 0.0) out[basis.state(i).a] += v;
  }
  return out;
}

ValidationReport check_state(const PairDensityMatrix& rho, double tol) {
  ValidationReport rep;
  const auto& basis = rho.basis();
  const auto& m = rho.model();
  const auto& c = rho.matrix();
  const int n = basis.size();
  auto state_name = [&](int i) {
    const auto& s = basis.state(i);
    return "(" + m.label(s.a) + "," + m.label(s.c) + ";" + m.label(s.f) + ")";
  };

  CheckOutcome herm{"hermiticity"};
  CheckOutcome conservation{"charge conservation"};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      herm.record(std::abs(c(i, j) - std::conj(c(j, i))), tol, state_name(i) + state_name(j));
      if (basis.state(i).f != basis.state(j).f)
        conservation.record(std::abs(c(i, j)), tol, state_name(i) + state_name(j));
    }
  rep.checks.push_back(herm);
  rep.checks.push_back(conservation);

  CheckOutcome trace{"unit quantum trace"};
  trace.record(std::abs(quantum_trace(rho) - 1.0), tol, "trace");
  rep.checks.push_back(trace);

  CheckOutcome psd{"positivity"};
  for (Index f = 0; f < m.size(); ++f) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (basis.state(i).f == f) idx.push_back(i);
    if (idx.empty()) continue;
    Eigen::MatrixXcd block(idx.size(), idx.size());
    for (size_t i = 0; i < idx.size(); ++i)
      for (size_t j = 0; j < idx.size(); ++j) block(i, j) = c(idx[i], idx[j]);
    Eigen::MatrixXcd herm_part = 0.5 * (block + block.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm_part, Eigen::EigenvaluesOnly);
    const double lowest = es.eigenvalues().minCoeff();
    psd.record(std::max(0.0, -lowest), tol, "f=" + m.label(f));
  }
  rep.checks.push_back(psd);

  if (rho.sectors()) {
    const auto& sec = *rho.sectors();
    CheckOutcome ss{"superselection"};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const auto &x = basis.state(i), &y = basis.state(j);
        if (sec[x.a] != sec[y.a] || sec[x.c] != sec[y.c])
          ss.record(std::abs(c(i, j)), tol, state_name(i) + state_name(j));
      }
    rep.checks.push_back(ss);
  }
  return rep;
}

double state_distance(const PairDensityMatrix& x, const PairDensityMatrix& y) {
  if (x.matrix().rows() != y.matrix().rows())
    fail(ErrorKind::invalid_argument, "state distance needs states over the same basis");
  if (x.matrix().size() == 0) return 0.0;
  return (x.matrix() - y.matrix()).cwiseAbs().maxCoeff();
}

}  // namespace al
