#include "anyonlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <memory>
#include <numbers>
#include <sstream>

#include "anyonlab/fqh.hpp"
#include "anyonlab/mach_zehnder.hpp"
#include "anyonlab/state.hpp"

namespace al {

namespace {

constexpr const char* kRngDescription = "mt19937_64; u = (draw >> 11) * 2^-53; outcome 0 when u < Pr(0)";
constexpr const char* kFqhCaveat =
    "single-species tunneling: corrections from non-fundamental excitations tunneling at higher order are not "
    "modeled";
constexpr double kZeroProbability = 1e-15;

struct Tolerances {
  double cls = 1e-7;
  double series = 1e-12;
  double state = 1e-9;
};

[[noreturn]] void usage(const std::string& what) { fail(ErrorKind::invalid_argument, what); }

const Json* find(const Json& obj, const char* key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double number(const Json& obj, const char* key, double fallback, const std::string& where) {
  const Json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) fail(ErrorKind::parse, where + "/" + key + ": expected a number");
  return v->get<double>();
}

// Angles are plain radians or {"pi": x} meaning x * pi.
double angle(const Json& obj, const char* key, double fallback, const std::string& where) {
  const Json* v = find(obj, key);
  if (!v) return fallback;
  if (v->is_number()) return v->get<double>();
  if (const Json* p = find(*v, "pi"); p && p->is_number()) return p->get<double>() * std::numbers::pi;
  fail(ErrorKind::parse, where + "/" + key + ": expected radians or {\"pi\": multiple}");
}

long long integer(const Json& obj, const char* key, const std::string& where) {
  const Json* v = find(obj, key);
  if (!v) fail(ErrorKind::parse, where + ": missing key '" + key + "'");
  if (!v->is_number_integer()) fail(ErrorKind::parse, where + "/" + key + ": expected an integer");
  return v->get<long long>();
}

std::string text(const Json& obj, const char* key, const std::string& fallback, const std::string& where) {
  const Json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) fail(ErrorKind::parse, where + "/" + key + ": expected a string");
  return v->get<std::string>();
}

bool flag(const Json& obj, const char* key, bool fallback, const std::string& where) {
  const Json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) fail(ErrorKind::parse, where + "/" + key + ": expected true or false");
  return v->get<bool>();
}

Index charge(const AnyonModel& m, const Json& j, const std::string& where) {
  if (!j.is_string()) fail(ErrorKind::parse, where + ": charge labels must be strings");
  auto idx = m.fusion().find(j.get<std::string>());
  if (!idx) fail(ErrorKind::unknown_charge, where + ": model '" + m.name() + "' has no charge '" + j.get<std::string>() + "'");
  return *idx;
}

BasisState basis_state(const AnyonModel& m, const Json& j, int mu, const std::string& where) {
  if (!j.is_array() || j.size() != 3) fail(ErrorKind::parse, where + ": expected [a, c, f]");
  return {charge(m, j[0], where + "/0"), charge(m, j[1], where + "/1"), charge(m, j[2], where + "/2"), mu};
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

Json state_label(const AnyonModel& m, const BasisState& s) {
  Json j = Json::array({m.label(s.a), m.label(s.c), m.label(s.f)});
  return j;
}

Json state_to_json(const PairDensityMatrix& rho) {
  const auto& basis = rho.basis();
  const auto& m = rho.model();
  Json entries = Json::array();
  for (int i = 0; i < basis.size(); ++i)
    for (int j = 0; j < basis.size(); ++j) {
      const cplx v = rho.matrix()(i, j);
      if (std::abs(v) <= kZeroProbability) continue;
      Json e;
      e["ket"] = state_label(m, basis.state(i));
      e["bra"] = state_label(m, basis.state(j));
      if (basis.state(i).mu || basis.state(j).mu) e["mu"] = Json::array({basis.state(i).mu, basis.state(j).mu});
      e["value"] = complex_to_json(v);
      entries.push_back(e);
    }
  Json out;
  out["quantum_trace"] = quantum_trace(rho).real();
  Json marg = Json::object();
  for (const auto& [a, w] : trace_out_partner(rho)) marg[m.label(a)] = w;
  out["charge_probabilities"] = marg;
  out["entries"] = entries;
  return out;
}

// Everything a config describes, resolved against its model.
struct Experiment {
  Json config;
  std::string source;
  std::shared_ptr<const AnyonModel> model;
  std::shared_ptr<const TargetBasis> basis;
  bool fqh_device = false;
  InterferometerSettings mz;
  FqhSettings fqh;
  ProbeEnsemble probe;
  Index fqh_probe = 0;
  std::vector<ProbeEnsemble> probe_sequence;
  std::optional<PairDensityMatrix> target;
  bool superselection = false;
  Tolerances tol;
  Json run = Json::object();
};

InterferometerSettings parse_mz_settings(const Json& s) {
  const std::string where = "/settings";
  InterferometerSettings out;
  if (find(s, "transmission")) {
    out = InterferometerSettings::symmetric(number(s, "transmission", 0.5, where), angle(s, "theta", 0.0, where));
  } else {
    if (const Json* v = find(s, "t1")) out.t1 = complex_from_json(*v, where + "/t1");
    if (const Json* v = find(s, "r1")) out.r1 = complex_from_json(*v, where + "/r1");
    if (const Json* v = find(s, "t2")) out.t2 = complex_from_json(*v, where + "/t2");
    if (const Json* v = find(s, "r2")) out.r2 = complex_from_json(*v, where + "/r2");
    out.theta_I = angle(s, "theta_I", 0.0, where);
    out.theta_II = angle(s, "theta_II", 0.0, where);
  }
  out.Q = number(s, "Q", 1.0, where);
  if (const Json* p = find(s, "placement")) {
    if (!p->is_string()) fail(ErrorKind::parse, where + "/placement: expected a string");
    out.placement = parse_placement(p->get<std::string>());
  }
  out.validate();
  return out;
}

FqhSettings parse_fqh_settings(const Json& s, std::optional<double> max_override) {
  const std::string where = "/settings";
  FqhSettings out;
  if (const Json* v = find(s, "t")) {
    if (!v->is_number()) fail(ErrorKind::parse, where + "/t: expected a number");
    out.t1 = out.t2 = v->get<double>();
  }
  if (const Json* v = find(s, "t1")) out.t1 = complex_from_json(*v, where + "/t1");
  if (const Json* v = find(s, "t2")) out.t2 = complex_from_json(*v, where + "/t2");
  out.r1_phase = angle(s, "r1_phase", 0.0, where);
  out.r2_phase = angle(s, "r2_phase", 0.0, where);
  out.theta_I = angle(s, "theta_I", 0.0, where);
  out.theta_II = angle(s, "theta_II", 0.0, where);
  out.Q = number(s, "Q", 1.0, where);
  out.max_tunneling = number(s, "max_tunneling", out.max_tunneling, where);
  if (max_override) out.max_tunneling = *max_override;
  if (find(s, "beta")) out.set_beta(angle(s, "beta", 0.0, where));
  out.validate();
  return out;
}

ProbeEnsemble parse_probe(const AnyonModel& m, const Json& p, const std::string& where) {
  if (const Json* c = find(p, "charge")) return ProbeEnsemble::single(charge(m, *c, where + "/charge"));
  const Json* comps = find(p, "components");
  if (!comps || !comps->is_array()) fail(ErrorKind::parse, where + ": expected 'charge' or a 'components' array");
  ProbeEnsemble out;
  for (size_t k = 0; k < comps->size(); ++k) {
    const std::string w = where + "/components/" + std::to_string(k);
    const Json& c = (*comps)[k];
    const Json* label = find(c, "charge");
    if (!label) fail(ErrorKind::parse, w + ": missing key 'charge'");
    Eigen::Matrix2cd dir = Eigen::Matrix2cd::Zero();
    if (const Json* d = find(c, "directions")) {
      if (!d->is_array() || d->size() != 2) fail(ErrorKind::parse, w + "/directions: expected a 2x2 matrix");
      for (int i = 0; i < 2; ++i) {
        if (!(*d)[i].is_array() || (*d)[i].size() != 2) fail(ErrorKind::parse, w + "/directions: expected a 2x2 matrix");
        for (int j = 0; j < 2; ++j)
          dir(i, j) = complex_from_json((*d)[i][j], w + "/directions/" + std::to_string(i) + "/" + std::to_string(j));
      }
    } else {
      dir(0, 0) = number(c, "weight", 1.0, w);
    }
    out.components.push_back({charge(m, *label, w + "/charge"), dir});
  }
  out.validate(m);
  return out;
}

PairDensityMatrix parse_target(const Experiment& ex, const Json& t, const std::string& where) {
  const AnyonModel& m = *ex.model;
  PairDensityMatrix rho;
  if (const Json* c = find(t, "charge")) {
    const Index a = charge(m, *c, where + "/charge");
    rho = PairDensityMatrix::from_pure(ex.basis, {{{a, m.conjugate(a), m.vacuum()}, 1.0}});
  } else if (const Json* pure = find(t, "pure")) {
    if (!pure->is_array()) fail(ErrorKind::parse, where + "/pure: expected an array");
    std::vector<std::pair<BasisState, cplx>> amps;
    for (size_t k = 0; k < pure->size(); ++k) {
      const std::string w = where + "/pure/" + std::to_string(k);
      const Json& e = (*pure)[k];
      const Json* st = find(e, "state");
      const Json* amp = find(e, "amplitude");
      if (!st || !amp) fail(ErrorKind::parse, w + ": expected 'state' and 'amplitude'");
      const int mu = static_cast<int>(number(e, "mu", 0, w));
      amps.emplace_back(basis_state(m, *st, mu, w + "/state"), complex_from_json(*amp, w + "/amplitude"));
    }
    rho = PairDensityMatrix::from_pure(ex.basis, amps);
  } else if (const Json* dens = find(t, "density")) {
    if (!dens->is_array()) fail(ErrorKind::parse, where + "/density: expected an array");
    std::vector<std::tuple<BasisState, BasisState, cplx>> entries;
    for (size_t k = 0; k < dens->size(); ++k) {
      const std::string w = where + "/density/" + std::to_string(k);
      const Json& e = (*dens)[k];
      const Json* ket = find(e, "ket");
      const Json* bra = find(e, "bra");
      const Json* val = find(e, "value");
      if (!ket || !bra || !val) fail(ErrorKind::parse, w + ": expected 'ket', 'bra' and 'value'");
      int mk = 0, mb = 0;
      if (const Json* mu = find(e, "mu")) {
        if (!mu->is_array() || mu->size() != 2) fail(ErrorKind::parse, w + "/mu: expected [ket_mu, bra_mu]");
        mk = (*mu)[0].get<int>();
        mb = (*mu)[1].get<int>();
      }
      entries.emplace_back(basis_state(m, *ket, mk, w + "/ket"), basis_state(m, *bra, mb, w + "/bra"),
                           complex_from_json(*val, w + "/value"));
    }
    rho = PairDensityMatrix::from_entries(ex.basis, entries);
  } else {
    fail(ErrorKind::parse, where + ": expected 'charge', 'pure' or 'density'");
  }
  if (flag(t, "superselection", ex.superselection, where)) rho.use_electric_superselection();
  const auto report = check_state(rho, ex.tol.state);
  if (!report.passed()) {
    std::string failed;
    for (const auto& c : report.checks)
      if (!c.passed) failed += (failed.empty() ? "" : ", ") + c.name;
    usage(where + ": target is not a valid density matrix (" + failed + ")");
  }
  return rho;
}

Experiment build_experiment(const Json& config, const std::string& source, const CommandRequest& req) {
  Experiment ex;
  ex.config = config;
  ex.source = source;
  if (!config.is_object()) fail(ErrorKind::parse, source + ": a config must be a JSON object");
  std::string model_ref = req.model.empty() ? text(config, "model", "", "") : req.model;
  if (model_ref.empty()) usage("no model given: pass --model or set 'model' in the config");
  ex.model = std::make_shared<const AnyonModel>(resolve_model(model_ref));
  ex.basis = std::make_shared<const TargetBasis>(ex.model);

  const std::string device = text(config, "device", "mach_zehnder", "");
  if (device == "fqh")
    ex.fqh_device = true;
  else if (device != "mach_zehnder")
    usage("/device: expected 'mach_zehnder' or 'fqh', got '" + device + "'");
  ex.superselection = ex.fqh_device;

  if (const Json* t = find(config, "tolerances")) {
    ex.tol.cls = number(*t, "class", ex.tol.cls, "/tolerances");
    ex.tol.series = number(*t, "series", ex.tol.series, "/tolerances");
    ex.tol.state = number(*t, "state", ex.tol.state, "/tolerances");
  }

  const Json settings = find(config, "settings") ? config["settings"] : Json::object();
  const Json probe = find(config, "probe") ? config["probe"] : Json::object();
  if (ex.fqh_device) {
    ex.fqh = parse_fqh_settings(settings, req.max_tunneling);
    if (!ex.model->fqh()) usage("model '" + ex.model->name() + "' has no electric-charge data for the fqh device");
    ex.fqh_probe = find(probe, "charge") ? charge(*ex.model, probe["charge"], "/probe/charge") : ex.model->fqh()->quasihole;
    ex.probe = ProbeEnsemble::single(ex.fqh_probe);
  } else {
    ex.mz = parse_mz_settings(settings);
    if (const Json* seq = find(probe, "sequence")) {
      if (!seq->is_array() || seq->empty()) fail(ErrorKind::parse, "/probe/sequence: expected a non-empty array");
      for (size_t k = 0; k < seq->size(); ++k)
        ex.probe_sequence.push_back(parse_probe(*ex.model, (*seq)[k], "/probe/sequence/" + std::to_string(k)));
      ex.probe = ex.probe_sequence.front();
    } else if (!probe.empty()) {
      ex.probe = parse_probe(*ex.model, probe, "/probe");
    } else {
      usage("/probe: a Mach-Zehnder experiment needs a probe block");
    }
  }

  if (const Json* t = find(config, "target")) ex.target = parse_target(ex, *t, "/target");
  if (const Json* r = find(config, "run")) {
    if (!r->is_object()) fail(ErrorKind::parse, "/run: expected an object");
    ex.run = *r;
  }
  return ex;
}

PCoefficients coefficients(const Experiment& ex, const ProbeEnsemble& probe) {
  if (ex.fqh_device)
    return fqh_p_coefficients(*ex.model, ex.fqh_probe, ex.fqh, ex.superselection, ex.tol.series);
  return p_coefficients(*ex.model, probe, ex.mz);
}

Json classes_json(const Experiment& ex, const ChargeClassPartition& parts, const PairDensityMatrix* rho) {
  Json arr = Json::array();
  for (size_t k = 0; k < parts.classes.size(); ++k) {
    Json c;
    c["index"] = k;
    Json labels = Json::array();
    for (Index a : parts.classes[k].charges) labels.push_back(ex.model->label(a));
    c["charges"] = labels;
    c["p"] = parts.classes[k].p;
    if (rho) c["probability"] = class_probability(*rho, parts, static_cast<int>(k));
    arr.push_back(c);
  }
  return arr;
}

Json settings_json(const Experiment& ex) {
  Json s;
  if (ex.fqh_device) {
    s["t1"] = complex_to_json(ex.fqh.t1);
    s["t2"] = complex_to_json(ex.fqh.t2);
    s["r1"] = complex_to_json(ex.fqh.r1());
    s["r2"] = complex_to_json(ex.fqh.r2());
    s["theta_I"] = ex.fqh.theta_I;
    s["theta_II"] = ex.fqh.theta_II;
    s["beta"] = ex.fqh.beta();
    s["Q"] = ex.fqh.Q;
    s["max_tunneling"] = ex.fqh.max_tunneling;
    s["probe"] = ex.model->label(ex.fqh_probe);
  } else {
    s["t1"] = complex_to_json(ex.mz.t1);
    s["r1"] = complex_to_json(ex.mz.r1);
    s["t2"] = complex_to_json(ex.mz.t2);
    s["r2"] = complex_to_json(ex.mz.r2);
    s["theta_I"] = ex.mz.theta_I;
    s["theta_II"] = ex.mz.theta_II;
    s["Q"] = ex.mz.Q;
    s["placement"] = placement_name(ex.mz.placement);
    s["T"] = ex.mz.T();
  }
  return s;
}

// ---- verbs -----------------------------------------------------------------

struct VerbOutput {
  Json payload;
  std::string csv;
  std::string summary;
  int exit_code = kExitOk;
};

VerbOutput verb_verify(const AnyonModel& m) {
  VerbOutput out;
  const ValidationReport rep = verify_model(m);
  Json checks = Json::array();
  std::ostringstream csv, sum;
  csv << "check,passed,worst_residual\n";
  for (const auto& c : rep.checks) {
    Json j;
    j["name"] = c.name;
    j["passed"] = c.passed;
    j["worst_residual"] = c.worst_residual;
    Json off = Json::array();
    for (size_t k = 0; k < c.offenders.size() && k < 20; ++k) off.push_back(c.offenders[k]);
    j["offenders"] = off;
    j["offender_count"] = c.offenders.size();
    checks.push_back(j);
    csv << '"' << c.name << "\"," << (c.passed ? "true" : "false") << ',' << std::setprecision(17) << c.worst_residual
        << '\n';
    if (!c.passed) {
      sum << "FAIL " << c.name << " (worst residual " << c.worst_residual << ")";
      for (size_t k = 0; k < c.offenders.size() && k < 5; ++k) sum << (k ? ", " : ": ") << c.offenders[k];
      sum << '\n';
    }
  }
  out.payload["passed"] = rep.passed();
  out.payload["modular"] = rep.modular;
  out.payload["worst_residual"] = rep.worst_residual();
  out.payload["charges"] = m.size();
  out.payload["total_dimension"] = m.total_dimension();
  Json dims = Json::array(), spins = Json::array(), labels = Json::array();
  for (Index a = 0; a < m.size(); ++a) {
    labels.push_back(m.label(a));
    dims.push_back(m.d(a));
    spins.push_back(complex_to_json(m.theta(a)));
  }
  out.payload["labels"] = labels;
  out.payload["dims"] = dims;
  out.payload["spins"] = spins;
  out.payload["checks"] = checks;
  out.csv = csv.str();
  std::ostringstream head;
  head << "verify " << m.name() << ": " << (rep.passed() ? "pass" : "FAIL") << ", " << m.size()
       << " charges, D = " << std::setprecision(10) << m.total_dimension() << ", modular = "
       << (rep.modular ? "true" : "false") << ", worst residual " << std::setprecision(3) << rep.worst_residual() << '\n';
  out.summary = head.str() + sum.str();
  out.exit_code = rep.passed() ? kExitOk : kExitVerificationFailed;
  return out;
}

VerbOutput verb_classes(const Experiment& ex) {
  VerbOutput out;
  const PCoefficients p = coefficients(ex, ex.probe);
  const ChargeClassPartition parts = charge_classes(p, ex.tol.cls);
  const PairDensityMatrix* rho = ex.target ? &*ex.target : nullptr;
  out.payload["classes"] = classes_json(ex, parts, rho);
  Json per = Json::array();
  for (Index a = 0; a < ex.model->size(); ++a) {
    Json c;
    c["charge"] = ex.model->label(a);
    c["p_right"] = p.diagonal(kOutcomeRight, a);
    c["p_other"] = p.diagonal(kOutcomeOther, a);
    c["class"] = parts.class_of[a];
    c["M_aB"] = complex_to_json(ex.probe.monodromy(*ex.model, a));
    per.push_back(c);
  }
  out.payload["charges"] = per;
  Json verdicts = Json::array();
  for (const auto& v : perfect_distinguishability(parts)) {
    Json j;
    j["first"] = v.first;
    j["second"] = v.second;
    j["verdict"] = distinguishability_name(v.verdict);
    verdicts.push_back(j);
  }
  out.payload["distinguishability"] = verdicts;
  if (!ex.fqh_device) {
    const RogueReport rogue = detect_rogue(*ex.model, ex.probe, ex.mz, ex.tol.cls);
    Json r;
    r["trivial_case"] = rogue.trivial_case;
    Json tuned = Json::array();
    for (const auto& t : rogue.tuned_pairs) {
      Json j;
      j["a"] = ex.model->label(t.a);
      j["a_prime"] = ex.model->label(t.ap);
      j["theta"] = t.theta;
      j["theta_residual"] = t.theta_residual;
      tuned.push_back(j);
    }
    r["tuned_pairs"] = tuned;
    r["quasi_fixed_count"] = rogue.quasi_fixed.size();
    out.payload["rogue"] = r;
  }
  std::ostringstream csv, sum;
  csv << "class,charges,p" << (rho ? ",probability" : "") << '\n';
  sum << "classes (" << parts.classes.size() << "):\n";
  for (size_t k = 0; k < parts.classes.size(); ++k) {
    std::string labels;
    for (Index a : parts.classes[k].charges) labels += (labels.empty() ? "" : " ") + ex.model->label(a);
    csv << k << ",\"" << labels << "\"," << std::setprecision(17) << parts.classes[k].p;
    sum << "  {" << labels << "} p = " << std::setprecision(10) << parts.classes[k].p;
    if (rho) {
      const double pr = class_probability(*rho, parts, static_cast<int>(k));
      csv << ',' << std::setprecision(17) << pr;
      sum << ", Pr = " << std::setprecision(10) << pr;
    }
    csv << '\n';
    sum << '\n';
  }
  out.csv = csv.str();
  out.summary = sum.str();
  return out;
}

int argmax_class(const PairDensityMatrix& rho, const ChargeClassPartition& parts) {
  int best = 0;
  double top = -1.0;
  for (size_t k = 0; k < parts.classes.size(); ++k) {
    const double pr = class_probability(rho, parts, static_cast<int>(k));
    if (pr > top) {
      top = pr;
      best = static_cast<int>(k);
    }
  }
  return best;
}

VerbOutput verb_run(const Experiment& ex, const CommandRequest& req, Json& provenance) {
  if (!ex.target) usage("/target: the run command needs a target state");
  VerbOutput out;
  const PairDensityMatrix& rho = *ex.target;
  const PCoefficients p = coefficients(ex, ex.probe);
  const ChargeClassPartition parts = charge_classes(p, ex.tol.cls);
  const std::string mode = text(ex.run, "mode", "closed_form", "/run");
  out.payload["mode"] = mode;
  out.payload["classes"] = classes_json(ex, parts, &rho);
  std::ostringstream sum, csv;

  if (mode == "closed_form") {
    const long long N = integer(ex.run, "N", "/run"), n = integer(ex.run, "n", "/run");
    const Posterior post = n_probe_posterior(rho, p, N, n);
    out.payload["N"] = N;
    out.payload["n"] = n;
    out.payload["probability"] = post.probability;
    Json after = Json::array();
    csv << "class,prior,posterior\n";
    for (size_t k = 0; k < parts.classes.size(); ++k) {
      const double pr = class_probability(post.state, parts, static_cast<int>(k));
      after.push_back(pr);
      csv << k << ',' << std::setprecision(17) << class_probability(rho, parts, static_cast<int>(k)) << ',' << pr << '\n';
    }
    out.payload["posterior_class_probabilities"] = after;
    out.payload["state"] = state_to_json(post.state);
    sum << "closed form: Pr_" << N << "(" << n << ") = " << std::setprecision(10) << post.probability
        << "; posterior class weights";
    for (const auto& v : after) sum << ' ' << std::setprecision(6) << v.get<double>();
    sum << '\n';
  } else if (mode == "averaged") {
    const long long N = integer(ex.run, "N", "/run");
    out.payload["N"] = N;
    const PairDensityMatrix avg = averaged_state(rho, p, N);
    out.payload["state"] = state_to_json(avg);
    csv << "N,quantum_trace\n" << N << ',' << std::setprecision(17) << quantum_trace(avg).real() << '\n';
    sum << "averaged over all outcomes after " << N << " probes\n";
  } else if (mode == "limit") {
    const double r = number(ex.run, "r", std::nan(""), "/run");
    if (!std::isfinite(r)) usage("/run/r: limit mode needs the observed fraction r");
    const LimitDescription lim = classify_limit(rho, p, parts, r);
    const char* kind = lim.kind == LimitCase::single_class       ? "single_class"
                       : lim.kind == LimitCase::interval_endpoint ? "interval_endpoint"
                                                                  : "nearest_supported";
    out.payload["r"] = r;
    out.payload["case"] = kind;
    out.payload["congruous"] = lim.congruous;
    out.payload["delta"] = lim.delta;
    out.payload["state"] = state_to_json(lim.state);
    csv << "class,delta\n";
    for (size_t k = 0; k < lim.delta.size(); ++k) csv << k << ',' << std::setprecision(17) << lim.delta[k] << '\n';
    sum << "large-N limit at r = " << r << ": " << kind << '\n';
  } else if (mode == "sampling") {
    const long long N = integer(ex.run, "N", "/run");
    const bool m2m = flag(ex.run, "many_to_many", false, "/run");
    const int threads = static_cast<int>(number(ex.run, "threads", 1, "/run"));
    std::vector<std::uint64_t> seeds;
    if (const Json* list = find(ex.run, "seeds"); list && list->is_array()) {
      if (req.seed) usage("--seed cannot be combined with an explicit seed list");
      for (const auto& s : *list) {
        if (!s.is_number_unsigned()) fail(ErrorKind::parse, "/run/seeds: expected non-negative integers");
        seeds.push_back(s.get<std::uint64_t>());
      }
    } else {
      std::uint64_t base = 0;
      if (req.seed)
        base = *req.seed;
      else if (const Json* s = find(ex.run, "seed"); s && s->is_number_unsigned())
        base = s->get<std::uint64_t>();
      else
        usage("/run/seed: sampling mode needs a seed (config or --seed)");
      const long long runs = find(ex.run, "runs") ? integer(ex.run, "runs", "/run") : 1;
      if (runs < 1) usage("/run/runs must be positive");
      for (long long k = 0; k < runs; ++k) seeds.push_back(base + static_cast<std::uint64_t>(k));
    }
    provenance["seeds"] = {{"first", seeds.front()}, {"count", seeds.size()}};

    std::vector<SampleRun> runs;
    if (!ex.probe_sequence.empty()) {
      std::vector<PCoefficients> tables;
      for (const auto& pe : ex.probe_sequence) tables.push_back(coefficients(ex, pe));
      std::vector<const PCoefficients*> order;
      for (long long k = 0; k < N; ++k) order.push_back(&tables[static_cast<size_t>(k) % tables.size()]);
      for (auto s : seeds) runs.push_back(sample_run(rho, order, s, m2m));
    } else if (find(ex.run, "seeds")) {
      for (auto s : seeds) runs.push_back(sample_run(rho, p, N, s, m2m));
    } else {
      runs = sample_runs(rho, p, N, seeds.front(), static_cast<int>(seeds.size()), threads, m2m);
    }

    std::vector<long long> counts(parts.classes.size(), 0);
    Json arr = Json::array();
    csv << "seed,n_right,r_final,final_class\n";
    for (const auto& r : runs) {
      const int k = m2m ? -1 : argmax_class(r.final_state, parts);
      if (k >= 0) ++counts[k];
      long long right = 0;
      std::string outcomes;
      outcomes.reserve(r.outcomes.size());
      for (int o : r.outcomes) {
        outcomes.push_back(o == kOutcomeRight ? '0' : '1');
        right += o == kOutcomeRight;
      }
      Json j;
      j["seed"] = r.seed;
      j["n_right"] = right;
      j["r_final"] = r.r_trace.empty() ? 0.0 : r.r_trace.back();
      j["outcomes"] = outcomes;
      if (!m2m) {
        j["final_class"] = k;
        Json w = Json::array();
        for (size_t c = 0; c < parts.classes.size(); ++c)
          w.push_back(class_probability(r.final_state, parts, static_cast<int>(c)));
        j["final_class_probabilities"] = w;
      }
      arr.push_back(j);
      csv << r.seed << ',' << right << ',' << std::setprecision(17) << j["r_final"].get<double>() << ',' << k << '\n';
    }
    out.payload["N"] = N;
    out.payload["many_to_many"] = m2m;
    out.payload["runs"] = arr;
    if (!m2m) {
      Json stats = Json::array();
      const double total = static_cast<double>(runs.size());
      bool within = true;
      for (size_t k = 0; k < parts.classes.size(); ++k) {
        const double expected = class_probability(rho, parts, static_cast<int>(k));
        const double freq = counts[k] / total;
        const double sigma = std::sqrt(expected * (1.0 - expected) / total);
        const bool ok = std::abs(freq - expected) <= 3.0 * sigma + 1e-12;
        within = within && ok;
        stats.push_back({{"class", k}, {"count", counts[k]}, {"frequency", freq}, {"expected", expected},
                         {"sigma", sigma}, {"within_3_sigma", ok}});
      }
      out.payload["class_statistics"] = stats;
      out.payload["all_within_3_sigma"] = within;
      sum << "sampling: " << runs.size() << " runs of N = " << N << "; class frequencies";
      for (size_t k = 0; k < counts.size(); ++k) sum << ' ' << std::setprecision(4) << counts[k] / total;
      sum << (within ? " (within 3 sigma)" : " (OUTSIDE 3 sigma)") << '\n';
    } else {
      sum << "sampling (many-to-many): " << runs.size() << " runs of N = " << N << '\n';
    }
  } else {
    usage("/run/mode: expected closed_form, sampling, averaged or limit");
  }
  out.csv = csv.str();
  out.summary = sum.str();
  return out;
}

VerbOutput verb_curve(const Experiment& ex) {
  if (!ex.fqh_device) usage("the curve command needs device = fqh");
  VerbOutput out;
  std::vector<double> grid;
  if (const Json* g = find(ex.run, "beta_grid")) {
    if (g->is_array()) {
      for (const auto& v : *g) {
        if (!v.is_number()) fail(ErrorKind::parse, "/run/beta_grid: expected numbers");
        grid.push_back(v.get<double>());
      }
    } else {
      grid = uniform_beta_grid(static_cast<int>(integer(*g, "points", "/run/beta_grid")));
    }
  } else {
    grid = uniform_beta_grid(64);
  }
  if (grid.empty()) usage("/run/beta_grid is empty");

  std::vector<std::pair<std::string, PairDensityMatrix>> targets;
  if (const Json* ts = find(ex.config, "targets")) {
    if (!ts->is_array() || ts->empty()) fail(ErrorKind::parse, "/targets: expected a non-empty array");
    for (size_t k = 0; k < ts->size(); ++k) {
      const std::string w = "/targets/" + std::to_string(k);
      targets.emplace_back(text((*ts)[k], "name", "target" + std::to_string(k), w), parse_target(ex, (*ts)[k], w));
    }
  } else if (ex.target) {
    targets.emplace_back("target", *ex.target);
  } else {
    usage("the curve command needs 'target' or 'targets'");
  }

  const int kmax = std::min<int>(8, static_cast<int>(grid.size()) / 2);
  Json curves = Json::array();
  std::vector<std::vector<CurvePoint>> all;
  std::vector<double> first_harmonic;
  std::ostringstream sum;
  for (const auto& [name, rho] : targets) {
    auto curve = conductance_curve(rho, ex.fqh_probe, ex.fqh, grid);
    Json pts = Json::array();
    for (const auto& pt : curve) pts.push_back(Json::array({pt.beta, pt.conductance}));
    Json harm = Json::array();
    int dominant = 0;
    double top = -1.0;
    for (int k = 0; k <= kmax; ++k) {
      const cplx h = curve_harmonic(curve, k);
      harm.push_back({{"k", k}, {"amplitude", std::abs(h)}, {"phase", std::arg(h)}});
      if (k >= 1 && std::abs(h) > top) {
        top = std::abs(h);
        dominant = k;
      }
    }
    // A flat curve has no dominant harmonic; report 0 rather than round-off noise.
    if (top <= 1e-12 * std::max(1.0, std::abs(curve_harmonic(curve, 0)))) dominant = 0;
    first_harmonic.push_back(kmax >= 1 ? std::abs(curve_harmonic(curve, 1)) : 0.0);
    curves.push_back({{"name", name}, {"points", pts}, {"harmonics", harm}, {"dominant_harmonic", dominant}});
    sum << "curve " << name << ": dominant harmonic " << dominant << ", |h1| = " << std::setprecision(6)
        << first_harmonic.back() << '\n';
    all.push_back(std::move(curve));
  }
  out.payload["grid_points"] = grid.size();
  out.payload["curves"] = curves;
  if (targets.size() > 1 && first_harmonic.front() > 0.0) {
    Json ratios = Json::array();
    for (size_t k = 1; k < targets.size(); ++k) {
      const double ratio = first_harmonic[k] / first_harmonic.front();
      ratios.push_back({{"name", targets[k].first}, {"relative_to", targets.front().first}, {"ratio", ratio}});
      sum << "fringe ratio " << targets[k].first << "/" << targets.front().first << " = " << std::setprecision(10)
          << ratio << '\n';
    }
    out.payload["fringe_ratios"] = ratios;
  }
  std::ostringstream csv;
  csv << "beta";
  for (const auto& t : targets) csv << ",G_" << t.first;
  csv << '\n' << std::setprecision(17);
  for (size_t i = 0; i < grid.size(); ++i) {
    csv << grid[i];
    for (const auto& c : all) csv << ',' << c[i].conductance;
    csv << '\n';
  }
  out.csv = csv.str();
  out.summary = sum.str();
  return out;
}

VerbOutput verb_plan(const Experiment* ex, const Json& run) {
  VerbOutput out;
  std::vector<double> alphas;
  if (const Json* a = find(run, "alpha")) {
    if (a->is_array())
      for (const auto& v : *a) alphas.push_back(v.get<double>());
    else if (a->is_number())
      alphas.push_back(a->get<double>());
  }
  if (alphas.empty()) usage("/run/alpha: the plan command needs a significance level");

  struct Pair {
    std::string first, second;
    double p1, p2;
    std::optional<double> dM;
  };
  std::vector<Pair> pairs;
  std::optional<double> t;
  if (const Json* tv = find(run, "t")) t = tv->get<double>();
  std::optional<double> dM_given;
  if (const Json* d = find(run, "delta_M")) dM_given = d->get<double>();

  if (const Json* ps = find(run, "p")) {
    if (!ps->is_array() || ps->size() < 2) fail(ErrorKind::parse, "/run/p: expected at least two probabilities");
    for (size_t i = 0; i < ps->size(); ++i)
      for (size_t j = i + 1; j < ps->size(); ++j)
        pairs.push_back({std::to_string(i), std::to_string(j), (*ps)[i].get<double>(), (*ps)[j].get<double>(), dM_given});
  } else {
    if (!ex) usage("/run/p: give explicit probabilities or a model experiment");
    const PCoefficients p = coefficients(*ex, ex->probe);
    const ChargeClassPartition parts = charge_classes(p, ex->tol.cls);
    if (!t && ex->fqh_device) t = std::abs(ex->fqh.t1);
    for (size_t i = 0; i < parts.classes.size(); ++i)
      for (size_t j = i + 1; j < parts.classes.size(); ++j) {
        const Index a = parts.classes[i].charges.front(), b = parts.classes[j].charges.front();
        const double dM = std::abs(ex->probe.monodromy(*ex->model, a) - ex->probe.monodromy(*ex->model, b));
        pairs.push_back({ex->model->label(a), ex->model->label(b), parts.classes[i].p, parts.classes[j].p,
                         dM_given ? dM_given : std::optional<double>(dM)});
      }
  }
  double current = 0.0;
  if (const Json* c = find(run, "current")) current = c->get<double>();

  Json table = Json::array();
  for (double a : alphas) table.push_back({{"alpha", a}, {"z_star", z_star(a)}});
  out.payload["z_star"] = table;
  Json rows = Json::array();
  std::ostringstream csv, sum;
  csv << "first,second,alpha,z_star,p1,p2,N_estimate,N_required,N_conservative,N_small_t,tau_seconds\n";
  for (const auto& pr : pairs) {
    Json row;
    row["first"] = pr.first;
    row["second"] = pr.second;
    row["p1"] = pr.p1;
    row["p2"] = pr.p2;
    row["delta_p"] = std::abs(pr.p1 - pr.p2);
    Json est = Json::array();
    for (double a : alphas) {
      Json e;
      e["alpha"] = a;
      e["z_star"] = z_star(a);
      const auto exact = probes_needed(pr.p1, pr.p2, a);
      const auto estimate = probes_estimate(pr.p1, pr.p2, a);
      e["indistinguishable"] = !exact.has_value();
      e["N_estimate"] = estimate ? Json(*estimate) : Json(nullptr);
      e["N_required"] = exact ? Json(*exact) : Json(nullptr);
      const double dp = std::abs(pr.p1 - pr.p2);
      e["N_conservative"] = dp > 0.0 ? Json(probes_needed_conservative(dp, a)) : Json(nullptr);
      Json small = nullptr, tau = nullptr;
      if (t && pr.dM && *pr.dM > 0.0 && *t > 0.0) {
        small = probes_needed_small_t(*t, *pr.dM, a);
        if (current != 0.0) tau = measurement_time(*t, *pr.dM, a, current);
      }
      e["N_small_t"] = small;
      e["tau_seconds"] = tau;
      est.push_back(e);
      auto cell = [](const Json& j) { return j.is_null() ? std::string() : j.dump(); };
      csv << pr.first << ',' << pr.second << ',' << a << ',' << std::setprecision(17) << z_star(a) << ',' << pr.p1
          << ',' << pr.p2 << ',' << cell(e["N_estimate"]) << ',' << (exact ? std::to_string(*exact) : std::string("indistinguishable")) << ','
          << cell(e["N_conservative"]) << ',' << cell(small) << ',' << cell(tau) << '\n';
      sum << pr.first << " vs " << pr.second << " at alpha = " << a << ": "
          << (exact ? "N = " + std::to_string(*exact) : std::string("indistinguishable"));
      if (estimate) sum << " (estimate " << std::setprecision(6) << *estimate << ")";
      sum << '\n';
    }
    row["estimates"] = est;
    rows.push_back(row);
  }
  out.payload["pairs"] = rows;
  out.csv = csv.str();
  out.summary = sum.str();
  return out;
}

Json load_config(const CommandRequest& req, std::string& source) {
  if (!req.config_path.empty()) {
    source = req.config_path;
    return read_json_file(req.config_path);
  }
  if (!req.config_text.empty()) {
    source = "<config>";
    return parse_json_text(req.config_text, source);
  }
  source.clear();
  return Json::object();
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::numerical:
    case ErrorKind::zero_probability: return kExitNumerical;
    case ErrorKind::invalid_model: return kExitVerificationFailed;
    default: return kExitUsage;
  }
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

CommandResult run_command(const CommandRequest& req) {
  CommandResult res;
  try {
    if (req.format != "json" && req.format != "csv") usage("--format must be json or csv");
    std::string source;
    const Json config = load_config(req, source);
    // Hash the key-sorted compact form so that formatting does not matter.
    const std::string canonical = nlohmann::json(config).dump();

    Json provenance;
    provenance["library_version"] = kLibraryVersion;
    provenance["config_hash"] = "fnv1a64:" + hex64(fnv1a64(canonical));
    if (req.seed) provenance["seed"] = *req.seed;
    provenance["rng"] = kRngDescription;

    VerbOutput vo;
    std::string model_name;
    if (req.verb == "verify" || req.verb == "export-model") {
      std::string ref = req.model.empty() ? text(config, "model", "", "") : req.model;
      if (ref.empty()) usage("no model given: pass --model or set 'model' in the config");
      const AnyonModel m = resolve_model(ref);
      model_name = m.name();
      if (req.verb == "export-model") {
        if (req.format != "json") usage("export-model only writes JSON");
        res.payload = export_model(m);
        res.summary = "exported " + m.name() + " (" + std::to_string(m.size()) + " charges)\n";
      } else {
        vo = verb_verify(m);
        provenance["tolerances"] = {{"model", AnyonModel::kTolerance}};
      }
    } else if (req.verb == "plan" && !find(config, "model") && req.model.empty()) {
      vo = verb_plan(nullptr, find(config, "run") ? config["run"] : Json::object());
    } else if (req.verb == "classes" || req.verb == "run" || req.verb == "curve" || req.verb == "plan") {
      if (source.empty()) usage("the " + req.verb + " command needs --config");
      const Experiment ex = build_experiment(config, source, req);
      model_name = ex.model->name();
      provenance["tolerances"] = {{"class", ex.tol.cls},
                                  {"series", ex.tol.series},
                                  {"state", ex.tol.state},
                                  {"zero_probability", kZeroProbability}};
      if (ex.fqh_device) provenance["caveat"] = kFqhCaveat;
      if (req.verb == "classes")
        vo = verb_classes(ex);
      else if (req.verb == "run")
        vo = verb_run(ex, req, provenance);
      else if (req.verb == "curve")
        vo = verb_curve(ex);
      else
        vo = verb_plan(&ex, ex.run);
      vo.payload["settings"] = settings_json(ex);
    } else {
      usage("unknown command '" + req.verb + "'");
    }

    if (req.verb != "export-model") {
      res.record["command"] = req.verb;
      res.record["model"] = model_name;
      res.record["payload"] = vo.payload;
      res.record["provenance"] = provenance;
      res.payload = req.format == "csv" ? vo.csv : res.record.dump(2) + "\n";
      res.summary = vo.summary;
      res.exit_code = vo.exit_code;
    }

    std::string out = req.out;
    if (out.empty() && config.is_object())
      if (const Json* r = find(config, "run")) out = text(*r, "output", "", "/run");
    if (!out.empty()) {
      write_file_atomic(out, res.payload);
      res.written_to = out;
    }
  } catch (const Error& e) {
    res.exit_code = exit_code_for(e.kind());
    res.summary = std::string("error: ") + e.what() + "\n";
    res.record = Json();
    res.payload.clear();
  } catch (const std::exception& e) {
    res.exit_code = kExitUsage;
    res.summary = std::string("error: ") + e.what() + "\n";
    res.record = Json();
    res.payload.clear();
  }
  return res;
}

}  // namespace al
