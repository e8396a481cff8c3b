#include "anyonlab/model_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "anyonlab/library.hpp"

namespace al {

namespace {

constexpr const char* kFormat = "anyonlab.model";
constexpr int kVersion = 1;

[[noreturn]] void bad(const std::string& source, const std::string& where, const std::string& what) {
  fail(ErrorKind::parse, source + ": " + where + ": " + what);
}

const Json& member(const Json& obj, const char* key, const std::string& source, const std::string& where) {
  if (!obj.is_object()) bad(source, where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) bad(source, where, std::string("missing key '") + key + "'");
  return *it;
}

Index charge_of(const FusionRules& rules, const Json& j, const std::string& source, const std::string& where) {
  if (!j.is_string()) bad(source, where, "charge labels must be strings");
  auto idx = rules.find(j.get<std::string>());
  if (!idx) fail(ErrorKind::unknown_charge, source + ": " + where + ": unknown charge '" + j.get<std::string>() + "'");
  return *idx;
}

int int_of(const Json& j, const std::string& source, const std::string& where) {
  if (!j.is_number_integer()) bad(source, where, "expected an integer");
  return j.get<int>();
}

std::pair<size_t, size_t> line_column(const std::string& text, size_t byte) {
  size_t line = 1, col = 1;
  for (size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

Json complex_to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

cplx complex_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  fail(ErrorKind::parse, where + ": expected a number or an [re, im] pair");
}

Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // e.byte is one past the offending character.
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    if (auto pos = msg.find("parse error"); pos != std::string::npos) msg = msg.substr(pos);
    fail(ErrorKind::parse, source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) fail(ErrorKind::io, "short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorKind::io, "cannot move output into place at '" + path + "'");
  }
}

Json model_to_json(const AnyonModel& m) {
  Json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["name"] = m.name();

  Json charges = Json::array();
  for (Index a = 0; a < m.size(); ++a) {
    Json c;
    c["label"] = m.label(a);
    if (a == m.vacuum()) c["vacuum"] = true;
    charges.push_back(c);
  }
  doc["charges"] = charges;

  Json fusion = Json::array();
  for (const auto& [key, mult] : m.fusion().entries()) {
    const auto [a, b, c] = key;
    fusion.push_back(Json::array({m.label(a), m.label(b), m.label(c), mult}));
  }
  doc["fusion"] = fusion;

  Json F = Json::array();
  for (const auto& e : m.upper_entries()) {
    Json j;
    j["charges"] = Json::array({m.label(e.a), m.label(e.b), m.label(e.c), m.label(e.d), m.label(e.e), m.label(e.f)});
    if (e.alpha || e.beta || e.mu || e.nu) j["mult"] = Json::array({e.alpha, e.beta, e.mu, e.nu});
    j["value"] = complex_to_json(e.value);
    F.push_back(j);
  }
  doc["F"] = F;

  Json R = Json::array();
  for (const auto& e : m.r_entries()) {
    Json j;
    j["charges"] = Json::array({m.label(e.a), m.label(e.b), m.label(e.c)});
    if (e.mu || e.nu) j["mult"] = Json::array({e.mu, e.nu});
    j["value"] = complex_to_json(e.value);
    R.push_back(j);
  }
  doc["R"] = R;

  if (const auto& meta = m.fqh()) {
    Json f;
    f["quasihole"] = m.label(meta->quasihole);
    f["electron"] = m.label(meta->electron);
    f["charge_denominator"] = meta->charge_denominator;
    f["period"] = meta->period;
    f["quasihole_count"] = meta->quasihole_count;
    doc["fqh"] = f;
  }
  if (!m.expected_spins().empty() || !m.expected_dims().empty()) {
    Json ref;
    if (!m.expected_spins().empty()) {
      Json spins = Json::array();
      for (cplx z : m.expected_spins()) spins.push_back(complex_to_json(z));
      ref["spins"] = spins;
    }
    if (!m.expected_dims().empty()) ref["dims"] = m.expected_dims();
    doc["reference"] = ref;
  }
  return doc;
}

AnyonModel model_from_json(const Json& doc, const std::string& source) {
  if (!doc.is_object()) bad(source, "/", "a model file must be a JSON object");
  if (auto it = doc.find("format"); it != doc.end() && *it != kFormat)
    bad(source, "/format", "unexpected format tag");
  if (auto it = doc.find("version"); it != doc.end() && (!it->is_number_integer() || it->get<int>() != kVersion))
    bad(source, "/version", "unsupported version");
  const Json& name = member(doc, "name", source, "/");
  if (!name.is_string()) bad(source, "/name", "expected a string");

  const Json& charges = member(doc, "charges", source, "/");
  if (!charges.is_array() || charges.empty()) bad(source, "/charges", "expected a non-empty array");
  std::vector<std::string> labels;
  std::optional<Index> vacuum;
  for (size_t k = 0; k < charges.size(); ++k) {
    const std::string where = "/charges/" + std::to_string(k);
    const Json& c = charges[k];
    std::string label;
    bool is_vacuum = false;
    if (c.is_string()) {
      label = c.get<std::string>();
    } else {
      const Json& l = member(c, "label", source, where);
      if (!l.is_string()) bad(source, where + "/label", "expected a string");
      label = l.get<std::string>();
      if (auto v = c.find("vacuum"); v != c.end()) {
        if (!v->is_boolean()) bad(source, where + "/vacuum", "expected a boolean");
        is_vacuum = v->get<bool>();
      }
    }
    if (is_vacuum) {
      if (vacuum) bad(source, where, "more than one charge is flagged as the vacuum");
      vacuum = static_cast<Index>(k);
    }
    labels.push_back(label);
  }
  if (!vacuum) bad(source, "/charges", "no charge is flagged as the vacuum");

  // Resolve labels through a provisional rule set with no fusion entries.
  std::unordered_map<std::string, Index> lookup;
  for (size_t k = 0; k < labels.size(); ++k) {
    const std::string key = normalize_label(labels[k]);
    if (!lookup.emplace(key, static_cast<Index>(k)).second) bad(source, "/charges", "duplicate label '" + labels[k] + "'");
  }
  auto resolve = [&](const Json& j, const std::string& where) -> Index {
    if (!j.is_string()) bad(source, where, "charge labels must be strings");
    auto it = lookup.find(normalize_label(j.get<std::string>()));
    if (it == lookup.end())
      fail(ErrorKind::unknown_charge, source + ": " + where + ": unknown charge '" + j.get<std::string>() + "'");
    return it->second;
  };

  std::vector<FusionEntry> fusion;
  const Json& fj = member(doc, "fusion", source, "/");
  if (!fj.is_array()) bad(source, "/fusion", "expected an array");
  for (size_t k = 0; k < fj.size(); ++k) {
    const std::string where = "/fusion/" + std::to_string(k);
    const Json& e = fj[k];
    if (!e.is_array() || e.size() != 4) bad(source, where, "expected [a, b, c, N]");
    fusion.push_back({resolve(e[0], where + "/0"), resolve(e[1], where + "/1"), resolve(e[2], where + "/2"),
                      int_of(e[3], source, where + "/3")});
  }
  FusionRules rules(labels, *vacuum, fusion);

  std::vector<FEntry> F;
  const Json& Fj = member(doc, "F", source, "/");
  if (!Fj.is_array()) bad(source, "/F", "expected an array");
  for (size_t k = 0; k < Fj.size(); ++k) {
    const std::string where = "/F/" + std::to_string(k);
    const Json& e = Fj[k];
    const Json& ch = member(e, "charges", source, where);
    if (!ch.is_array() || ch.size() != 6) bad(source, where + "/charges", "expected six charge labels");
    FEntry f{};
    Index* slots[6] = {&f.a, &f.b, &f.c, &f.d, &f.e, &f.f};
    for (int s = 0; s < 6; ++s) *slots[s] = charge_of(rules, ch[s], source, where + "/charges/" + std::to_string(s));
    if (auto m = e.find("mult"); m != e.end()) {
      if (!m->is_array() || m->size() != 4) bad(source, where + "/mult", "expected [alpha, beta, mu, nu]");
      f.alpha = int_of((*m)[0], source, where + "/mult/0");
      f.beta = int_of((*m)[1], source, where + "/mult/1");
      f.mu = int_of((*m)[2], source, where + "/mult/2");
      f.nu = int_of((*m)[3], source, where + "/mult/3");
    }
    f.value = complex_from_json(member(e, "value", source, where), source + ": " + where + "/value");
    F.push_back(f);
  }

  std::vector<REntry> R;
  const Json& Rj = member(doc, "R", source, "/");
  if (!Rj.is_array()) bad(source, "/R", "expected an array");
  for (size_t k = 0; k < Rj.size(); ++k) {
    const std::string where = "/R/" + std::to_string(k);
    const Json& e = Rj[k];
    const Json& ch = member(e, "charges", source, where);
    if (!ch.is_array() || ch.size() != 3) bad(source, where + "/charges", "expected three charge labels");
    REntry r{};
    r.a = charge_of(rules, ch[0], source, where + "/charges/0");
    r.b = charge_of(rules, ch[1], source, where + "/charges/1");
    r.c = charge_of(rules, ch[2], source, where + "/charges/2");
    if (auto m = e.find("mult"); m != e.end()) {
      if (!m->is_array() || m->size() != 2) bad(source, where + "/mult", "expected [mu, nu]");
      r.mu = int_of((*m)[0], source, where + "/mult/0");
      r.nu = int_of((*m)[1], source, where + "/mult/1");
    }
    r.value = complex_from_json(member(e, "value", source, where), source + ": " + where + "/value");
    R.push_back(r);
  }

  AnyonModel model(name.get<std::string>(), rules, F, R);

  if (auto it = doc.find("fqh"); it != doc.end()) {
    const Json& f = *it;
    FqhChargeMeta meta;
    meta.quasihole = charge_of(model.fusion(), member(f, "quasihole", source, "/fqh"), source, "/fqh/quasihole");
    meta.electron = charge_of(model.fusion(), member(f, "electron", source, "/fqh"), source, "/fqh/electron");
    meta.charge_denominator = int_of(member(f, "charge_denominator", source, "/fqh"), source, "/fqh/charge_denominator");
    meta.period = int_of(member(f, "period", source, "/fqh"), source, "/fqh/period");
    const Json& counts = member(f, "quasihole_count", source, "/fqh");
    if (!counts.is_array()) bad(source, "/fqh/quasihole_count", "expected an array aligned with /charges");
    for (size_t k = 0; k < counts.size(); ++k)
      meta.quasihole_count.push_back(int_of(counts[k], source, "/fqh/quasihole_count/" + std::to_string(k)));
    model.set_fqh(std::move(meta));
  }
  if (auto it = doc.find("reference"); it != doc.end()) {
    std::vector<cplx> spins;
    std::vector<double> dims;
    if (auto s = it->find("spins"); s != it->end()) {
      if (!s->is_array()) bad(source, "/reference/spins", "expected an array");
      for (size_t k = 0; k < s->size(); ++k)
        spins.push_back(complex_from_json((*s)[k], source + ": /reference/spins/" + std::to_string(k)));
    }
    if (auto d = it->find("dims"); d != it->end()) {
      if (!d->is_array()) bad(source, "/reference/dims", "expected an array");
      for (const auto& v : *d) {
        if (!v.is_number()) bad(source, "/reference/dims", "expected numbers");
        dims.push_back(v.get<double>());
      }
    }
    model.set_expected(std::move(spins), std::move(dims));
  }
  return model;
}

std::string export_model(const AnyonModel& model) { return model_to_json(model).dump(2) + "\n"; }

AnyonModel import_model_text(const std::string& text, const std::string& source) {
  return model_from_json(parse_json_text(text, source), source);
}

AnyonModel load_model_file(const std::string& path) { return model_from_json(read_json_file(path), path); }

AnyonModel resolve_model(const std::string& reference) {
  namespace fs = std::filesystem;
  const bool looks_like_path = reference.find('/') != std::string::npos ||
                               (reference.size() > 5 && reference.ends_with(".json"));
  if (looks_like_path || fs::is_regular_file(reference)) return load_model_file(reference);
  return builtin_model(reference);
}

}  // namespace al
