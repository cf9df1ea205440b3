#include "pwcc/model_file.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace pwcc {

namespace {

using Json = nlohmann::ordered_json;

Json box_to_json(const Box& box) {
  Json j;
  j["lower"] = box.lower();
  j["upper"] = box.upper();
  return j;
}

Json pwc_payload(const PwcFunction& f) {
  Json pieces = Json::array();
  for (const auto& piece : f.pieces()) {
    Json p;
    p["d"] = piece.d;
    p["a"] = piece.a;
    p["b"] = piece.b;
    pieces.push_back(std::move(p));
  }
  Json j;
  j["domain"] = box_to_json(f.domain());
  j["pieces"] = std::move(pieces);
  return j;
}

template <typename T>
void put(Json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

Json meta_to_json(const Provenance& m) {
  Json j = Json::object();
  j["builder"] = m.builder;
  put(j, "eps", m.eps);
  put(j, "kappa", m.kappa);
  put(j, "kappas", m.kappas);
  put(j, "eps_split", m.eps_split);
  put(j, "mu", m.mu);
  put(j, "mu_heuristic", m.mu_heuristic);
  put(j, "delta", m.delta);
  put(j, "deltas", m.deltas);
  put(j, "n_p", m.n_p);
  put(j, "grid_per_axis", m.grid_per_axis);
  put(j, "achieved_error", m.achieved_error);
  return j;
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ModelError(where + ": missing field \"" + key + "\"");
  }
  return j.at(key);
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ModelError(where + ": expected a number");
  return j.get<double>();
}

std::vector<double> numbers(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ModelError(where + ": expected an array of numbers");
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& e : j) v.push_back(number(e, where));
  return v;
}

Box box_from_json(const Json& j, const std::string& where) {
  try {
    return Box(numbers(field(j, "lower", where), where + ".lower"),
               numbers(field(j, "upper", where), where + ".upper"));
  } catch (const std::invalid_argument& e) {
    throw ModelError(where + ": " + e.what());
  }
}

PwcFunction pwc_from_json(const Json& j, const std::string& where) {
  Box domain = box_from_json(field(j, "domain", where), where + ".domain");
  const Json& list = field(j, "pieces", where);
  if (!list.is_array()) throw ModelError(where + ".pieces: expected an array");

  std::vector<DiagQuadPiece> pieces;
  pieces.reserve(list.size());
  std::string report;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string at = where + ".pieces[" + std::to_string(i) + "]";
    DiagQuadPiece p{numbers(field(list[i], "d", at), at + ".d"),
                    numbers(field(list[i], "a", at), at + ".a"),
                    number(field(list[i], "b", at), at + ".b")};
    if (auto problem = validate_piece(p); !problem.empty()) {
      report += at + ": " + problem + "\n";
    } else if (p.dimension() != domain.dimension()) {
      report += at + ": dimension differs from domain\n";
    }
    pieces.push_back(std::move(p));
  }
  if (!report.empty()) throw ModelError("validation failed:\n" + report);
  try {
    return PwcFunction(std::move(pieces), std::move(domain));
  } catch (const std::invalid_argument& e) {
    throw ModelError(where + ": " + e.what());
  }
}

template <typename T>
std::optional<T> opt(const Json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ModelError(std::string("meta.") + key + ": " + e.what());
  }
}

Provenance meta_from_json(const Json& j) {
  if (!j.is_object()) throw ModelError("meta: expected an object");
  Provenance m;
  m.builder = opt<std::string>(j, "builder").value_or("");
  m.eps = opt<double>(j, "eps");
  m.kappa = opt<double>(j, "kappa");
  m.kappas = opt<std::vector<double>>(j, "kappas");
  m.eps_split = opt<std::vector<double>>(j, "eps_split");
  m.mu = opt<double>(j, "mu");
  m.mu_heuristic = opt<bool>(j, "mu_heuristic");
  m.delta = opt<double>(j, "delta");
  m.deltas = opt<std::vector<double>>(j, "deltas");
  m.n_p = opt<std::size_t>(j, "n_p");
  m.grid_per_axis = opt<std::size_t>(j, "grid_per_axis");
  m.achieved_error = opt<double>(j, "achieved_error");
  return m;
}

}  // namespace

std::size_t ModelFile::dimension() const { return domain().dimension(); }

const Box& ModelFile::domain() const {
  return std::visit([](const auto& p) -> const Box& { return p.domain(); }, payload);
}

double eval_model(const ModelFile& m, std::span<const double> x) {
  if (const auto* sf = std::get_if<SumForm>(&m.payload)) return eval_sumform(*sf, x);
  return eval_pwc(std::get<PwcFunction>(m.payload), x).value;
}

std::string to_json_text(const ModelFile& m) {
  Json j;
  j["version"] = kModelFormatVersion;
  if (const auto* sf = std::get_if<SumForm>(&m.payload)) {
    j["kind"] = "sumform";
    j["domain"] = box_to_json(sf->domain());
    Json components = Json::array();
    for (const auto& c : sf->components()) components.push_back(pwc_payload(c));
    j["components"] = std::move(components);
  } else {
    const auto& f = std::get<PwcFunction>(m.payload);
    Json payload = pwc_payload(f);
    j["kind"] = "pwc";
    j["domain"] = std::move(payload["domain"]);
    j["pieces"] = std::move(payload["pieces"]);
  }
  j["meta"] = meta_to_json(m.meta);
  return j.dump(1) + "\n";
}

ModelFile from_json_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ModelError(std::string("malformed model JSON: ") + e.what());
  }
  const Json& version = field(j, "version", "model");
  if (!version.is_number_integer() || version.get<long long>() != kModelFormatVersion) {
    throw ModelError("unsupported model version " + version.dump() + " (expected " +
                     std::to_string(kModelFormatVersion) + ")");
  }
  const Json& kind = field(j, "kind", "model");
  Provenance meta = j.contains("meta") ? meta_from_json(j.at("meta")) : Provenance{};

  if (kind == "pwc") {
    return {pwc_from_json(j, "model"), std::move(meta)};
  }
  if (kind == "sumform") {
    Box domain = box_from_json(field(j, "domain", "model"), "model.domain");
    const Json& list = field(j, "components", "model");
    if (!list.is_array()) throw ModelError("model.components: expected an array");
    std::vector<PwcFunction> components;
    for (std::size_t c = 0; c < list.size(); ++c) {
      components.push_back(pwc_from_json(list[c], "model.components[" + std::to_string(c) + "]"));
    }
    try {
      return {SumForm(std::move(components), std::move(domain)), std::move(meta)};
    } catch (const std::invalid_argument& e) {
      throw ModelError(std::string("model: ") + e.what());
    }
  }
  throw ModelError("unknown model kind " + kind.dump());
}

void save_model(const ModelFile& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << to_json_text(m);
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

}  // namespace pwcc
