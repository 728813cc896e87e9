#include "pseudointel/cli/config.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "pseudointel/errors.hpp"
#include "pseudointel/evaluator_zoo.hpp"
#include "pseudointel/learners.hpp"
#include "pseudointel/remote.hpp"
#include "pseudointel/suite_io.hpp"

namespace pseudointel::cli {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(Errc::invalid_config, what); }

void check_keys(const json& object, const std::string& where, std::initializer_list<const char*> allowed) {
  std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& [key, value] : object.items()) {
    if (!known.count(key)) fail(where + ": unknown field '" + key + "'");
  }
}

template <class T>
T get_or(const json& object, const char* key, T fallback) {
  const auto it = object.find(key);
  if (it == object.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    fail(std::string("field '") + key + "' has the wrong type");
  }
}

std::size_t get_count(const json& object, const char* key, std::size_t fallback) {
  const auto it = object.find(key);
  if (it == object.end()) return fallback;
  if (!it->is_number_unsigned()) fail(std::string("field '") + key + "' must be a non-negative integer");
  return it->get<std::size_t>();
}

double get_real(const json& object, const char* key, double fallback) {
  const auto it = object.find(key);
  if (it == object.end()) return fallback;
  if (!it->is_number()) fail(std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

std::string kind_of(const json& spec, const std::string& where) {
  if (spec.is_string()) return spec.get<std::string>();
  if (!spec.is_object()) fail(where + " must be an object or a kind name");
  const auto it = spec.find("kind");
  if (it == spec.end() || !it->is_string()) fail(where + " needs a string 'kind'");
  return it->get<std::string>();
}

json as_object(const json& spec) { return spec.is_string() ? json{{"kind", spec}} : spec; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

/// Accepts 1, 2, ... or "all" (exhaustive, encoded as 0).
std::size_t rounds_of(const json& spec) {
  const auto it = spec.find("rounds");
  if (it == spec.end()) return 1;
  if (it->is_string() && it->get<std::string>() == "all") return 0;
  if (!it->is_number_unsigned() || it->get<std::size_t>() == 0) {
    fail("evaluator 'rounds' must be a positive integer or \"all\"");
  }
  return it->get<std::size_t>();
}

ModelPtr make_generator(const json& spec) {
  const json g = as_object(spec);
  const std::string kind = kind_of(g, "generator");
  if (kind == "identity") {
    check_keys(g, "generator", {"kind"});
    return std::make_shared<IdentityGenerator>();
  }
  if (kind == "bit-flip") {
    check_keys(g, "generator", {"kind"});
    return std::make_shared<BitFlipGenerator>();
  }
  if (kind == "template-fill") {
    check_keys(g, "generator", {"kind", "wildcard", "fill", "codec"});
    const auto wildcard = get_or<std::string>(g, "wildcard", "*");
    if (wildcard.size() != 1) fail("template-fill 'wildcard' must be one byte");
    const Codec codec = codec_from_string(get_or<std::string>(g, "codec", "symbol"));
    const auto fill = payload_from_text(codec, get_or<std::string>(g, "fill", ""));
    return std::make_shared<TemplateFillGenerator>(wildcard.front(), fill);
  }
  fail("unknown generator kind '" + kind + "'");
}

}  // namespace

std::string config_hash(const json& document) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : document.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<CapabilityPtr> resolve_capabilities(const json& ref, const std::filesystem::path& base_dir) {
  if (ref.is_array()) {
    std::vector<CapabilityPtr> out;
    for (const json& item : ref) {
      auto part = resolve_capabilities(item, base_dir);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  if (ref.is_object()) {
    if (ref.contains("capabilities")) return parse_suite(ref.dump());
    return {parse_capability(ref.dump())};
  }
  if (!ref.is_string()) fail("capability reference must be a string, object or array");
  const auto text = ref.get<std::string>();
  constexpr std::string_view builtin = "builtin:";
  if (text.rfind(builtin, 0) == 0) return builtin_suite(text.substr(builtin.size()));
  std::filesystem::path path(text);
  if (path.is_relative()) path = base_dir / path;
  return parse_suite(read_file(path));
}

ModelLearnerPtr make_model_learner(const json& raw) {
  const json spec = as_object(raw);
  const std::string kind = kind_of(spec, "model");
  if (kind == "exact-copy") {
    check_keys(spec, "model", {"kind"});
    return std::make_shared<ExactCopyLearner>();
  }
  if (kind == "memorizer") {
    check_keys(spec, "model", {"kind", "fallback"});
    std::optional<std::string> fallback;
    if (spec.contains("fallback")) fallback = get_or<std::string>(spec, "fallback", "");
    return std::make_shared<MemorizerLearner>(fallback);
  }
  if (kind == "parity") {
    check_keys(spec, "model", {"kind", "dimension"});
    std::optional<std::size_t> d;
    if (spec.contains("dimension")) d = get_count(spec, "dimension", 0);
    return std::make_shared<ParityLearner>(d);
  }
  if (kind == "constant") {
    check_keys(spec, "model", {"kind"});
    return std::make_shared<ConstantLearner>();
  }
  if (kind == "kgram") {
    check_keys(spec, "model", {"kind", "order", "alphabet"});
    std::optional<std::string> alphabet;
    if (spec.contains("alphabet")) alphabet = get_or<std::string>(spec, "alphabet", "");
    return std::make_shared<KGramLearner>(get_count(spec, "order", 1), alphabet);
  }
  if (kind == "remote") {
    check_keys(spec, "model", {"kind", "endpoint", "timeout_ms"});
    const auto endpoint = get_or<std::string>(spec, "endpoint", "");
    if (endpoint.empty()) fail("remote model needs an 'endpoint'");
    const auto timeout = get_count(spec, "timeout_ms", 10000);
    return std::make_shared<RemoteModelLearner>(endpoint, std::chrono::milliseconds(timeout));
  }
  fail("unknown model learner '" + kind + "'");
}

EvaluatorLearnerPtr make_evaluator_learner(const json& raw) {
  const json spec = as_object(raw);
  const std::string kind = kind_of(spec, "evaluator");
  if (kind == "static") {
    check_keys(spec, "evaluator", {"kind", "rounds"});
    return std::make_shared<StaticEvaluatorLearner>(rounds_of(spec));
  }
  if (kind == "adversarial") {
    check_keys(spec, "evaluator", {"kind", "aux", "mutation_rounds"});
    if (!spec.contains("aux")) fail("adversarial evaluator needs an 'aux' model learner");
    return std::make_shared<AdversarialEvaluatorLearner>(make_model_learner(spec.at("aux")),
                                                         get_count(spec, "mutation_rounds", 0));
  }
  if (kind == "self") {
    check_keys(spec, "evaluator", {"kind", "learner"});
    if (!spec.contains("learner")) fail("self evaluator needs a 'learner'");
    return std::make_shared<SelfEvaluatorLearner>(make_model_learner(spec.at("learner")));
  }
  if (kind == "shared-self") {
    check_keys(spec, "evaluator", {"kind"});
    return std::make_shared<SharedDerivationEvaluatorLearner>();
  }
  if (kind == "model-based") {
    check_keys(spec, "evaluator", {"kind", "generator", "filter", "budget"});
    const auto filter = get_or<std::string>(spec, "filter", "none");
    if (filter != "none" && filter != "membership") fail("model-based 'filter' must be \"none\" or \"membership\"");
    const json generator = spec.contains("generator") ? spec.at("generator") : json("identity");
    const auto budget = get_count(spec, "budget", 16);
    if (budget == 0) fail("model-based 'budget' must be positive");
    return std::make_shared<ModelBasedEvaluatorLearner>(make_generator(generator), filter == "membership", budget);
  }
  if (kind == "always-accept" || kind == "always-reject") {
    check_keys(spec, "evaluator", {"kind"});
    return std::make_shared<ConstantVerdictLearner>(kind == "always-accept");
  }
  fail("unknown evaluator learner '" + kind + "'");
}

std::vector<std::string> model_learner_kinds() {
  return {"exact-copy", "memorizer", "parity", "constant", "kgram", "remote"};
}

std::vector<std::string> evaluator_learner_kinds() {
  return {"static", "adversarial", "self", "shared-self", "model-based", "always-accept", "always-reject"};
}

std::vector<std::string> generator_kinds() { return {"identity", "template-fill", "bit-flip"}; }

RunConfig parse_config(const json& document, const std::filesystem::path& base_dir, const Overrides& overrides) {
  if (!document.is_object()) fail("config must be a JSON object");
  check_keys(document, "config",
             {"schema", "seed", "capability", "suite", "model", "evaluator", "m", "n", "trials", "per_arm", "alpha",
              "epsilon", "delta", "workers", "sweep"});
  if (get_or<std::string>(document, "schema", "") != kConfigSchema) {
    fail(std::string("config 'schema' must be \"") + kConfigSchema + "\"");
  }

  RunConfig out;
  out.document = document;
  out.config_hash = config_hash(document);
  out.base_dir = base_dir;

  ExperimentConfig& e = out.experiment;
  if (document.contains("seed") && !document.at("seed").is_number_unsigned()) {
    fail("field 'seed' must be a non-negative integer");
  }
  e.seed = overrides.seed.value_or(get_or<std::uint64_t>(document, "seed", 0));
  e.workers = overrides.workers.value_or(get_count(document, "workers", 1));
  e.m = get_count(document, "m", 0);
  e.n = get_count(document, "n", 0);
  e.trials = get_count(document, "trials", 1);
  e.per_arm = get_count(document, "per_arm", 1000);
  e.alpha = get_real(document, "alpha", 0.01);
  e.epsilon = get_real(document, "epsilon", 0.1);
  e.delta = get_real(document, "delta", 0.1);
  if (document.contains("m")) out.serve_m = e.m;

  if (document.contains("capability") && document.contains("suite")) fail("give either 'capability' or 'suite'");
  if (document.contains("capability")) {
    e.suite = resolve_capabilities(document.at("capability"), base_dir);
  } else if (document.contains("suite")) {
    e.suite = resolve_capabilities(document.at("suite"), base_dir);
  }

  out.model = document.value("model", json("memorizer"));
  out.evaluator = document.value("evaluator", json("static"));
  // Building the learners once validates both specs up front.
  make_model_learner(out.model);
  make_evaluator_learner(out.evaluator);
  out.sweep = document.value("sweep", json());
  e.validate();
  return out;
}

RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides) {
  const std::string text = read_file(path);
  json document = json::parse(text, nullptr, false);
  if (document.is_discarded()) fail("config " + path.string() + " is not valid JSON");
  return parse_config(document, path.parent_path(), overrides);
}

}  // namespace pseudointel::cli
