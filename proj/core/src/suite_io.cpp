#include "pseudointel/suite_io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "pseudointel/capabilities.hpp"
#include "pseudointel/errors.hpp"

namespace pseudointel {

using json = nlohmann::json;

namespace {

constexpr std::string_view kSuiteSchema = "pseudointel.suite/1";

[[noreturn]] void fail(const std::string& what) { throw Error(Errc::invalid_config, what); }

const json& field(const json& object, const char* key) {
  const auto it = object.find(key);
  if (it == object.end()) fail(std::string("missing field '") + key + "'");
  return *it;
}

template <class T>
T get(const json& object, const char* key) {
  try {
    return field(object, key).get<T>();
  } catch (const json::exception&) {
    fail(std::string("field '") + key + "' has the wrong type");
  }
}

CapabilityPtr capability_from(const json& spec) {
  if (!spec.is_object()) fail("capability must be an object");
  const auto kind = get<std::string>(spec, "kind");
  const auto name = get<std::string>(spec, "name");
  if (name.empty()) fail("capability name is empty");

  if (kind == "tabular") {
    const Codec qc = codec_from_string(spec.value("query_codec", std::string("symbol")));
    const Codec rc = codec_from_string(spec.value("response_codec", std::string("symbol")));
    const json& rows = field(spec, "rows");
    if (!rows.is_array()) fail("rows must be an array");
    std::vector<TabularRow> table;
    for (const json& row : rows) {
      TabularRow r{Query(payload_from_text(qc, get<std::string>(row, "query"))), get<double>(row, "p"), {}};
      const json& responses = field(row, "responses");
      if (!responses.is_array()) fail("responses must be an array");
      for (const json& w : responses) {
        r.responses.push_back({Response(payload_from_text(rc, get<std::string>(w, "y"))), get<double>(w, "p")});
      }
      table.push_back(std::move(r));
    }
    return std::make_shared<TabularCapability>(name, qc, rc, std::move(table));
  }
  if (kind == "parity") {
    return std::make_shared<ParityCapability>(name, get<std::size_t>(spec, "dimension"),
                                              get<std::vector<std::size_t>>(spec, "indices"),
                                              spec.value("bias", 0.5));
  }
  if (kind == "kgram") {
    const json& rows = field(spec, "transitions");
    if (!rows.is_object()) fail("transitions must be an object");
    std::map<std::string, std::vector<double>> transitions;
    for (const auto& [context, probs] : rows.items()) {
      try {
        transitions.emplace(context, probs.get<std::vector<double>>());
      } catch (const json::exception&) {
        fail("transition row '" + context + "' must be an array of numbers");
      }
    }
    return std::make_shared<KGramCapability>(name, get<std::size_t>(spec, "order"),
                                             get<std::string>(spec, "alphabet"),
                                             get<std::size_t>(spec, "prefix_length"), std::move(transitions));
  }
  fail("unknown capability kind '" + kind + "'");
}

json capability_to(const Capability& capability) {
  if (const auto* t = dynamic_cast<const TabularCapability*>(&capability)) {
    json rows = json::array();
    for (const TabularRow& r : t->rows()) {
      json responses = json::array();
      for (const WeightedResponse& w : r.responses) {
        responses.push_back({{"y", payload_to_text(t->response_codec(), w.response.bytes())}, {"p", w.probability}});
      }
      rows.push_back({{"query", payload_to_text(t->query_codec(), r.query.bytes())},
                      {"p", r.query_probability},
                      {"responses", std::move(responses)}});
    }
    return {{"kind", "tabular"},
            {"name", t->name()},
            {"query_codec", to_string(t->query_codec())},
            {"response_codec", to_string(t->response_codec())},
            {"rows", std::move(rows)}};
  }
  if (const auto* p = dynamic_cast<const ParityCapability*>(&capability)) {
    return {{"kind", "parity"}, {"name", p->name()}, {"dimension", p->dimension()},
            {"indices", p->indices()}, {"bias", p->bias()}};
  }
  if (const auto* k = dynamic_cast<const KGramCapability*>(&capability)) {
    json transitions = json::object();
    std::string context(k->order(), k->alphabet().front());
    // Every context over the alphabet, odometer style.
    for (;;) {
      transitions[context] = k->row(context);
      std::size_t i = context.size();
      while (i > 0) {
        const auto pos = k->alphabet().find(context[i - 1]);
        if (pos + 1 < k->alphabet().size()) {
          context[i - 1] = k->alphabet()[pos + 1];
          break;
        }
        context[i - 1] = k->alphabet().front();
        --i;
      }
      if (i == 0) break;
    }
    return {{"kind", "kgram"}, {"name", k->name()}, {"order", k->order()}, {"alphabet", k->alphabet()},
            {"prefix_length", k->prefix_length()}, {"transitions", std::move(transitions)}};
  }
  fail("capability '" + capability.name() + "' has no serialized form");
}

json parse_json(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) fail("malformed JSON");
  return doc;
}

std::vector<TabularRow> uniform_rows(const std::vector<std::pair<std::string, std::string>>& labels) {
  std::vector<TabularRow> rows;
  const double p = 1.0 / static_cast<double>(labels.size());
  for (const auto& [x, y] : labels) rows.push_back({Query(x), p, {{Response(y), 1.0}}});
  return rows;
}

}  // namespace

std::vector<CapabilityPtr> parse_suite(std::string_view json_text) {
  const json doc = parse_json(json_text);
  if (!doc.is_object()) fail("suite must be an object");
  if (doc.value("schema", std::string()) != kSuiteSchema) {
    fail("suite schema must be \"" + std::string(kSuiteSchema) + "\"");
  }
  const json& list = field(doc, "capabilities");
  if (!list.is_array() || list.empty()) fail("suite needs a non-empty 'capabilities' array");
  std::vector<CapabilityPtr> out;
  for (const json& spec : list) out.push_back(capability_from(spec));
  return out;
}

CapabilityPtr parse_capability(std::string_view json_text) { return capability_from(parse_json(json_text)); }

std::vector<CapabilityPtr> load_suite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_suite(text.str());
}

std::string suite_to_json(const std::vector<CapabilityPtr>& suite) {
  json list = json::array();
  for (const auto& c : suite) list.push_back(capability_to(*c));
  return json{{"schema", kSuiteSchema}, {"capabilities", std::move(list)}}.dump(2);
}

std::vector<std::string> builtin_capability_names() {
  return {"biased-shortcut", "tabular16", "noisy-label", "bernoulli", "parity3", "parity4", "parity4-biased",
          "kgram-ab"};
}

CapabilityPtr builtin_capability(std::string_view name) {
  if (name == "biased-shortcut") {
    // Nine of ten equally likely queries are labeled 0: a constant-0 shortcut
    // is right on 0.9 of the mass.
    std::vector<std::pair<std::string, std::string>> labels;
    for (int i = 0; i < 10; ++i) labels.emplace_back("q" + std::to_string(i), i == 9 ? "1" : "0");
    return std::make_shared<TabularCapability>("biased-shortcut", Codec::symbol, Codec::symbol,
                                               uniform_rows(labels));
  }
  if (name == "tabular16") {
    std::vector<std::pair<std::string, std::string>> labels;
    for (int i = 0; i < 16; ++i) {
      labels.emplace_back((i < 10 ? "s0" : "s") + std::to_string(i), i % 4 == 0 ? "0" : "1");
    }
    return std::make_shared<TabularCapability>("tabular16", Codec::symbol, Codec::symbol, uniform_rows(labels));
  }
  if (name == "noisy-label") {
    std::vector<TabularRow> rows{
        {Query("a"), 0.4, {{Response("0"), 0.5}, {Response("1"), 0.5}}},
        {Query("b"), 0.3, {{Response("0"), 0.8}, {Response("1"), 0.2}}},
        {Query("c"), 0.2, {{Response("1"), 1.0}}},
        {Query("d"), 0.1, {{Response("0"), 0.3}, {Response("1"), 0.7}}},
    };
    return std::make_shared<TabularCapability>("noisy-label", Codec::symbol, Codec::symbol, std::move(rows));
  }
  if (name == "bernoulli") {
    std::vector<TabularRow> rows{{Query("x"), 1.0, {{Response("0"), 0.5}, {Response("1"), 0.5}}}};
    return std::make_shared<TabularCapability>("bernoulli", Codec::symbol, Codec::symbol, std::move(rows));
  }
  if (name == "parity3") return std::make_shared<ParityCapability>("parity3", 3, std::vector<std::size_t>{1, 3});
  if (name == "parity4") return std::make_shared<ParityCapability>("parity4", 4, std::vector<std::size_t>{2, 4});
  if (name == "parity4-biased") {
    return std::make_shared<ParityCapability>("parity4-biased", 4, std::vector<std::size_t>{1, 2}, 0.25);
  }
  if (name == "kgram-ab") {
    return std::make_shared<KGramCapability>(
        "kgram-ab", 1, "ab", 2,
        std::map<std::string, std::vector<double>>{{"a", {0.3, 0.7}}, {"b", {0.9, 0.1}}});
  }
  fail("unknown builtin capability '" + std::string(name) + "'");
}

std::vector<std::string> builtin_suite_names() { return {"tabular", "parity", "all"}; }

std::vector<CapabilityPtr> builtin_suite(std::string_view name) {
  std::vector<std::string> members;
  if (name == "tabular") {
    members = {"biased-shortcut", "tabular16", "noisy-label"};
  } else if (name == "parity") {
    members = {"parity3", "parity4"};
  } else if (name == "all") {
    members = builtin_capability_names();
  } else {
    members = {std::string(name)};
  }
  std::vector<CapabilityPtr> out;
  for (const auto& m : members) out.push_back(builtin_capability(m));
  return out;
}

}  // namespace pseudointel
