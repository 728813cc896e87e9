#include "pseudointel/cli/commands.hpp"

#include <CLI11.hpp>
#include <ostream>

#include "pseudointel/cli/config.hpp"
#include "pseudointel/errors.hpp"
#include "pseudointel/remote.hpp"
#include "pseudointel/suite_io.hpp"
#include "reports.hpp"

namespace pseudointel::cli {

using json = nlohmann::json;

namespace {

constexpr const char* kOutsideBanner =
    "*** OUTSIDE-FRAMEWORK: the evaluator was derived from the model side; this verdict does not certify "
    "pseudointelligence ***";

RunConfig load(const CommandOptions& options) {
  if (options.config.empty()) throw Error(Errc::invalid_config, "--config is required");
  return load_config(options.config, Overrides{options.seed, options.workers});
}

std::string dump(const ojson& document) { return document.dump(2) + "\n"; }

/// Rounds setting of a static evaluator spec as printed in summary rows.
std::string rounds_text(const json& evaluator) {
  if (!evaluator.is_object() || evaluator.value("kind", "") != "static") {
    return evaluator.is_string() && evaluator.get<std::string>() == "static" ? "1" : "";
  }
  const auto it = evaluator.find("rounds");
  if (it == evaluator.end()) return "1";
  return it->is_string() ? it->get<std::string>() : std::to_string(it->get<std::size_t>());
}

ojson parameters_json(const ExperimentConfig& e) {
  ojson out;
  out["epsilon"] = e.epsilon;
  out["delta"] = e.delta;
  out["m"] = e.m;
  out["n"] = e.n;
  out["trials"] = e.trials;
  out["per_arm"] = e.per_arm;
  out["alpha"] = e.alpha;
  return out;
}

ojson pseudoint_json(const PseudointelligenceReport& report, const RunConfig& cfg) {
  ojson out;
  out["schema"] = "pseudointel.report.pseudoint/1";
  out["framework_status"] = report.outside_framework ? "OUTSIDE-FRAMEWORK" : "within-framework";
  out["config_hash"] = cfg.config_hash;
  out["seed"] = cfg.experiment.seed;
  out["verdict"] = report.verdict_pass ? "pass" : "fail";
  out["partial"] = report.partial;
  out["model_learner"] = report.model_learner;
  out["evaluator_learner"] = report.evaluator_learner;
  out["parameters"] = parameters_json(cfg.experiment);
  ojson capabilities = ojson::array();
  for (const CapabilityOutcome& c : report.capabilities) {
    ojson item;
    item["capability"] = c.capability;
    item["verdict"] = c.verdict_pass ? "pass" : "fail";
    item["pass"] = c.pass;
    item["fail"] = c.fail;
    item["inconclusive"] = c.inconclusive;
    item["errored"] = c.errored;
    item["pass_rate"] = c.pass_rate;
    item["mean_dist_hat"] = c.mean_dist;
    item["mean_exact_dist"] = c.mean_exact_dist ? ojson(*c.mean_exact_dist) : ojson(nullptr);
    item["ledger"] = ledger_json(c.ledger);
    capabilities.push_back(std::move(item));
  }
  out["capabilities"] = std::move(capabilities);
  out["ledger"] = ledger_json(report.ledger);
  ojson trials = ojson::array();
  for (const TrialResult& t : report.trials) trials.push_back(trial_json(t, cfg.experiment.suite));
  out["trials"] = std::move(trials);
  return out;
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitError;
}

struct GridAxes {
  std::vector<std::size_t> m, n, per_arm;
  std::vector<json> r;
  std::vector<double> epsilon;
};

GridAxes grid_axes(const RunConfig& cfg) {
  auto fail = [](const std::string& what) { throw Error(Errc::invalid_config, "sweep: " + what); };
  if (!cfg.sweep.is_object() || cfg.sweep.empty()) fail("config needs a non-empty 'sweep' object");
  GridAxes g;
  g.m = {cfg.experiment.m};
  g.n = {cfg.experiment.n};
  g.per_arm = {cfg.experiment.per_arm};
  g.epsilon = {cfg.experiment.epsilon};
  g.r = {json()};
  for (const auto& [key, values] : cfg.sweep.items()) {
    if (!values.is_array() || values.empty()) fail("axis '" + key + "' must be a non-empty array");
    if (key == "m" || key == "n" || key == "per_arm") {
      std::vector<std::size_t> axis;
      for (const json& v : values) {
        if (!v.is_number_unsigned()) fail("axis '" + key + "' takes non-negative integers");
        axis.push_back(v.get<std::size_t>());
      }
      (key == "m" ? g.m : key == "n" ? g.n : g.per_arm) = std::move(axis);
    } else if (key == "epsilon") {
      g.epsilon.clear();
      for (const json& v : values) {
        if (!v.is_number()) fail("axis 'epsilon' takes numbers");
        g.epsilon.push_back(v.get<double>());
      }
    } else if (key == "r") {
      if (rounds_text(cfg.evaluator).empty()) fail("axis 'r' needs the static evaluator");
      g.r.clear();
      for (const json& v : values) {
        const bool ok = (v.is_string() && v.get<std::string>() == "all") ||
                        (v.is_number_unsigned() && v.get<std::size_t>() > 0);
        if (!ok) fail("axis 'r' takes positive integers or \"all\"");
        g.r.push_back(v);
      }
    } else {
      fail("unknown axis '" + key + "' (expected m, n, r, per_arm, epsilon)");
    }
  }
  return g;
}

}  // namespace

int cmd_distinguish(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load(options);
    if (cfg.experiment.suite.size() != 1) {
      throw Error(Errc::invalid_config, "distinguish needs exactly one capability");
    }
    const auto model_learner = make_model_learner(cfg.model);
    const auto evaluator_learner = make_evaluator_learner(cfg.evaluator);
    TrialResult trial = pseudointelligence_trial(*model_learner, *evaluator_learner, cfg.experiment.suite.front(),
                                                 cfg.experiment, 0, trial_source(cfg.experiment.seed, 0, 0));

    ojson report;
    report["schema"] = "pseudointel.report.distinguish/1";
    report["framework_status"] = trial.outside_framework ? "OUTSIDE-FRAMEWORK" : "within-framework";
    report["config_hash"] = cfg.config_hash;
    report["seed"] = cfg.experiment.seed;
    report["epsilon"] = cfg.experiment.epsilon;
    report["decision"] = std::string(to_string(trial.decision));
    report["model_learner"] = model_learner->name();
    report["evaluator_learner"] = evaluator_learner->name();
    report["parameters"] = parameters_json(cfg.experiment);
    report["trial"] = trial_json(trial, cfg.experiment.suite);
    write_text(options.out_dir, "distinguish.json", dump(report));

    std::string csv = "seed,config_hash,epsilon," + trial_csv_header();
    csv += std::to_string(cfg.experiment.seed) + "," + cfg.config_hash + "," + fixed6(cfg.experiment.epsilon) +
           "," + trial_csv_row(trial, cfg.experiment.suite);
    write_text(options.out_dir, "distinguish.csv", csv);

    if (trial.outside_framework) out << kOutsideBanner << "\n";
    out << cfg.experiment.suite.front()->name() << ": dist_hat=" << fixed6(trial.estimate.dist)
        << " radius=" << fixed6(trial.estimate.radius) << " epsilon=" << fixed6(cfg.experiment.epsilon) << " -> "
        << to_string(trial.decision) << "\n";
    switch (trial.decision) {
      case Decision::cannot_distinguish: return static_cast<int>(kExitCannotDistinguish);
      case Decision::distinguishes: return static_cast<int>(kExitDistinguishes);
      case Decision::inconclusive: break;
    }
    return static_cast<int>(kExitInconclusive);
  });
}

int cmd_pseudoint(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load(options);
    const auto model_learner = make_model_learner(cfg.model);
    const auto evaluator_learner = make_evaluator_learner(cfg.evaluator);
    const PseudointelligenceReport report =
        pseudointelligence_experiment(*model_learner, *evaluator_learner, cfg.experiment);

    write_text(options.out_dir, "pseudoint.json", dump(pseudoint_json(report, cfg)));
    std::string trials = trial_csv_header();
    for (const TrialResult& t : report.trials) trials += trial_csv_row(t, cfg.experiment.suite);
    write_text(options.out_dir, "pseudoint_trials.csv", trials);
    const PointParameters params{0, rounds_text(cfg.evaluator), &cfg.experiment, cfg.config_hash};
    write_text(options.out_dir, "pseudoint_summary.csv", summary_csv_header() + summary_csv_rows(report, params));

    if (report.outside_framework) out << kOutsideBanner << "\n";
    for (const CapabilityOutcome& c : report.capabilities) {
      out << c.capability << ": pass_rate=" << fixed6(c.pass_rate) << " (" << c.pass << "/"
          << cfg.experiment.trials << ") -> " << (c.verdict_pass ? "pass" : "fail") << "\n";
    }
    out << "verdict: " << (report.verdict_pass ? "pass" : "fail") << (report.partial ? " (partial)" : "") << "\n";
    return static_cast<int>(kExitOk);
  });
}

int cmd_sweep(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load(options);
    const GridAxes g = grid_axes(cfg);
    const auto model_learner = make_model_learner(cfg.model);

    std::string csv = summary_csv_header();
    std::size_t point = 0;
    for (const std::size_t m : g.m) {
      for (const std::size_t n : g.n) {
        for (const json& r : g.r) {
          json evaluator = cfg.evaluator;
          if (!r.is_null()) {
            if (evaluator.is_string()) evaluator = json{{"kind", evaluator}};
            evaluator["rounds"] = r;
          }
          const auto evaluator_learner = make_evaluator_learner(evaluator);
          for (const std::size_t per_arm : g.per_arm) {
            for (const double epsilon : g.epsilon) {
              ExperimentConfig e = cfg.experiment;
              e.m = m;
              e.n = n;
              e.per_arm = per_arm;
              e.epsilon = epsilon;
              const auto report = pseudointelligence_experiment(*model_learner, *evaluator_learner, e);
              csv += summary_csv_rows(report, PointParameters{point, rounds_text(evaluator), &e, cfg.config_hash});
              if (report.outside_framework && point == 0) out << kOutsideBanner << "\n";
              out << "point " << point << ": m=" << m << " n=" << n << " per_arm=" << per_arm
                  << " epsilon=" << fixed6(epsilon) << " -> " << (report.verdict_pass ? "pass" : "fail") << "\n";
              ++point;
            }
          }
        }
      }
    }
    write_text(options.out_dir, "sweep.csv", csv);
    return static_cast<int>(kExitOk);
  });
}

int cmd_serve_model(const CommandOptions& options, std::ostream&, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load(options);
    if (cfg.experiment.suite.size() != 1) {
      throw Error(Errc::invalid_config, "serve-model needs exactly one capability");
    }
    if (cfg.model.is_object() && cfg.model.value("kind", "") == "remote") {
      throw Error(Errc::invalid_config, "serve-model cannot serve a remote model");
    }
    const CapabilityPtr& capability = cfg.experiment.suite.front();
    const auto learner = make_model_learner(cfg.model);
    // The same streams as trial 0 of a run with this seed, so the served model
    // is the one an in-process run would train.
    const RandomSource rs = trial_source(cfg.experiment.seed, 0, 0);
    const SampleDraw draw = draw_disjoint_samples(*capability, cfg.experiment.m, 0, rs.child("samples"));
    LearnerContext ctx;
    const ModelPtr model = learner->train({draw.model_samples, capability}, rs.child("learn-model"), ctx);
    for (const auto& warning : ctx.warnings()) err << "warning: " << warning << "\n";

    ServeOptions serve;
    serve.seed = cfg.experiment.seed;
    serve.codec = capability->response_codec();
    serve_model(*model, options.listen, serve, options.max_sessions);
    return static_cast<int>(kExitOk);
  });
}

int cmd_zoo_list(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ojson zoo;
    zoo["schema"] = "pseudointel.zoo/1";
    ojson capabilities = ojson::array();
    out << "capabilities:\n";
    for (const auto& name : builtin_capability_names()) {
      const CapabilityPtr c = builtin_capability(name);
      const auto joint = c->enumerate();
      ojson item;
      item["name"] = "builtin:" + name;
      item["query_codec"] = std::string(to_string(c->query_codec()));
      item["response_codec"] = std::string(to_string(c->response_codec()));
      item["deterministic"] = c->deterministic();
      item["support_size"] = joint ? ojson(joint->size()) : ojson(nullptr);
      out << "  builtin:" << name << "  " << to_string(c->query_codec()) << " -> " << to_string(c->response_codec())
          << (c->deterministic() ? "  deterministic" : "  randomized") << "\n";
      capabilities.push_back(std::move(item));
    }
    zoo["capabilities"] = std::move(capabilities);

    ojson suites;
    out << "suites:\n";
    for (const auto& name : builtin_suite_names()) {
      std::vector<std::string> members;
      for (const auto& c : builtin_suite(name)) members.push_back(c->name());
      suites["builtin:" + name] = members;
      out << "  builtin:" << name << "  (";
      for (std::size_t i = 0; i < members.size(); ++i) out << (i ? ", " : "") << members[i];
      out << ")\n";
    }
    zoo["suites"] = std::move(suites);

    auto list = [&](const char* title, const std::vector<std::string>& kinds) {
      out << title << ":\n";
      for (const auto& k : kinds) out << "  " << k << "\n";
      zoo[title] = kinds;
    };
    list("model_learners", model_learner_kinds());
    list("evaluator_learners", evaluator_learner_kinds());
    list("generators", generator_kinds());
    write_text(options.out_dir, "zoo.json", dump(zoo));
    return static_cast<int>(kExitOk);
  });
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pseudointelligence evaluation harness", "pseudointel"};
  app.require_subcommand(1);

  CommandOptions options;
  std::string config, out_dir = ".";
  std::uint64_t seed = 0;
  std::size_t workers = 1, max_sessions = 0;

  std::vector<CLI::Option*> seed_opts, worker_opts;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", config, "run config (JSON, schema pseudointel.config/1)");
    if (needs_config) c->required();
    seed_opts.push_back(sub->add_option("--seed", seed, "override the config seed"));
    sub->add_option("--out-dir", out_dir, "directory for report files")->capture_default_str();
    worker_opts.push_back(
        sub->add_option("--workers", workers, "worker threads for trials")->check(CLI::PositiveNumber));
  };
  auto* distinguish = app.add_subcommand("distinguish", "single distinction measurement");
  auto* pseudoint = app.add_subcommand("pseudoint", "pseudointelligence experiment over a suite");
  auto* sweep = app.add_subcommand("sweep", "resource sweep over a parameter grid");
  auto* serve = app.add_subcommand("serve-model", "train a model and serve it over the wire protocol");
  auto* zoo = app.add_subcommand("zoo-list", "list shipped capabilities, suites, learners and evaluators");
  for (auto* sub : {distinguish, pseudoint, sweep, serve}) add_common(sub, true);
  add_common(zoo, false);
  serve->add_option("--listen", options.listen, "stdio or tcp:HOST:PORT")->capture_default_str();
  auto* sessions_opt = serve->add_option("--max-sessions", max_sessions, "stop after this many sessions (tcp)");

  std::vector<const char*> argv{"pseudointel"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(kExitError);
  }

  options.config = config;
  options.out_dir = out_dir;
  for (const auto* o : seed_opts) {
    if (o->count()) options.seed = seed;
  }
  for (const auto* o : worker_opts) {
    if (o->count()) options.workers = workers;
  }
  if (sessions_opt->count()) options.max_sessions = max_sessions;

  if (*distinguish) return cmd_distinguish(options, out, err);
  if (*pseudoint) return cmd_pseudoint(options, out, err);
  if (*sweep) return cmd_sweep(options, out, err);
  if (*serve) return cmd_serve_model(options, out, err);
  return cmd_zoo_list(options, out, err);
}

}  // namespace pseudointel::cli
