// Command line front end: run games, verify bounds and lemmas, sweep a parameter.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cleb/cleb.hpp"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

/// Reads JSON config files. Nested objects map to subcommands; top-level
/// scalars apply to the subcommand chain given on the command line, so a flat
/// file mirrors the flags of whichever command is run.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root) : root_(root) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    throw CLI::ConfigError("writing JSON config files is not supported");
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      input >> j;
    } catch (const json::exception& e) {
      throw CLI::ConfigError(std::string("invalid JSON config: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConfigError("JSON config must be an object");
    std::vector<CLI::ConfigItem> items;
    const std::vector<std::string> chain = invoked_chain();
    collect(j, chain, items);
    return items;
  }

 private:
  std::vector<std::string> invoked_chain() const {
    std::vector<std::string> chain;
    const CLI::App* app = root_;
    for (;;) {
      const auto subs = app->get_subcommands();
      if (subs.empty()) break;
      app = subs.front();
      chain.push_back(app->get_name());
    }
    return chain;
  }

  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void collect(const json& j, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        // Sections name subcommands and are always rooted at the top level.
        std::vector<std::string> path{key};
        collect_section(value, path, parents, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array())
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      else
        item.inputs.push_back(scalar(value));
      out.push_back(std::move(item));
    }
  }

  static CLI::ConfigItem marker(const std::vector<std::string>& path, const char* name) {
    CLI::ConfigItem item;
    item.parents = path;
    item.name = name;
    return item;
  }

  /// A section whose subcommand was not named on the command line is opened
  /// and closed with the "++"/"--" markers, which invoke it.
  static void collect_section(const json& j, std::vector<std::string>& path, const std::vector<std::string>& chain,
                              std::vector<CLI::ConfigItem>& out) {
    const bool invoked = path.size() <= chain.size() && std::equal(path.begin(), path.end(), chain.begin());
    if (!invoked) out.push_back(marker(path, "++"));
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        path.push_back(key);
        collect_section(value, path, chain, out);
        path.pop_back();
        continue;
      }
      CLI::ConfigItem item;
      item.parents = path;
      item.name = key;
      if (value.is_array())
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      else
        item.inputs.push_back(scalar(value));
      out.push_back(std::move(item));
    }
    if (!invoked) out.push_back(marker(path, "--"));
  }

  const CLI::App* root_;
};

struct RunOptions {
  std::string set = "ksubsets:d=4,k=2";
  std::string forecaster = "linexp";
  std::string adversary = "bernoulli:means=0.5";
  std::string feedback = "full";
  std::string constraint = "linf";
  std::size_t n = 100;
  std::size_t reps = 1;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  std::string out;
};

void add_run_options(CLI::App* app, RunOptions& o) {
  app->add_option("--set", o.set, "action set spec")->capture_default_str();
  app->add_option("--forecaster", o.forecaster, "forecaster spec")->capture_default_str();
  app->add_option("--adversary", o.adversary, "adversary spec")->capture_default_str();
  app->add_option("--feedback", o.feedback, "full | semibandit | bandit")
      ->check(CLI::IsMember({"full", "semibandit", "bandit"}))
      ->capture_default_str();
  app->add_option("--constraint", o.constraint, "linf | l2")->check(CLI::IsMember({"linf", "l2"}))->capture_default_str();
  app->add_option("--n", o.n, "rounds")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--reps", o.reps, "repetitions")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--seed", o.seed, "base seed")->capture_default_str();
  app->add_option("--workers", o.workers, "worker threads, 0 = all cores")->capture_default_str();
  app->add_option("--out", o.out, "output directory for trace.csv and summary.csv");
}

cleb::Experiment to_experiment(const RunOptions& o) {
  cleb::Experiment e;
  e.set = o.set;
  e.forecaster = o.forecaster;
  e.adversary = o.adversary;
  e.feedback = cleb::parse_feedback(o.feedback);
  e.constraint = cleb::parse_constraint(o.constraint);
  e.n = o.n;
  e.reps = o.reps;
  e.seed = o.seed;
  e.workers = o.workers;
  return e;
}

/// Bound of the tuned result behind an auto-tuned forecaster, if any.
std::optional<double> tuned_bound(const cleb::Experiment& e, const cleb::ExperimentResult& r) {
  if (cleb::parse_forecaster(e.forecaster).eta) return std::nullopt;
  try {
    return cleb::theorem_bound(r.forecaster.tuning, r.S->dim(), e.n, r.S->max_norm(), r.forecaster.q);
  } catch (const cleb::DomainError&) {
    return std::nullopt;
  }
}

struct RunOutcome {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::optional<double> bound;
  bool pass = true;
};

RunOutcome run_once(const cleb::Experiment& e, const std::string& out_dir, std::ostream& log) {
  cleb::ExperimentResult r = cleb::run_experiment(e);
  RunOutcome o;
  o.mean = r.mean;
  o.stderr_ = r.stderr_;
  o.bound = tuned_bound(e, r);
  if (o.bound) {
    const auto mode = r.exact ? cleb::BoundReport::Mode::exact : cleb::BoundReport::Mode::monte_carlo;
    o.pass = cleb::make_report(r.forecaster.tuning, r.mean, *o.bound, false, mode, r.runs.size(), r.stderr_).pass;
  }
  if (r.mc.aborted) o.pass = false;

  log << std::setprecision(10) << "set=" << e.set << " forecaster=" << r.forecaster.kind
      << " eta=" << r.forecaster.eta << " feedback=" << cleb::to_string(e.feedback) << " n=" << e.n
      << " reps=" << r.runs.size() << "\nregret mean=" << r.mean;
  if (!r.exact) log << " stderr=" << r.stderr_;
  if (o.bound) log << " bound=" << *o.bound << " (" << r.forecaster.tuning << ")";
  log << " " << cleb::detail::describe_invariant(r.mc) << "\n";
  for (std::size_t i = 0; i < r.runs.size(); ++i)
    if (r.runs[i].aborted)
      log << "rep " << i << " aborted at round " << r.runs[i].abort_round << ": " << r.runs[i].abort_reason << "\n";

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream trace(fs::path(out_dir) / "trace.csv");
    std::ofstream summary(fs::path(out_dir) / "summary.csv");
    if (!trace || !summary) throw cleb::DomainError("cannot write to '" + out_dir + "'");
    cleb::write_trace_header(trace);
    cleb::write_summary_header(summary);
    cleb::GameConfig config;
    config.n = e.n;
    config.feedback = e.feedback;
    config.constraint = e.constraint;
    config.projection = e.projection;
    // Replays each repetition with the same streams to record its rows.
    for (std::size_t rep = 0; rep < r.runs.size(); ++rep) {
      const cleb::GameTrace t = cleb::run_game(config, *r.prototype, *r.adversary, *r.S, e.seed, rep);
      cleb::write_trace_rows(trace, rep, t);
      const double bound = o.bound.value_or(std::nan(""));
      cleb::write_summary_row(summary, rep, t.summary, bound, !o.bound || t.summary.regret <= bound);
    }
  }
  return o;
}

/// Appends key=value to a spec string, which overrides an earlier value.
std::string with_param(const std::string& spec, const std::string& key, const std::string& value) {
  return spec + (spec.find(':') == std::string::npos ? ":" : ",") + key + "=" + value;
}

cleb::Experiment apply_sweep(cleb::Experiment e, const std::string& param, const std::string& value) {
  if (param == "n") e.n = std::stoul(value);
  else if (param == "reps") e.reps = std::stoul(value);
  else if (param == "seed") e.seed = std::stoull(value);
  else if (param == "set") e.set = value;
  else if (param == "forecaster") e.forecaster = value;
  else if (param == "adversary") e.adversary = value;
  else if (param == "feedback") e.feedback = cleb::parse_feedback(value);
  else if (param == "constraint") e.constraint = cleb::parse_constraint(value);
  else if (param == "eta" || param == "q" || param == "gamma" || param == "anchor") e.forecaster = with_param(e.forecaster, param, value);
  else if (param == "eps" || param == "scale") e.adversary = with_param(e.adversary, param, value);
  else throw cleb::DomainError("unknown sweep parameter '" + param + "'");
  return e;
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Combinatorial prediction games: simulation and bound verification"};
  app.config_formatter(std::make_shared<JsonConfig>(&app));
  app.set_config("--config", "", "JSON file mirroring the flags; flags given on the command line take precedence");
  app.require_subcommand(1);

  RunOptions run_opts;
  CLI::App* run = app.add_subcommand("run", "play repeated games and report the regret");
  run->configurable();
  add_run_options(run, run_opts);

  CLI::App* verify = app.add_subcommand("verify", "check a bound or a lemma");
  verify->configurable();
  verify->require_subcommand(1);

  std::vector<std::string> bound_ids;
  cleb::BoundParams bp;
  std::string bound_feedback = "full";
  std::string eps_csv, eta_csv;
  CLI::App* bound = verify->add_subcommand("bound", "verify a regret bound");
  bound->configurable();
  bound->add_option("--id", bound_ids, "thm4..thm18, thm11-l2, polyinf")->required();
  bound->add_option("--d", bp.d, "dimension, 0 = default");
  bound->add_option("--n", bp.n, "rounds, 0 = default");
  bound->add_option("--k", bp.k, "subset size for k-subset sets, 0 = default");
  bound->add_option("--q", bp.q, "poly exponent");
  bound->add_option("--reps", bp.reps, "Monte Carlo repetitions, 0 = default");
  bound->add_option("--seed", bp.seed, "base seed")->capture_default_str();
  bound->add_option("--workers", bp.workers, "worker threads, 0 = all cores");
  bound->add_option("--set", bp.set, "override the default set");
  bound->add_option("--adversary", bp.adversary, "override the default adversary");
  bound->add_option("--forecaster", bp.forecaster, "forecaster kind for lower bounds");
  bound->add_option("--feedback", bound_feedback, "feedback for lower bounds")
      ->check(CLI::IsMember({"full", "semibandit", "bandit"}));
  bound->add_option("--eps", eps_csv, "eps grid for lower bounds (csv)");
  bound->add_option("--eta", eta_csv, "eta grid for thm16 (csv)");

  std::vector<std::string> lemma_ids;
  cleb::LemmaParams lp;
  CLI::App* lemma = verify->add_subcommand("lemma", "verify an auxiliary lemma on a grid");
  lemma->configurable();
  lemma->add_option("--id", lemma_ids, "tech1 | klbinomials | log4")
      ->required()
      ->check(CLI::IsMember({"tech1", "klbinomials", "log4"}));
  lemma->add_option("--max-k", lp.tech1_max_k, "largest k for tech1")->capture_default_str();
  lemma->add_option("--max-n", lp.kl_max_n, "largest n for klbinomials")->capture_default_str();
  lemma->add_option("--points", lp.log4_points, "grid points per axis for log4")->capture_default_str();

  RunOptions sweep_opts;
  std::string sweep_param, sweep_values;
  CLI::App* sweep = app.add_subcommand("sweep", "repeat a run over the values of one parameter");
  sweep->configurable();
  add_run_options(sweep, sweep_opts);
  sweep->add_option("--param", sweep_param, "parameter name: n, reps, seed, set, forecaster, adversary, "
                                            "feedback, constraint, eta, q, gamma, anchor, eps, scale")
      ->required();
  sweep->add_option("--values", sweep_values, "comma separated values")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const RunOutcome o = run_once(to_experiment(run_opts), run_opts.out, std::cout);
      std::cout << (o.pass ? "PASS" : "FAIL") << "\n";
      return o.pass ? 0 : 1;
    }
    if (bound->parsed()) {
      bp.feedback = cleb::parse_feedback(bound_feedback);
      if (!eps_csv.empty()) bp.eps_grid = cleb::SpecString::parse_list(eps_csv);
      if (!eta_csv.empty()) bp.eta_grid = cleb::SpecString::parse_list(eta_csv);
      bool all = true;
      for (const auto& id : bound_ids) {
        const cleb::BoundReport r = cleb::verify_bound(id, bp);
        std::cout << r << "\n";
        all = all && r.pass;
      }
      return all ? 0 : 1;
    }
    if (lemma->parsed()) {
      bool all = true;
      for (const auto& id : lemma_ids) {
        const cleb::BoundReport r = cleb::verify_lemma(id, lp);
        std::cout << r << "\n";
        all = all && r.pass;
      }
      return all ? 0 : 1;
    }
    if (sweep->parsed()) {
      const cleb::Experiment base = to_experiment(sweep_opts);
      std::ofstream table;
      if (!sweep_opts.out.empty()) {
        fs::create_directories(sweep_opts.out);
        table.open(fs::path(sweep_opts.out) / "sweep.csv");
        table << "param,value,mean,stderr,bound,pass\n" << std::setprecision(17);
      }
      bool all = true;
      for (const auto& value : split_csv(sweep_values)) {
        const cleb::Experiment e = apply_sweep(base, sweep_param, value);
        const std::string dir = sweep_opts.out.empty() ? "" : (fs::path(sweep_opts.out) / (sweep_param + "=" + value)).string();
        std::cout << sweep_param << "=" << value << "\n";
        const RunOutcome o = run_once(e, dir, std::cout);
        all = all && o.pass;
        if (table.is_open()) {
          table << sweep_param << ',' << value << ',' << o.mean << ',' << o.stderr_ << ',';
          if (o.bound) table << *o.bound;
          table << ',' << (o.pass ? 1 : 0) << '\n';
        }
      }
      std::cout << (all ? "PASS" : "FAIL") << "\n";
      return all ? 0 : 1;
    }
  } catch (const cleb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
