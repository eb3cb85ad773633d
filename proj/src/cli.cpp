#include "attrq/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "attrq/avatar.hpp"
#include "attrq/errors.hpp"
#include "attrq/firefront.hpp"
#include "attrq/genrand.hpp"
#include "attrq/markov.hpp"
#include "attrq/parser.hpp"
#include "attrq/stg.hpp"

namespace attrq {
namespace {

struct AnalyzeOptions {
  std::string method;
  std::string file;
  double alpha = 1e-5;
  double beta = 1e-3;
  std::optional<std::int64_t> max_iters;
  std::int64_t runs = 10000;
  std::uint64_t seed = 0;
  std::size_t tau = 3;
  std::size_t min_rewire = 4;
  std::string inflationary = "auto";
  bool keep_transients = true;
  unsigned threads = 1;
  std::size_t state_cap = kDefaultStateCap;
  bool csv = false;
  std::string trace;
  std::string dot;
};

struct GenerateOptions {
  std::size_t n = 10;
  std::size_t k = 2;
  std::uint64_t seed = 0;
  bool require_multistable = false;
  std::size_t max_attempts = 10000;
  std::string out;
};

unsigned default_threads() {
  if (const char* env = std::getenv("ATTRQ_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

AvatarConfig avatar_config(const AnalyzeOptions& o) {
  AvatarConfig cfg;
  cfg.runs = o.runs;
  cfg.seed = o.seed;
  cfg.tau0 = o.tau;
  cfg.min_cycle_to_rewire = o.min_rewire;
  cfg.keep_transients = o.keep_transients;
  cfg.threads = o.threads;
  cfg.inflationary = o.inflationary == "on"    ? InflationaryMode::kOn
                     : o.inflationary == "off" ? InflationaryMode::kOff
                                               : InflationaryMode::kAuto;
  cfg.trace = !o.trace.empty();
  return cfg;
}

int analyze(const AnalyzeOptions& o, std::ostream& out) {
  const ModelDocument doc = load_model(o.file);
  AbsorptionResult result;
  std::string trace;
  if (o.method == "exact") {
    result = analyze_exact(doc, o.state_cap);
    if (!o.dot.empty()) {
      const ExplicitSTG stg = doc.initial.is_point_mass()
                                  ? build_stg(doc.model, std::optional<State>{initial_state(doc)}, o.state_cap)
                                  : build_stg(doc.model, std::optional<State>{}, o.state_cap);
      std::ostringstream dot;
      write_quotient_dot(dot, stg, tarjan_scc(stg), &doc.model);
      write_file(o.dot, dot.str());
    }
  } else if (o.method == "firefront") {
    FirefrontConfig cfg;
    cfg.alpha = o.alpha;
    cfg.beta = o.beta;
    cfg.max_iterations = o.max_iters;
    cfg.trace = !o.trace.empty();
    FirefrontOutcome run = firefront_run(doc, cfg);
    result = std::move(run.result);
    trace = emit_trace(run.trace);
  } else {
    AvatarOutcome run = avatar_run(doc, avatar_config(o));
    result = std::move(run.result);
    trace = emit_avatar_trace(run.trace);
  }
  if (!o.trace.empty()) {
    if (o.method == "exact") throw std::invalid_argument("--trace is only available for firefront and avatar");
    write_file(o.trace, trace);
  }
  out << serialize_result(result, o.csv ? ResultFormat::kCsv : ResultFormat::kJson, &doc.model);
  return kExitOk;
}

int generate(const GenerateOptions& o, std::ostream& out) {
  if (o.k < 1 || o.k > o.n) throw std::invalid_argument("--k must be in [1, n]");
  RandomStream rng(o.seed);
  for (std::size_t attempt = 0; attempt < o.max_attempts; ++attempt) {
    LogicalModel model = generate_random_model(o.n, o.k, rng);
    if (o.require_multistable && !filter_multistable(model)) continue;
    const std::string text = print_model(ModelDocument{"random", std::move(model), {}, {}});
    if (o.out.empty()) {
      out << text;
    } else {
      write_file(o.out, text);
    }
    return kExitOk;
  }
  throw std::runtime_error("no multistable model found in " + std::to_string(o.max_attempts) + " attempts");
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

void compare_row(std::ostream& out, const AbsorptionResult& r) {
  std::string probs;
  std::string depths;
  for (std::size_t i = 0; i < r.attractors.size(); ++i) {
    const auto& e = r.attractors[i];
    if (i) {
      probs += ' ';
      depths += ' ';
    }
    probs += attractor_id(e, i) + ":" + fmt(e.probability);
    if (e.lower_bound && e.upper_bound) probs += "[" + fmt(*e.lower_bound) + "," + fmt(*e.upper_bound) + "]";
    depths += e.avg_depth ? fmt(*e.avg_depth, 2) : "-";
  }
  std::string error = "-";
  if (r.residual_probability) {
    std::ostringstream s;
    s << std::scientific << std::setprecision(2) << *r.residual_probability;
    error = s.str();
  } else if (!r.attractors.empty() && r.attractors.front().std_error) {
    double worst = 0.0;
    for (const auto& e : r.attractors) worst = std::max(worst, e.std_error.value_or(0.0));
    error = fmt(worst);
  }
  out << std::left << std::setw(10) << r.method << ' ' << std::setw(10) << fmt(r.wall_time_s, 3) << ' '
      << std::setw(10) << r.attractors.size() << ' ' << probs << " | " << error << " | " << depths << '\n';
}

int compare(const AnalyzeOptions& o, std::ostream& out) {
  const ModelDocument doc = load_model(o.file);
  out << std::left << std::setw(10) << "method" << ' ' << std::setw(10) << "time_s" << ' ' << std::setw(10)
      << "attractors" << " probabilities | residual/std_error | avg_depth\n";
  const bool sampling = !doc.initial.is_point_mass();
  bool too_large = false;
  if (sampling) {
    out << std::setw(10) << "exact" << " N/A (sampled initial states)\n";
  } else {
    try {
      compare_row(out, analyze_exact(doc, o.state_cap));
    } catch (const CapacityError& e) {
      too_large = true;
      out << std::setw(10) << "exact" << " N/A (" << e.what() << ")\n";
    }
  }
  if (sampling || too_large) {
    out << std::setw(10) << "firefront" << " N/A (" << (sampling ? "sampled initial states" : "state cap exceeded")
        << ")\n";
  } else {
    FirefrontConfig cfg;
    cfg.alpha = o.alpha;
    cfg.beta = o.beta;
    cfg.max_iterations = o.max_iters;
    compare_row(out, firefront_run(doc, cfg).result);
  }
  AnalyzeOptions quiet = o;
  quiet.trace.clear();
  compare_row(out, avatar_run(doc, avatar_config(quiet)).result);
  return kExitOk;
}

void add_engine_flags(CLI::App& cmd, AnalyzeOptions& o) {
  cmd.add_option("--alpha", o.alpha, "firefront: neglect threshold")->check(CLI::Range(0.0, 1.0));
  cmd.add_option("--beta", o.beta, "firefront: stop once P(F) <= beta")->check(CLI::Range(0.0, 1.0));
  cmd.add_option("--max-iters", o.max_iters, "firefront: iteration cap (default |S|^2, at most 2^31)");
  cmd.add_option("--runs", o.runs, "avatar: number of simulations")->check(CLI::PositiveNumber);
  cmd.add_option("--seed", o.seed, "avatar: base seed");
  cmd.add_option("--tau", o.tau, "avatar: initial extension depth")->check(CLI::PositiveNumber);
  cmd.add_option("--min-rewire", o.min_rewire, "avatar: smallest cycle that is rewired");
  cmd.add_option("--inflationary", o.inflationary, "avatar: auto, on or off")
      ->check(CLI::IsMember({"auto", "on", "off"}));
  cmd.add_option("--keep-transients", o.keep_transients, "avatar: cache large rewired transients (true/false)");
  cmd.add_option("--threads", o.threads, "avatar: worker threads (default $ATTRQ_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--state-cap", o.state_cap, "exact: state-space cap")->check(CLI::PositiveNumber);
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Attractor reachability probabilities of logical models", "attrq"};
  app.require_subcommand(1);

  AnalyzeOptions analyze_opts;
  analyze_opts.threads = default_threads();
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Estimate attractor probabilities of a model");
  analyze_cmd->add_option("--method", analyze_opts.method, "exact, firefront or avatar")
      ->required()
      ->check(CLI::IsMember({"exact", "firefront", "avatar"}));
  analyze_cmd->add_option("file", analyze_opts.file, "model file")->required();
  add_engine_flags(*analyze_cmd, analyze_opts);
  auto* json_flag = analyze_cmd->add_flag("--json", "JSON report (default)");
  auto* csv_flag = analyze_cmd->add_flag("--csv", analyze_opts.csv, "CSV report");
  json_flag->excludes(csv_flag);
  analyze_cmd->add_option("--trace", analyze_opts.trace, "write a per-iteration or per-run CSV trace");
  analyze_cmd->add_option("--dot", analyze_opts.dot, "exact: write the SCC quotient graph as DOT");

  GenerateOptions gen_opts;
  CLI::App* generate_cmd = app.add_subcommand("generate", "Generate a random Boolean model");
  generate_cmd->add_option("--n", gen_opts.n, "components")->check(CLI::PositiveNumber);
  generate_cmd->add_option("--k", gen_opts.k, "regulators per component")->check(CLI::PositiveNumber);
  generate_cmd->add_option("--seed", gen_opts.seed, "seed");
  generate_cmd->add_flag("--require-multistable", gen_opts.require_multistable,
                         "redraw until the model has at least two attractors");
  generate_cmd->add_option("--max-attempts", gen_opts.max_attempts, "redraw limit")->check(CLI::PositiveNumber);
  generate_cmd->add_option("--out", gen_opts.out, "output file (default stdout)");

  AnalyzeOptions compare_opts;
  compare_opts.threads = default_threads();
  CLI::App* compare_cmd = app.add_subcommand("compare", "Run every applicable method and tabulate");
  compare_cmd->add_option("file", compare_opts.file, "model file")->required();
  add_engine_flags(*compare_cmd, compare_opts);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream help;
    const int code = app.exit(e, help, help);
    if (code == 0) {
      out << help.str();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (analyze_cmd->parsed()) return analyze(analyze_opts, out);
    if (generate_cmd->parsed()) return generate(gen_opts, out);
    return compare(compare_opts, out);
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << '\n';
    return kExitCapacity;
  } catch (const ModelError& e) {
    err << "model error: " << e.what() << '\n';
    return kExitModel;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitModel;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace attrq
