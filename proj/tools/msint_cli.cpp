#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "msint/estimators.hpp"
#include "msint/io.hpp"
#include "msint/simulation.hpp"
#include "msint/verify.hpp"

namespace fs = std::filesystem;
using namespace msint;

namespace {

enum Exit { kPass = 0, kCheckFailure = 1, kUsage = 2, kIo = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("cannot write " + path.string());
}

Tolerances parse_tolerances(const std::vector<std::string>& overrides) {
  Tolerances tol;
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--tol expects name=value, got '" + item + "'");
    double v = 0.0;
    try {
      v = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("--tol value is not a number: '" + item + "'");
    }
    try {
      tol.set(item.substr(0, eq), v);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return tol;
}

void print_records(const RunReport& report, bool verbose) {
  for (const auto& r : report.records) {
    if (!verbose && r.pass) continue;
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << "  lhs=" << std::setprecision(12) << r.lhs
              << " rhs=" << r.rhs << " tol=" << r.tol << "  [" << r.anchor << "]\n";
  }
  std::cout << report.records.size() - report.failures() << " passed, " << report.failures()
            << " failed\n";
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string scenario;
  std::string censoring;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  if (a.n == 0) throw UsageError("--n must be at least 1");
  const ScenarioConfig scenario = scenario_from_json(read_json_file(a.scenario));
  CensoringConfig cfg;
  if (!a.censoring.empty()) cfg = censoring_from_json(read_json_file(a.censoring));
  const Sample sample = simulate_sample(scenario, cfg, a.n, a.seed);

  auto out = open_out(a.out);
  write_event_csv(out, sample);
  if (!out) throw IoError("cannot write " + a.out);

  std::size_t transitions = 0;
  std::size_t hidden = 0;
  for (const auto& h : sample) {
    bool ever_hidden = h.initial() == 0;
    State prev = h.initial();
    for (const auto& j : h.jumps()) {
      if (prev != 0 && j.to != 0) ++transitions;
      ever_hidden = ever_hidden || j.to == 0;
      prev = j.to;
    }
    if (ever_hidden) ++hidden;
  }
  std::cout << "subjects " << sample.size() << "\nobserved transitions " << transitions
            << "\nsubjects with unobserved stretches " << hidden << "\nwrote " << a.out << '\n';
  return kPass;
}

// ---------------------------------------------------------------------------

struct EstimateArgs {
  std::string input;
  int d = 0;
  std::string scenario;
  double tau = 0.0;
  std::string out_csv;
  std::string out_json;
};

int cmd_estimate(const EstimateArgs& a) {
  int d = a.d;
  double tau = a.tau;
  if (!a.scenario.empty()) {
    const ScenarioConfig s = scenario_from_json(read_json_file(a.scenario));
    if (d == 0) d = s.d;
    if (tau == 0.0) tau = s.tau;
  }
  if (d < 1) throw UsageError("state count unknown: pass --d or --scenario");

  std::ifstream in(a.input);
  if (!in) throw IoError("cannot read " + a.input);
  const Sample sample = read_event_csv(in, d);
  if (sample.empty()) throw UsageError(a.input + ": no subjects");
  if (tau == 0.0) {
    for (const auto& h : sample) {
      for (const auto& j : h.jumps()) tau = std::max(tau, j.t);
    }
    if (tau == 0.0) tau = 1.0;
  }
  const EstimateGrid grid = estimate(sample, d, tau);

  if (!a.out_csv.empty()) {
    auto out = open_out(a.out_csv);
    write_occupation_csv(out, grid);
  }
  if (!a.out_json.empty()) write_json(a.out_json, to_json(grid));
  if (a.out_csv.empty() && a.out_json.empty()) write_occupation_csv(std::cout, grid);

  std::cerr << "subjects " << sample.size() << ", event times " << grid.times.size() << '\n';
  return kPass;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::vector<std::string> only;
  std::vector<std::string> scenarios;
  std::string corpus;
  std::size_t random = 100;
  std::size_t random_markov = 50;
  std::size_t random_duality = 100;
  std::uint64_t seed = 1;
  std::vector<std::string> tol;
  std::string report;
  bool verbose = false;
};

struct CorpusEntry {
  std::string label;
  PathSpace ps;
  bool markov;
};

std::optional<CorpusEntry> load_entry(const fs::path& path) {
  const json doc = read_json_file(path);
  const std::string label = path.stem().string();
  if (!doc.is_object()) throw ConfigError(path.string() + ": expected a JSON object");
  if (doc.contains("paths")) return CorpusEntry{label, pathspace_from_json(doc), false};
  if (doc.contains("transitions")) {
    const ScenarioConfig s = scenario_from_json(doc);
    return CorpusEntry{label, exact_pathspace(s), s.kind == RuleKind::kMarkov};
  }
  if (doc.contains("kind")) {
    censoring_from_json(doc);
    return std::nullopt;
  }
  throw ConfigError(path.string() + ": neither a scenario, a path space nor a censoring config");
}

fs::path corpus_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("MSINT_CORPUS")) return env;
  return "corpus";
}

void print_sweep(const std::string& label, const std::vector<double>& sweep) {
  std::cout << "defect of (P - 1) against Lambda, " << label << "\n  depth  defect\n";
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    std::cout << "  " << std::setw(5) << i << "  " << std::setprecision(6) << std::scientific
              << sweep[i] << std::defaultfloat << '\n';
  }
}

int cmd_verify(const VerifyArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  const Tolerances tol = parse_tolerances(a.tol);
  std::vector<std::string> only;
  try {
    for (const auto& s : a.only) only.push_back(canonical_suite(s));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  auto wants = [&](const std::string& s) {
    return only.empty() || std::find(only.begin(), only.end(), s) != only.end();
  };

  std::vector<CorpusEntry> entries;
  json cfg = {{"only", only}, {"tol", tol.values}};
  const bool explicit_files = !a.scenarios.empty();
  if (explicit_files) {
    for (const auto& f : a.scenarios) {
      if (auto e = load_entry(f)) entries.push_back(std::move(*e));
      cfg["files"].push_back(read_json_file(f));
    }
  } else {
    const fs::path dir = corpus_dir(a.corpus);
    if (!fs::is_directory(dir)) throw IoError("corpus directory not found: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.path().extension() == ".json") files.push_back(e.path());
    }
    if (files.empty()) throw IoError("corpus directory has no .json files: " + dir.string());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      if (auto e = load_entry(f)) entries.push_back(std::move(*e));
      cfg["files"].push_back(read_json_file(f));
    }
    cfg["random"] = {a.random, a.random_markov, a.random_duality};
    for (const auto& s : random_corpus(a.seed, a.random)) {
      entries.push_back({s.name, exact_pathspace(s), s.kind == RuleKind::kMarkov});
    }
    RandomScenarioOptions markov;
    markov.kind = RuleKind::kMarkov;
    for (auto s : random_corpus(a.seed + 1, a.random_markov, markov)) {
      s.name = "markov" + s.name.substr(6);
      entries.push_back({s.name, exact_pathspace(s), true});
    }
  }

  RunReport report;
  report.command = "verify";
  report.seed = a.seed;
  report.config_digest = digest(cfg);
  for (const auto& e : entries) {
    auto recs = run_suites(e.ps, e.label, e.markov, only, tol);
    report.records.insert(report.records.end(), recs.begin(), recs.end());
    if (explicit_files && wants("hazard_transform")) {
      std::vector<double> sweep;
      check_hazard_transform(e.ps, e.label, tol, &sweep);
      print_sweep(e.label, sweep);
    }
  }
  if (!explicit_files && wants("duality")) {
    std::mt19937_64 gen(splitmix64(a.seed + 2));
    for (std::size_t i = 0; i < a.random_duality; ++i) {
      const AdditiveIF mu = random_pure_jump(gen);
      std::vector<Interval> intervals;
      for (int k = 0; k < 10; ++k) intervals.push_back(random_subinterval(gen));
      auto recs = check_duality(mu, intervals, "pure_jump" + std::to_string(i), tol);
      report.records.insert(report.records.end(), recs.begin(), recs.end());
    }
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::cout << "checked " << entries.size() << " path spaces\n";
  print_records(report, a.verbose);
  if (!a.report.empty()) write_json(a.report, to_json(report));
  return report.ok() ? kPass : kCheckFailure;
}

// ---------------------------------------------------------------------------

struct ConvergenceArgs {
  std::string scenario;
  std::string conforming;
  std::string violating;
  std::vector<std::size_t> ns = {100, 1000, 10000};
  std::uint64_t seed = 7;
  std::vector<std::string> tol;
  std::string out_csv;
  std::string report;
};

int cmd_convergence(const ConvergenceArgs& a) {
  const Tolerances tol = parse_tolerances(a.tol);
  const ScenarioConfig scenario = scenario_from_json(read_json_file(a.scenario));
  const CensoringConfig conforming = censoring_from_json(read_json_file(a.conforming));
  std::optional<CensoringConfig> violating;
  if (!a.violating.empty()) violating = censoring_from_json(read_json_file(a.violating));
  for (std::size_t n : a.ns) {
    if (n == 0) throw UsageError("--n values must be at least 1");
  }

  ConvergenceOptions opts;
  opts.ns = a.ns;
  opts.seed = a.seed;
  const RunReport report =
      run_convergence(scenario, conforming, violating ? &*violating : nullptr, opts, tol);

  std::cout << "arm         n       sup_error\n";
  for (const auto& row : report.convergence) {
    std::cout << std::left << std::setw(11) << row.arm << ' ' << std::right << std::setw(7) << row.n
              << "  " << std::setprecision(6) << std::fixed << row.sup_error << std::defaultfloat
              << '\n';
  }
  if (!a.out_csv.empty()) {
    auto out = open_out(a.out_csv);
    out << "arm,n,sup_error\n" << std::setprecision(17);
    for (const auto& row : report.convergence) {
      out << row.arm << ',' << row.n << ',' << row.sup_error << '\n';
    }
  }
  print_records(report, true);
  if (!a.report.empty()) write_json(a.report, to_json(report));
  return report.ok() ? kPass : kCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-state interval-function toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Simulate an event-history CSV");
  s->add_option("--scenario", sim.scenario, "Scenario JSON")->required();
  s->add_option("--censoring", sim.censoring, "Censoring JSON (default: none)");
  s->add_option("--n", sim.n, "Number of subjects")->required();
  s->add_option("--seed", sim.seed, "Random seed")->required();
  s->add_option("--out", sim.out, "Output CSV")->required();

  EstimateArgs est;
  auto* e = app.add_subcommand("estimate", "Nelson-Aalen / Aalen-Johansen estimates from a CSV");
  e->add_option("--input", est.input, "Event-history CSV")->required();
  e->add_option("--d", est.d, "Number of states");
  e->add_option("--scenario", est.scenario, "Scenario JSON supplying d and tau");
  e->add_option("--tau", est.tau, "Horizon (default: scenario tau or last event time)");
  e->add_option("--out-csv", est.out_csv, "Occupation curve CSV");
  e->add_option("--out-json", est.out_json, "Full estimate JSON");

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "Run the identity and bound suites");
  v->add_option("--only", ver.only, "Restrict to these suites");
  v->add_option("--scenario", ver.scenarios, "Check these files instead of the corpus");
  v->add_option("--corpus", ver.corpus, "Corpus directory (default: $MSINT_CORPUS or ./corpus)");
  v->add_option("--random", ver.random, "Random grid scenarios");
  v->add_option("--random-markov", ver.random_markov, "Random Markov grid scenarios");
  v->add_option("--random-duality", ver.random_duality, "Random pure-jump instances");
  v->add_option("--seed", ver.seed, "Seed for the random instances");
  v->add_option("--tol", ver.tol, "Tolerance override name=value");
  v->add_option("--report", ver.report, "Write the run report JSON here");
  v->add_flag("--verbose", ver.verbose, "Print passing checks too");

  ConvergenceArgs conv;
  auto* c = app.add_subcommand("convergence", "Estimator error against the exact oracle as n grows");
  c->add_option("--scenario", conv.scenario, "Scenario JSON")->required();
  c->add_option("--conforming", conv.conforming, "Censoring JSON satisfying the observation condition")
      ->required();
  c->add_option("--violating", conv.violating, "Censoring JSON violating it");
  c->add_option("--n", conv.ns, "Sample sizes")->delimiter(',');
  c->add_option("--seed", conv.seed, "Random seed");
  c->add_option("--tol", conv.tol, "Tolerance override name=value");
  c->add_option("--out-csv", conv.out_csv, "Plot-ready table");
  c->add_option("--report", conv.report, "Write the run report JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*s) return cmd_simulate(sim);
    if (*e) return cmd_estimate(est);
    if (*v) return cmd_verify(ver);
    if (*c) return cmd_convergence(conv);
  } catch (const UsageError& err) {
    std::cerr << "usage error: " << err.what() << '\n';
    return kUsage;
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return kUsage;
  } catch (const CsvError& err) {
    std::cerr << "input error: " << err.what() << '\n';
    return kUsage;
  } catch (const IoError& err) {
    std::cerr << "i/o error: " << err.what() << '\n';
    return kIo;
  } catch (const PathSpaceTooLarge& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
