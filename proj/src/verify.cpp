#include "msint/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

namespace msint {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

CheckRecord matrix_equality(std::string name, std::string anchor, const Matrix& a, const Matrix& b,
                            double tol) {
  const double gap = max_abs(a - b);
  return {std::move(name), std::move(anchor), gap, 0.0, tol, gap <= tol};
}

}  // namespace

bool RunReport::ok() const { return failures() == 0; }

std::size_t RunReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const CheckRecord& r) { return !r.pass; }));
}

void RunReport::merge(const RunReport& other) {
  records.insert(records.end(), other.records.begin(), other.records.end());
  convergence.insert(convergence.end(), other.convergence.begin(), other.convergence.end());
}

json to_json(const RunReport& r) {
  json records = json::array();
  for (const auto& c : r.records) {
    records.push_back({{"name", c.name},
                       {"anchor", c.anchor},
                       {"lhs", c.lhs},
                       {"rhs", c.rhs},
                       {"tol", c.tol},
                       {"pass", c.pass}});
  }
  json rows = json::array();
  for (const auto& row : r.convergence) {
    rows.push_back({{"arm", row.arm}, {"n", row.n}, {"sup_error", row.sup_error}});
  }
  return {{"command", r.command},
          {"config_digest", r.config_digest},
          {"seed", r.seed},
          {"passed", r.records.size() - r.failures()},
          {"failed", r.failures()},
          {"records", records},
          {"convergence", rows},
          {"seconds", r.seconds}};
}

std::string digest(const json& doc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : doc.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double Tolerances::at(const std::string& name) const {
  auto it = values.find(name);
  if (it == values.end()) throw std::invalid_argument("unknown tolerance '" + name + "'");
  return it->second;
}

void Tolerances::set(const std::string& name, double value) {
  if (!values.contains(name)) throw std::invalid_argument("unknown tolerance '" + name + "'");
  if (!(value >= 0.0)) throw std::invalid_argument("tolerance must be nonnegative");
  values[name] = value;
}

std::vector<Time> knots(const PathSpace& ps) {
  std::vector<Time> out{0.0};
  for (Time t : ps.grid()) {
    if (t > 0.0) out.push_back(t);
  }
  return out;
}

std::vector<Interval> knot_intervals(const PathSpace& ps) {
  const auto k = knots(ps);
  std::vector<Interval> out;
  for (std::size_t i = 0; i < k.size(); ++i) {
    for (std::size_t j = i + 1; j < k.size(); ++j) {
      for (bool lc : {false, true}) {
        for (bool hc : {false, true}) out.emplace_back(k[i], k[j], lc, hc);
      }
    }
  }
  return out;
}

std::vector<CheckRecord> check_occupation_identity(const PathSpace& ps, const std::string& label,
                                                   const Tolerances& tol) {
  const double eps = tol.at("occupation_identity");
  const HazardMatrixIF lambda = hazard(ps);
  const RowVector p0 = occupation_vector(ps, 0.0);
  std::vector<CheckRecord> out;
  for (Time t : ps.grid()) {
    const RowVector lhs = p0 * prodint_additive(lambda, Interval::left_open(0.0, t));
    const RowVector rhs = occupation_vector(ps, t);
    const double gap = (lhs - rhs).cwiseAbs().maxCoeff();
    out.push_back({label + "/occupation_identity/t=" + fmt("%g", t),
                   "p(0) prodint_(0,t](1 + Lambda) = p(t)", gap, 0.0, eps, gap <= eps});
  }
  return out;
}

std::vector<CheckRecord> check_hazard_transform(const PathSpace& ps, const std::string& label,
                                                const Tolerances& tol, std::vector<double>* sweep) {
  const double eps = tol.at("hazard_transform");
  const GeneralIF target = GeneralIF::from(hazard(ps).lambda());
  const GeneralIF p_minus_one = transition_function(ps).shifted(-1.0);
  const int depth = 2 + static_cast<int>(std::ceil(std::log2(static_cast<double>(ps.grid().size()) + 1.0)));
  const auto values = defect_sweep(p_minus_one, target, ps.horizon(), depth);
  if (sweep) *sweep = values;

  std::vector<CheckRecord> out;
  double worst_rise = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    worst_rise = std::max(worst_rise, values[i] - values[i - 1]);
  }
  out.push_back({label + "/hazard_transform/nonincreasing",
                 "defect of (P - 1) against Lambda never grows under refinement", worst_rise, 0.0,
                 eps, worst_rise <= eps});
  out.push_back({label + "/hazard_transform/final", "sum_B ||(P - 1)(B) - Lambda(B)|| -> 0",
                 values.back(), 0.0, eps, values.back() <= eps});
  return out;
}

std::vector<CheckRecord> check_transition_transform(const PathSpace& ps, const std::string& label,
                                                    const Tolerances& tol) {
  const double eps = tol.at("product_integral");
  const HazardMatrixIF lambda = hazard(ps);
  const GeneralIF p = transition_function(ps);
  std::vector<CheckRecord> out;
  for (const auto& a : knot_intervals(ps)) {
    const auto r = multiplicative_transform(p, a);
    if (!r.converged) {
      out.push_back({label + "/transition_transform/" + a.to_string(),
                     "multiplicative transform of P converges", r.change, 0.0, eps, false});
      continue;
    }
    out.push_back(matrix_equality(label + "/transition_transform/" + a.to_string(),
                                  "prod-transform of P = prodint(1 + Lambda)", r.value,
                                  prodint_additive(lambda, a), eps));
  }
  return out;
}

std::vector<CheckRecord> check_counting_transform(const PathSpace& ps, const std::string& label,
                                                  const Tolerances& tol) {
  const double eps = tol.at("counting_transform");
  const AdditiveIF f = counting_mean_if(ps);
  const GeneralIF q = indicator_mean_if(ps);
  const Partition young = young_partition(ps.grid(), ps.horizon());
  std::vector<CheckRecord> out;
  for (State j = 1; j <= ps.d(); ++j) {
    for (State k = 1; k <= ps.d(); ++k) {
      if (j == k) continue;
      const double defect = strict_transform_defect(q.entry(j - 1, k - 1), f.entry(j - 1, k - 1), young);
      out.push_back({label + "/counting_transform/" + std::to_string(j) + std::to_string(k),
                     "sum_B |Q_jk(B) - F_jk(B)| -> 0", defect, 0.0, eps, defect <= eps});
    }
  }
  return out;
}

std::vector<CheckRecord> check_kolmogorov(const PathSpace& ps, const std::string& label,
                                          const Tolerances& tol) {
  const double eps = tol.at("kolmogorov");
  const AdditiveIF f = counting_mean_if(ps);
  const AdditiveIF lambda = hazard(ps).lambda();
  const auto intervals = knot_intervals(ps);
  std::vector<CheckRecord> out;
  for (State j = 1; j <= ps.d(); ++j) {
    const StepFunction inv = inverse_left_occupation(ps, j);
    for (State k = 1; k <= ps.d(); ++k) {
      if (j == k) continue;
      const AdditiveIF fjk = f.entry(j - 1, k - 1);
      const AdditiveIF ljk = lambda.entry(j - 1, k - 1);
      double gap = 0.0;
      double slack = 0.0;
      for (const auto& a : intervals) {
        const double integral = kolmogorov_integral(inv, fjk, a)(0, 0);
        gap = std::max(gap, std::abs(integral - ljk(a)(0, 0)));
        slack = std::min(slack, inv.sup_abs(a) * fjk.variation(a) - std::abs(integral));
      }
      const std::string pair = std::to_string(j) + std::to_string(k);
      out.push_back({label + "/kolmogorov/" + pair, "int 1/p_j(u-) F_jk(du) = Lambda_jk", gap, 0.0,
                     eps, gap <= eps});
      out.push_back({label + "/kolmogorov_bound/" + pair, "||int f dmu|| <= sup|f| ||mu||",
                     -slack, 0.0, eps, -slack <= eps});
    }
  }
  return out;
}

std::vector<CheckRecord> check_markov(const PathSpace& ps, const std::string& label,
                                      const Tolerances& tol) {
  const double eps = tol.at("markov");
  const HazardMatrixIF lambda = hazard(ps);
  std::vector<CheckRecord> out;
  for (const auto& a : knot_intervals(ps)) {
    const Matrix p = transition_matrix(ps, a);
    const Matrix pi = prodint_additive(lambda, a);
    const Side side = a.lo_closed() ? Side::kLeft : Side::kRight;
    double gap = 0.0;
    // Rows conditioned on a null event hold the identity by convention.
    for (State j = 1; j <= ps.d(); ++j) {
      if (occupation(ps, j, a.lo(), side) > 0.0) {
        gap = std::max(gap, (p.row(j - 1) - pi.row(j - 1)).cwiseAbs().maxCoeff());
      }
    }
    out.push_back({label + "/markov/" + a.to_string(), "P(a) = prodint_a(1 + Lambda) on occupied rows", gap,
                   0.0, eps, gap <= eps});
  }
  return out;
}

std::vector<CheckRecord> check_lower_bound(const PathSpace& ps, const std::string& label,
                                           const Tolerances& tol) {
  const double eps = tol.at("lower_bound");
  const auto k = knots(ps);
  std::vector<CheckRecord> out;
  for (State j = 1; j <= ps.d(); ++j) {
    double worst = -1.0;
    double lhs = 0.0;
    double rhs = 0.0;
    for (std::size_t a = 0; a < k.size(); ++a) {
      for (std::size_t b = a; b < k.size(); ++b) {
        const BoundCheck c = check_occupation_lower_bound(ps, j, k[a], k[b]);
        if (c.rhs - c.lhs > worst) {
          worst = c.rhs - c.lhs;
          lhs = c.lhs;
          rhs = c.rhs;
        }
      }
    }
    out.push_back({label + "/lower_bound/" + std::to_string(j),
                   "p_j(t) >= p_j(s) prodint_(s,t](1 - Lambda_j.)", lhs, rhs, eps, lhs >= rhs - eps});
  }
  return out;
}

std::vector<CheckRecord> check_extinction(const PathSpace& ps, const std::string& label,
                                          const Tolerances& tol) {
  const double eps = tol.at("extinction");
  std::vector<CheckRecord> out;
  for (State j = 1; j <= ps.d(); ++j) {
    const ExtinctionReport rep = check_extinction_dichotomy(ps, j);
    for (const auto& b : rep.boundaries) {
      out.push_back({label + "/extinction/" + std::to_string(j) + "@" + fmt("%g", b.t),
                     "exit hazard is 1 where p_j drops to 0", b.exit_hazard, 1.0, eps,
                     b.occupation_before > 0.0 && std::abs(b.exit_hazard - 1.0) <= eps});
    }
  }
  return out;
}

std::vector<CheckRecord> check_duality(const AdditiveIF& mu, const std::vector<Interval>& intervals,
                                       const std::string& label, const Tolerances& tol) {
  const double eps = tol.at("duality");
  const GeneralIF f = identity_plus(mu);
  std::vector<CheckRecord> out;
  double gap = 0.0;
  double excess = -std::numeric_limits<double>::infinity();
  double lhs = 0.0;
  double rhs = 0.0;
  bool converged = true;
  for (const auto& a : intervals) {
    const auto r = multiplicative_transform(f, a);
    converged = converged && r.converged;
    gap = std::max(gap, max_abs(r.value - prodint_additive(mu, a)));
    const BoundCheck b = check_duality_bound(mu, a);
    if (b.lhs - b.rhs > excess) {
      excess = b.lhs - b.rhs;
      lhs = b.lhs;
      rhs = b.rhs;
    }
  }
  out.push_back({label + "/duality", "prod-transform of (1 + mu) = prodint(1 + mu)", gap, 0.0, eps,
                 converged && gap <= eps});
  out.push_back({label + "/duality_bound", "||prodint - 1|| <= exp(||mu||) ||mu||", lhs, rhs, 1e-12,
                 lhs <= rhs + 1e-12});
  return out;
}

// ---------------------------------------------------------------------------

std::vector<ScenarioConfig> random_corpus(std::uint64_t seed, std::size_t count,
                                          const RandomScenarioOptions& opts) {
  std::mt19937_64 gen(splitmix64(seed));
  std::vector<ScenarioConfig> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(random_scenario(gen, opts));
    out.back().name = "random" + std::to_string(i);
  }
  return out;
}

AdditiveIF random_pure_jump(std::mt19937_64& gen, int max_d, int max_atoms, double max_norm) {
  std::uniform_int_distribution<int> dim(1, max_d);
  std::uniform_int_distribution<int> count(1, max_atoms);
  std::uniform_int_distribution<int> slot(1, 8);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  std::uniform_real_distribution<double> scale(0.05, 1.0);
  const int d = dim(gen);
  const int m = count(gen);
  std::set<int> times;
  while (static_cast<int>(times.size()) < m) times.insert(slot(gen));
  std::vector<Atom> atoms;
  for (int t : times) {
    Matrix a(d, d);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = entry(gen);
    const double norm = op_norm(a);
    if (norm > 0.0) a *= max_norm * scale(gen) / norm;
    atoms.push_back({static_cast<double>(t), a});
  }
  return AdditiveIF(d, std::move(atoms));
}

Interval random_subinterval(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> half(0, 16);
  std::bernoulli_distribution coin(0.5);
  int a = half(gen);
  int b = half(gen);
  while (a == b) b = half(gen);
  if (a > b) std::swap(a, b);
  return Interval(a / 2.0, b / 2.0, coin(gen), coin(gen));
}

// ---------------------------------------------------------------------------

namespace {

const std::map<std::string, std::string>& suite_aliases() {
  static const std::map<std::string, std::string> aliases = {
      {"theorem1", "duality"},      {"theorem2", "kolmogorov"},
      {"theorem3", "hazard_transform"}, {"proposition2", "counting_transform"},
      {"lemma_a2", "lower_bound"},  {"lemma_a3", "extinction"},
  };
  return aliases;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "occupation_identity", "hazard_transform", "transition_transform", "counting_transform",
      "duality",             "kolmogorov",       "markov",               "lower_bound",
      "extinction",
  };
  return names;
}

std::string canonical_suite(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  std::replace(lower.begin(), lower.end(), '-', '_');
  if (auto it = suite_aliases().find(lower); it != suite_aliases().end()) return it->second;
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), lower) == names.end()) {
    throw std::invalid_argument("unknown suite '" + name + "'");
  }
  return lower;
}

std::vector<CheckRecord> run_suites(const PathSpace& ps, const std::string& label, bool markov,
                                    const std::vector<std::string>& only, const Tolerances& tol) {
  std::set<std::string> wanted;
  for (const auto& s : only) wanted.insert(canonical_suite(s));
  auto on = [&](const char* s) { return wanted.empty() || wanted.contains(s); };

  std::vector<CheckRecord> out;
  auto add = [&out](std::vector<CheckRecord> more) {
    out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  };
  if (on("occupation_identity")) add(check_occupation_identity(ps, label, tol));
  if (on("hazard_transform")) add(check_hazard_transform(ps, label, tol));
  if (on("transition_transform")) add(check_transition_transform(ps, label, tol));
  if (on("counting_transform")) add(check_counting_transform(ps, label, tol));
  if (on("duality")) add(check_duality(hazard(ps).lambda(), knot_intervals(ps), label, tol));
  if (on("kolmogorov")) add(check_kolmogorov(ps, label, tol));
  if (markov && on("markov")) add(check_markov(ps, label, tol));
  if (on("lower_bound")) add(check_lower_bound(ps, label, tol));
  if (on("extinction")) add(check_extinction(ps, label, tol));
  return out;
}

// ---------------------------------------------------------------------------

double occupation_sup_error(const PathSpace& oracle, const Sample& sample) {
  const EstimateGrid grid = estimate(sample, oracle.d(), oracle.tau());
  double worst = 0.0;
  for (Time t : knots(oracle)) {
    const RowVector diff = grid.occupation_at(t) - occupation_vector(oracle, t);
    worst = std::max(worst, diff.cwiseAbs().maxCoeff());
  }
  return worst;
}

RunReport run_convergence(const ScenarioConfig& scenario, const CensoringConfig& conforming,
                          const CensoringConfig* violating, const ConvergenceOptions& opts,
                          const Tolerances& tol) {
  if (opts.ns.empty()) throw std::invalid_argument("convergence needs at least one n");
  const auto start = std::chrono::steady_clock::now();
  const PathSpace oracle = exact_pathspace(scenario);

  RunReport report;
  report.command = "convergence";
  report.seed = opts.seed;
  json cfg = {{"scenario", to_json(scenario)}, {"conforming", to_json(conforming)}, {"ns", opts.ns}};
  if (violating) cfg["violating"] = to_json(*violating);
  report.config_digest = digest(cfg);

  std::vector<double> errors;
  for (std::size_t n : opts.ns) {
    const double e = occupation_sup_error(oracle, simulate_sample(scenario, conforming, n, opts.seed));
    errors.push_back(e);
    report.convergence.push_back({"conforming", n, e});
  }
  if (errors.size() > 1) {
    for (std::size_t i = 1; i < errors.size(); ++i) {
      report.records.push_back({"convergence/decreasing/n=" + std::to_string(opts.ns[i]),
                                "sup error shrinks with n under status-independent observation",
                                errors[i], errors[i - 1], 0.0, errors[i] < errors[i - 1]});
    }
  }
  const double final_tol = tol.at("convergence_final");
  report.records.push_back({"convergence/final/n=" + std::to_string(opts.ns.back()),
                            "sup_t ||p_hat(t) - p(t)|| small at the largest n", errors.back(),
                            final_tol, final_tol, errors.back() < final_tol});

  if (violating) {
    double e = 0.0;
    for (std::size_t n : opts.ns) {
      e = occupation_sup_error(oracle, simulate_sample(scenario, *violating, n, opts.seed));
      report.convergence.push_back({"violating", n, e});
    }
    const double floor = tol.at("violating_floor");
    report.records.push_back({"convergence/violating/n=" + std::to_string(opts.ns.back()),
                              "status-dependent observation leaves a bias", e, floor, floor,
                              e > floor});
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace msint
