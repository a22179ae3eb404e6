#include "msint/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace msint {

namespace {

constexpr double kSumTol = 1e-12;

std::size_t grid_index(const std::vector<Time>& grid, Time t) {
  auto it = std::lower_bound(grid.begin(), grid.end(), t);
  if (it == grid.end() || *it != t) return grid.size();
  return static_cast<std::size_t>(it - grid.begin());
}

/// Draws an index from `probs` (which may sum to less than one); returns
/// probs.size() for "none of them".
std::size_t draw(double u, const std::vector<double>& probs) {
  double total = 0.0;
  for (double p : probs) total += p;
  if (1.0 - total <= kSumTol) u *= total;
  double cum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cum += probs[i];
    if (probs[i] > 0.0 && u < cum) return i;
  }
  return probs.size();
}

}  // namespace

// ---------------------------------------------------------------------------

void ScenarioConfig::validate() const {
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("scenario '" + name + "': " + what);
  };
  if (d < 1) fail("d must be >= 1");
  if (!(tau > 0.0)) fail("tau must be positive");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] <= tau)) fail("grid times must lie in (0, tau]");
    if (i > 0 && !(grid[i - 1] < grid[i])) fail("grid must be strictly increasing");
  }
  if (initial.size() != static_cast<std::size_t>(d)) fail("initial distribution needs d entries");
  double total = 0.0;
  for (double p : initial) {
    if (!(p >= 0.0)) fail("initial probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > kSumTol) fail("initial distribution must sum to 1");
  for (const auto& r : rules) {
    if (r.from < 1 || r.from > d || r.to < 1 || r.to > d) fail("rule state outside 1..d");
    if (r.from == r.to) fail("rule must change state");
    if (!(r.prob >= 0.0 && r.prob <= 1.0)) fail("rule probability outside [0, 1]");
    if (r.time && grid_index(grid, *r.time) == grid.size()) fail("rule time is not a grid time");
    if (r.key && kind == RuleKind::kMarkov) fail("markov rules cannot carry a history key");
  }
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (State j = 1; j <= d; ++j) {
      for (double f : feature_values(g)) {
        const auto row = jump_row(g, j, f);
        double sum = 0.0;
        for (double p : row) sum += p;
        if (sum > 1.0 + kSumTol) {
          std::ostringstream os;
          os << "jump probabilities from state " << j << " at t=" << grid[g] << " sum to " << sum;
          fail(os.str());
        }
      }
    }
  }
}

std::vector<double> ScenarioConfig::jump_row(std::size_t g, State from, double feature) const {
  std::vector<double> row(static_cast<std::size_t>(d), 0.0);
  std::vector<int> score(static_cast<std::size_t>(d), -1);
  const Time t = grid.at(g);
  for (const auto& r : rules) {
    if (r.from != from) continue;
    if (r.time && *r.time != t) continue;
    if (r.key && *r.key != feature) continue;
    const int s = (r.time ? 1 : 0) + (r.key ? 2 : 0);
    auto idx = static_cast<std::size_t>(r.to - 1);
    if (s > score[idx]) {
      score[idx] = s;
      row[idx] = r.prob;
    }
  }
  return row;
}

std::vector<double> ScenarioConfig::feature_values(std::size_t g) const {
  switch (kind) {
    case RuleKind::kMarkov:
      return {0.0};
    case RuleKind::kEntryTime: {
      std::vector<double> out{0.0};
      for (std::size_t i = 0; i < g; ++i) out.push_back(grid[i]);
      return out;
    }
    case RuleKind::kDuration: {
      std::vector<double> out;
      for (std::size_t s = 1; s <= g + 1; ++s) out.push_back(static_cast<double>(s));
      return out;
    }
  }
  return {0.0};
}

void CensoringConfig::validate() const {
  switch (kind) {
    case CensoringKind::kNone:
      return;
    case CensoringKind::kIndependentRight: {
      if (censor_times.size() != censor_probs.size()) {
        throw std::invalid_argument("censoring needs one probability per censoring time");
      }
      double total = 0.0;
      for (std::size_t i = 0; i < censor_times.size(); ++i) {
        if (!(censor_times[i] > 0.0)) throw std::invalid_argument("censoring times must be positive");
        if (!(censor_probs[i] >= 0.0)) throw std::invalid_argument("censoring probabilities must be nonnegative");
        total += censor_probs[i];
      }
      if (total > 1.0 + kSumTol) throw std::invalid_argument("censoring probabilities exceed 1");
      return;
    }
    case CensoringKind::kFilteringConforming:
    case CensoringKind::kViolating:
      if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("observation probability q must lie in (0, 1]");
      if (kind == CensoringKind::kViolating && !(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("violation contrast delta must lie in (0, 1)");
      }
      return;
  }
}

// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SubjectRng::SubjectRng(std::uint64_t seed, std::uint64_t subject, Purpose purpose) {
  const std::uint64_t s =
      splitmix64(splitmix64(splitmix64(seed) ^ subject) ^ static_cast<std::uint64_t>(purpose));
  engine_.seed(s);
}

double SubjectRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

StatePath sample_path(SubjectRng& rng, const ScenarioConfig& scenario) {
  const std::size_t init = draw(rng.uniform(), scenario.initial);
  if (init >= scenario.initial.size()) throw std::logic_error("initial distribution exhausted");
  State state = static_cast<State>(init) + 1;
  std::vector<Jump> jumps;
  Time entry_time = 0.0;
  std::size_t entry_pos = 0;
  for (std::size_t g = 0; g < scenario.grid.size(); ++g) {
    const double u = rng.uniform();
    double feature = 0.0;
    if (scenario.kind == RuleKind::kEntryTime) feature = entry_time;
    if (scenario.kind == RuleKind::kDuration) feature = static_cast<double>(g + 1 - entry_pos);
    const std::size_t k = draw(u, scenario.jump_row(g, state, feature));
    if (k == static_cast<std::size_t>(scenario.d)) continue;
    state = static_cast<State>(k) + 1;
    jumps.push_back({scenario.grid[g], state});
    entry_time = scenario.grid[g];
    entry_pos = g + 1;
  }
  return StatePath(static_cast<State>(init) + 1, std::move(jumps));
}

namespace {

/// Builds X from U and an observation indicator that is constant between the
/// given switch times.
EventHistory mask_path(std::int64_t subject, const StatePath& path,
                       const std::vector<Time>& switch_times, const std::vector<bool>& observed) {
  // observed[i] holds on [switch_times[i-1], switch_times[i]) with switch_times[-1] = 0.
  auto status_at = [&](Time t) {
    auto it = std::upper_bound(switch_times.begin(), switch_times.end(), t);
    return observed[static_cast<std::size_t>(it - switch_times.begin())];
  };
  std::vector<Time> changes = switch_times;
  for (const auto& j : path.jumps()) changes.push_back(j.t);
  std::sort(changes.begin(), changes.end());
  changes.erase(std::unique(changes.begin(), changes.end()), changes.end());

  const State initial = status_at(0.0) ? path.initial() : 0;
  State prev = initial;
  std::vector<Jump> jumps;
  for (Time t : changes) {
    const State x = status_at(t) ? path.at(t) : 0;
    if (x != prev) {
      jumps.push_back({t, x});
      prev = x;
    }
  }
  return EventHistory(subject, initial, std::move(jumps));
}

}  // namespace

EventHistory apply_censoring(SubjectRng& rng, std::int64_t subject, const StatePath& path,
                             const CensoringConfig& cfg, const ScenarioConfig& scenario) {
  switch (cfg.kind) {
    case CensoringKind::kNone:
      return EventHistory(subject, path.initial(), path.jumps());
    case CensoringKind::kIndependentRight: {
      const std::size_t i = draw(rng.uniform(), cfg.censor_probs);
      if (i == cfg.censor_probs.size() || cfg.censor_times[i] > scenario.tau) {
        return EventHistory(subject, path.initial(), path.jumps());
      }
      return mask_path(subject, path, {cfg.censor_times[i]}, {true, false});
    }
    case CensoringKind::kFilteringConforming:
    case CensoringKind::kViolating: {
      const auto& grid = scenario.grid;
      std::vector<Time> switches;
      std::vector<bool> observed;
      observed.push_back(rng.uniform() < cfg.q);
      Time anchor = 0.0;
      for (Time g : grid) {
        switches.push_back(anchor + 0.5 * (g - anchor));
        anchor = g;
        double q = cfg.q;
        if (cfg.kind == CensoringKind::kViolating && path.before(g) != path.at(g)) {
          q *= 1.0 - cfg.delta;
        }
        observed.push_back(rng.uniform() < q);
      }
      return mask_path(subject, path, switches, observed);
    }
  }
  throw std::logic_error("unknown censoring kind");
}

Sample simulate_sample(const ScenarioConfig& scenario, const CensoringConfig& cfg, std::size_t n,
                       std::uint64_t seed) {
  scenario.validate();
  cfg.validate();
  Sample sample;
  sample.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    SubjectRng path_rng(seed, i, SubjectRng::Purpose::kPath);
    SubjectRng obs_rng(seed, i, SubjectRng::Purpose::kObservation);
    const StatePath u = sample_path(path_rng, scenario);
    sample.push_back(apply_censoring(obs_rng, static_cast<std::int64_t>(i), u, cfg, scenario));
  }
  return sample;
}

PathSpace exact_pathspace(const ScenarioConfig& scenario, std::size_t max_paths) {
  scenario.validate();
  std::vector<WeightedPath> out;
  std::vector<Jump> jumps;

  std::function<void(std::size_t, State, Time, std::size_t, State, double)> walk =
      [&](std::size_t g, State state, Time entry_time, std::size_t entry_pos, State initial,
          double weight) {
        if (g == scenario.grid.size()) {
          if (out.size() >= max_paths) {
            throw PathSpaceTooLarge("path space exceeds " + std::to_string(max_paths) + " paths");
          }
          out.push_back({StatePath(initial, jumps), weight});
          return;
        }
        double feature = 0.0;
        if (scenario.kind == RuleKind::kEntryTime) feature = entry_time;
        if (scenario.kind == RuleKind::kDuration) feature = static_cast<double>(g + 1 - entry_pos);
        const auto row = scenario.jump_row(g, state, feature);
        double stay = 1.0;
        for (std::size_t k = 0; k < row.size(); ++k) {
          stay -= row[k];
          if (row[k] <= 0.0) continue;
          jumps.push_back({scenario.grid[g], static_cast<State>(k) + 1});
          walk(g + 1, static_cast<State>(k) + 1, scenario.grid[g], g + 1, initial, weight * row[k]);
          jumps.pop_back();
        }
        if (stay > kSumTol) walk(g + 1, state, entry_time, entry_pos, initial, weight * stay);
      };

  for (std::size_t j = 0; j < scenario.initial.size(); ++j) {
    if (scenario.initial[j] > 0.0) {
      walk(0, static_cast<State>(j) + 1, 0.0, 0, static_cast<State>(j) + 1, scenario.initial[j]);
    }
  }
  // Forced exits leave a rounding-level gap; rescale so weights sum to one.
  double total = 0.0;
  for (const auto& p : out) total += p.weight;
  for (auto& p : out) p.weight /= total;
  return PathSpace(scenario.d, scenario.tau, scenario.grid, std::move(out));
}

// ---------------------------------------------------------------------------

ScenarioConfig idn_scenario() {
  ScenarioConfig s;
  s.name = "idn";
  s.d = 3;
  s.tau = 3.0;
  s.grid = {1.0, 2.0, 3.0};
  s.kind = RuleKind::kEntryTime;
  s.initial = {1.0, 0.0, 0.0};
  s.rules = {
      {1.0, 1, 2, 0.5, std::nullopt},
      {2.0, 1, 2, 0.5, std::nullopt},
      {3.0, 2, 3, 0.8, 1.0},
      {3.0, 2, 3, 0.2, 2.0},
  };
  return s;
}

ScenarioConfig surv_scenario() {
  ScenarioConfig s;
  s.name = "surv";
  s.d = 2;
  s.tau = 1.0;
  s.grid = {1.0};
  s.kind = RuleKind::kMarkov;
  s.initial = {1.0, 0.0};
  s.rules = {{1.0, 1, 2, 0.5, std::nullopt}};
  return s;
}

ScenarioConfig random_scenario(std::mt19937_64& gen, const RandomScenarioOptions& opts) {
  auto uniform = [&gen]() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  auto pick = [&gen](int lo, int hi) {
    return lo + static_cast<int>(gen() % static_cast<std::uint64_t>(hi - lo + 1));
  };

  ScenarioConfig s;
  s.d = pick(opts.min_d, opts.max_d);
  const int g = pick(opts.min_grid, opts.max_grid);
  for (int i = 1; i <= g; ++i) s.grid.push_back(static_cast<double>(i));
  s.tau = static_cast<double>(g);
  if (opts.kind) {
    s.kind = *opts.kind;
  } else {
    s.kind = static_cast<RuleKind>(gen() % 3);
  }
  s.name = "random";

  s.initial.assign(static_cast<std::size_t>(s.d), 0.0);
  if (opts.progressive || uniform() < 0.5) {
    s.initial[0] = 1.0;
  } else {
    double total = 0.0;
    for (auto& p : s.initial) total += (p = uniform() < 0.3 ? 0.0 : 0.1 + uniform());
    if (total == 0.0) {
      s.initial[0] = 1.0;
    } else {
      for (auto& p : s.initial) p /= total;
    }
  }

  for (std::size_t gi = 0; gi < s.grid.size(); ++gi) {
    for (State j = 1; j <= s.d; ++j) {
      std::vector<State> targets;
      for (State k = opts.progressive ? j + 1 : 1; k <= s.d; ++k) {
        if (k != j) targets.push_back(k);
      }
      if (targets.empty()) continue;
      for (double f : s.feature_values(gi)) {
        const double total = uniform() < opts.forced_exit_rate ? 1.0 : 0.9 * uniform();
        std::vector<double> w(targets.size());
        double wsum = 0.0;
        for (auto& x : w) wsum += (x = 0.05 + uniform());
        for (std::size_t i = 0; i < targets.size(); ++i) {
          TransitionRule r;
          r.time = s.grid[gi];
          r.from = j;
          r.to = targets[i];
          r.prob = std::min(1.0, total * w[i] / wsum);
          if (s.kind != RuleKind::kMarkov) r.key = f;
          s.rules.push_back(r);
        }
      }
    }
  }
  s.validate();
  return s;
}

}  // namespace msint
