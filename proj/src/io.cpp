#include "msint/io.hpp"

#include <fstream>
#include <sstream>

namespace msint {

namespace {

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

const char* rule_name(RuleKind k) {
  switch (k) {
    case RuleKind::kMarkov:
      return "markov";
    case RuleKind::kEntryTime:
      return "entry_time_dependent";
    case RuleKind::kDuration:
      return "duration_dependent";
  }
  return "markov";
}

RuleKind rule_from_name(const std::string& s) {
  if (s == "markov") return RuleKind::kMarkov;
  if (s == "entry_time_dependent") return RuleKind::kEntryTime;
  if (s == "duration_dependent") return RuleKind::kDuration;
  throw ConfigError("unknown rule kind '" + s + "'");
}

const char* censoring_name(CensoringKind k) {
  switch (k) {
    case CensoringKind::kNone:
      return "none";
    case CensoringKind::kIndependentRight:
      return "independent_right";
    case CensoringKind::kFilteringConforming:
      return "state_filtering_conforming";
    case CensoringKind::kViolating:
      return "violating";
  }
  return "none";
}

CensoringKind censoring_from_name(const std::string& s) {
  if (s == "none") return CensoringKind::kNone;
  if (s == "independent_right") return CensoringKind::kIndependentRight;
  if (s == "state_filtering_conforming") return CensoringKind::kFilteringConforming;
  if (s == "violating") return CensoringKind::kViolating;
  throw ConfigError("unknown censoring kind '" + s + "'");
}

}  // namespace

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const RowVector& v) {
  json row = json::array();
  for (Eigen::Index j = 0; j < v.size(); ++j) row.push_back(v(j));
  return row;
}

PathSpace pathspace_from_json(const json& doc) {
  return guarded("path space", [&] {
    const int d = doc.at("d").get<int>();
    const Time tau = doc.at("tau").get<double>();
    auto grid = doc.at("grid").get<std::vector<double>>();
    std::vector<WeightedPath> paths;
    for (const auto& p : doc.at("paths")) {
      std::vector<Jump> jumps;
      for (const auto& j : p.at("jumps")) {
        if (!j.is_array() || j.size() != 2) throw ConfigError("path space: jump must be [t, state]");
        jumps.push_back({j[0].get<double>(), j[1].get<int>()});
      }
      paths.push_back({StatePath(p.at("init").get<int>(), std::move(jumps)), p.at("w").get<double>()});
    }
    return PathSpace(d, tau, std::move(grid), std::move(paths));
  });
}

json to_json(const PathSpace& ps) {
  json paths = json::array();
  for (const auto& [path, w] : ps.paths()) {
    json jumps = json::array();
    for (const auto& j : path.jumps()) jumps.push_back({j.t, j.to});
    paths.push_back({{"init", path.initial()}, {"jumps", jumps}, {"w", w}});
  }
  return {{"d", ps.d()}, {"tau", ps.tau()}, {"grid", ps.grid()}, {"paths", paths}};
}

ScenarioConfig scenario_from_json(const json& doc) {
  return guarded("scenario", [&] {
    ScenarioConfig s;
    s.name = doc.value("name", std::string("scenario"));
    s.d = doc.at("d").get<int>();
    s.tau = doc.at("tau").get<double>();
    s.grid = doc.at("grid").get<std::vector<double>>();
    s.kind = rule_from_name(doc.value("rule", std::string("markov")));
    s.initial = doc.at("initial").get<std::vector<double>>();
    for (const auto& r : doc.at("transitions")) {
      TransitionRule rule;
      if (r.contains("time")) rule.time = r.at("time").get<double>();
      rule.from = r.at("from").get<int>();
      rule.to = r.at("to").get<int>();
      rule.prob = r.at("prob").get<double>();
      if (r.contains("key")) rule.key = r.at("key").get<double>();
      s.rules.push_back(rule);
    }
    s.validate();
    return s;
  });
}

json to_json(const ScenarioConfig& s) {
  json rules = json::array();
  for (const auto& r : s.rules) {
    json j = {{"from", r.from}, {"to", r.to}, {"prob", r.prob}};
    if (r.time) j["time"] = *r.time;
    if (r.key) j["key"] = *r.key;
    rules.push_back(std::move(j));
  }
  return {{"name", s.name},       {"d", s.d},       {"tau", s.tau},
          {"grid", s.grid},       {"rule", rule_name(s.kind)},
          {"initial", s.initial}, {"transitions", rules}};
}

CensoringConfig censoring_from_json(const json& doc) {
  return guarded("censoring", [&] {
    CensoringConfig c;
    c.kind = censoring_from_name(doc.at("kind").get<std::string>());
    c.censor_times = doc.value("times", std::vector<double>{});
    c.censor_probs = doc.value("probs", std::vector<double>{});
    c.q = doc.value("q", 1.0);
    c.delta = doc.value("delta", 0.0);
    c.validate();
    return c;
  });
}

json to_json(const CensoringConfig& c) {
  json j = {{"kind", censoring_name(c.kind)}};
  switch (c.kind) {
    case CensoringKind::kNone:
      break;
    case CensoringKind::kIndependentRight:
      j["times"] = c.censor_times;
      j["probs"] = c.censor_probs;
      break;
    case CensoringKind::kViolating:
      j["delta"] = c.delta;
      [[fallthrough]];
    case CensoringKind::kFilteringConforming:
      j["q"] = c.q;
      break;
  }
  return j;
}

json to_json(const EstimateGrid& grid) {
  json inc = json::array();
  json trans = json::array();
  json occ = json::array();
  for (std::size_t i = 0; i < grid.times.size(); ++i) {
    inc.push_back(to_json(grid.hazard_increments[i]));
    if (i < grid.transition.size()) trans.push_back(to_json(grid.transition[i]));
    if (i < grid.occupation.size()) occ.push_back(to_json(grid.occupation[i]));
  }
  return {{"d", grid.d},
          {"initial", to_json(grid.initial)},
          {"times", grid.times},
          {"hazard_increments", inc},
          {"transition", trans},
          {"occupation", occ}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace msint
