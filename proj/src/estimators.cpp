#include "msint/estimators.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace msint {

namespace {

void require_nonempty(std::span<const EventHistory> sample) {
  if (sample.empty()) throw std::invalid_argument("empty sample");
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

EventHistory::EventHistory(std::int64_t subject, State initial, std::vector<Jump> jumps)
    : subject_(subject), path_(initial, std::move(jumps)) {
  if (path_.initial() < 0) throw std::invalid_argument("negative observed state");
  for (const auto& j : path_.jumps()) {
    if (j.to < 0) throw std::invalid_argument("negative observed state");
  }
}

Matrix EstimateGrid::transition_at(Time t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return identity(d);
  return transition.at(static_cast<std::size_t>(it - times.begin()) - 1);
}

RowVector EstimateGrid::occupation_at(Time t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return initial;
  return occupation.at(static_cast<std::size_t>(it - times.begin()) - 1);
}

Matrix EstimateGrid::cumulative_hazard(Time t) const {
  Matrix sum = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < times.size() && times[i] <= t; ++i) sum += hazard_increments[i];
  return sum;
}

AdditiveIF EstimateGrid::hazard_if() const {
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < times.size(); ++i) atoms.push_back({times[i], hazard_increments[i]});
  return AdditiveIF(d, std::move(atoms));
}

double empirical_counts(std::span<const EventHistory> sample, State j, State k, Time t) {
  require_nonempty(sample);
  if (j < 1 || k < 1 || j == k) throw std::invalid_argument("empirical_counts needs states j != k >= 1");
  std::size_t count = 0;
  for (const auto& h : sample) {
    State prev = h.initial();
    for (const auto& jump : h.jumps()) {
      if (jump.t > t) break;
      if (prev == j && jump.to == k) ++count;
      prev = jump.to;
    }
  }
  return static_cast<double>(count) / static_cast<double>(sample.size());
}

double empirical_occupancy(std::span<const EventHistory> sample, State j, Time t, Side side) {
  require_nonempty(sample);
  if (j < 1) throw std::invalid_argument("empirical_occupancy needs j >= 1");
  std::size_t count = 0;
  for (const auto& h : sample) {
    if (h.at(t, side) == j) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(sample.size());
}

EstimateGrid nelson_aalen(std::span<const EventHistory> sample, int d, Time upto) {
  if (d < 1) throw std::invalid_argument("nelson_aalen needs d >= 1");
  struct Record {
    Time t;
    State from;
    State to;
  };
  std::vector<Record> records;
  std::vector<long> at_risk(static_cast<std::size_t>(d) + 1, 0);
  for (const auto& h : sample) {
    if (h.initial() > d) throw std::invalid_argument("observed state exceeds d");
    ++at_risk[static_cast<std::size_t>(h.initial())];
    State prev = h.initial();
    for (const auto& jump : h.jumps()) {
      if (jump.to > d) throw std::invalid_argument("observed state exceeds d");
      if (jump.t <= upto) records.push_back({jump.t, prev, jump.to});
      prev = jump.to;
    }
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const Record& a, const Record& b) { return a.t < b.t; });

  EstimateGrid grid;
  grid.d = d;
  Matrix counts = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < records.size();) {
    const Time u = records[i].t;
    std::size_t end = i;
    counts.setZero();
    bool any = false;
    for (; end < records.size() && records[end].t == u; ++end) {
      const auto& r = records[end];
      if (r.from >= 1 && r.to >= 1) {
        counts(r.from - 1, r.to - 1) += 1.0;
        any = true;
      }
    }
    if (any) {
      Matrix inc = Matrix::Zero(d, d);
      for (int j = 0; j < d; ++j) {
        const double exits = counts.row(j).sum();
        if (exits == 0.0) continue;
        const long risk = at_risk[static_cast<std::size_t>(j) + 1];
        // Every subject making a j->k jump at u was in j at u-.
        if (risk < exits) throw std::logic_error("risk set smaller than observed exits");
        inc.row(j) = counts.row(j) / static_cast<double>(risk);
        inc(j, j) = -exits / static_cast<double>(risk);
      }
      grid.times.push_back(u);
      grid.hazard_increments.push_back(std::move(inc));
    }
    for (std::size_t r = i; r < end; ++r) {
      --at_risk[static_cast<std::size_t>(records[r].from)];
      ++at_risk[static_cast<std::size_t>(records[r].to)];
    }
    i = end;
  }
  return grid;
}

void aalen_johansen(EstimateGrid& grid) {
  grid.transition.clear();
  Matrix p = identity(grid.d);
  for (std::size_t i = 0; i < grid.times.size(); ++i) {
    const Matrix& inc = grid.hazard_increments[i];
    for (int j = 0; j < grid.d; ++j) {
      double off = 0.0;
      bool negative = false;
      for (int k = 0; k < grid.d; ++k) {
        if (k == j) continue;
        off += inc(j, k);
        negative = negative || inc(j, k) < 0.0;
      }
      if (negative || off > 1.0 + 1e-12) {
        std::ostringstream os;
        os << "hazard increment at t=" << grid.times[i] << " row " << j + 1
           << " is not a sub-stochastic exit row";
        throw std::logic_error(os.str());
      }
    }
    p = p * (identity(grid.d) + inc);
    grid.transition.push_back(p);
  }
}

void occupation_estimate(std::span<const EventHistory> sample, EstimateGrid& grid) {
  require_nonempty(sample);
  if (grid.transition.size() != grid.times.size()) aalen_johansen(grid);
  RowVector observed = RowVector::Zero(grid.d);
  for (const auto& h : sample) {
    if (h.initial() >= 1) observed(h.initial() - 1) += 1.0;
  }
  const double total = observed.sum();
  if (!(total > 0.0)) throw std::invalid_argument("no subject is observed at time 0");
  grid.initial = observed / total;
  grid.occupation.clear();
  for (const auto& p : grid.transition) grid.occupation.push_back(grid.initial * p);
}

EstimateGrid estimate(std::span<const EventHistory> sample, int d, Time upto) {
  EstimateGrid grid = nelson_aalen(sample, d, upto);
  aalen_johansen(grid);
  occupation_estimate(sample, grid);
  return grid;
}

// ---------------------------------------------------------------------------

CsvError::CsvError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_field(const std::string& field, std::size_t line, const char* name) {
  T value{};
  const std::string f = trim(field);
  auto res = std::from_chars(f.data(), f.data() + f.size(), value);
  if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
    throw CsvError(line, std::string("cannot parse ") + name + " '" + f + "'");
  }
  return value;
}

}  // namespace

Sample read_event_csv(std::istream& in, int d) {
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  struct Pending {
    std::int64_t subject;
    State initial;
    std::vector<Jump> jumps;
  };
  std::vector<Pending> subjects;
  std::map<std::int64_t, std::size_t> index;

  while (std::getline(in, line)) {
    ++lineno;
    const std::string row = trim(line);
    if (row.empty()) continue;
    if (!header) {
      if (row != "subject,time,state") {
        throw CsvError(lineno, "expected header 'subject,time,state'");
      }
      header = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(row);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 3) throw CsvError(lineno, "expected 3 fields");

    const auto subject = parse_field<std::int64_t>(fields[0], lineno, "subject");
    const auto t = parse_field<double>(fields[1], lineno, "time");
    const auto state = parse_field<int>(fields[2], lineno, "state");
    if (state < 0 || state > d) {
      throw CsvError(lineno, "state " + std::to_string(state) + " outside 0.." + std::to_string(d));
    }

    auto it = index.find(subject);
    if (it == index.end()) {
      if (t != 0.0) throw CsvError(lineno, "first row of a subject must have time 0");
      index.emplace(subject, subjects.size());
      subjects.push_back({subject, state, {}});
      continue;
    }
    Pending& s = subjects[it->second];
    const Time last = s.jumps.empty() ? 0.0 : s.jumps.back().t;
    const State prev = s.jumps.empty() ? s.initial : s.jumps.back().to;
    if (!(t > last)) throw CsvError(lineno, "times of a subject must be strictly increasing");
    if (state == prev) throw CsvError(lineno, "row does not change the subject's state");
    s.jumps.push_back({t, state});
  }
  if (!header) throw CsvError(lineno, "missing header");

  Sample sample;
  sample.reserve(subjects.size());
  for (auto& s : subjects) sample.emplace_back(s.subject, s.initial, std::move(s.jumps));
  return sample;
}

void write_event_csv(std::ostream& out, std::span<const EventHistory> sample) {
  out << "subject,time,state\n";
  for (const auto& h : sample) {
    out << h.subject() << ",0," << h.initial() << '\n';
    for (const auto& j : h.jumps()) {
      out << h.subject() << ',' << format_number(j.t) << ',' << j.to << '\n';
    }
  }
}

void write_occupation_csv(std::ostream& out, const EstimateGrid& grid) {
  out << 't';
  for (int j = 1; j <= grid.d; ++j) out << ",p_" << j;
  out << '\n';
  auto row = [&](Time t, const RowVector& p) {
    out << format_number(t);
    for (Eigen::Index j = 0; j < p.size(); ++j) out << ',' << format_number(p(j));
    out << '\n';
  };
  row(0.0, grid.initial);
  for (std::size_t i = 0; i < grid.times.size(); ++i) row(grid.times[i], grid.occupation[i]);
}

}  // namespace msint
