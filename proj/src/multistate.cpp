#include "msint/multistate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace msint {

StatePath::StatePath(State initial, std::vector<Jump> jumps)
    : initial_(initial), jumps_(std::move(jumps)) {
  State prev = initial_;
  for (std::size_t i = 0; i < jumps_.size(); ++i) {
    if (!(jumps_[i].t > 0.0)) throw std::invalid_argument("path jump times must be positive");
    if (i > 0 && !(jumps_[i - 1].t < jumps_[i].t)) {
      throw std::invalid_argument("path jump times must be strictly increasing");
    }
    if (jumps_[i].to == prev) {
      throw std::invalid_argument("path jump does not change state");
    }
    prev = jumps_[i].to;
  }
}

State StatePath::at(Time t) const {
  auto it = std::upper_bound(jumps_.begin(), jumps_.end(), t,
                             [](Time v, const Jump& j) { return v < j.t; });
  return it == jumps_.begin() ? initial_ : std::prev(it)->to;
}

State StatePath::before(Time t) const {
  auto it = std::lower_bound(jumps_.begin(), jumps_.end(), t,
                             [](const Jump& j, Time v) { return j.t < v; });
  return it == jumps_.begin() ? initial_ : std::prev(it)->to;
}

PathSpace::PathSpace(int d, Time tau, std::vector<Time> grid, std::vector<WeightedPath> paths)
    : d_(d), tau_(tau), grid_(std::move(grid)), paths_(std::move(paths)) {
  if (d_ < 1) throw std::invalid_argument("path space needs d >= 1");
  if (!(tau_ > 0.0)) throw std::invalid_argument("path space needs tau > 0");
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (!(grid_[i] > 0.0 && grid_[i] <= tau_)) {
      throw std::invalid_argument("grid times must lie in (0, tau]");
    }
    if (i > 0 && !(grid_[i - 1] < grid_[i])) {
      throw std::invalid_argument("grid times must be strictly increasing");
    }
  }
  if (paths_.empty()) throw std::invalid_argument("path space has no paths");
  double total = 0.0;
  for (const auto& [path, w] : paths_) {
    if (!(w > 0.0)) throw std::invalid_argument("path weights must be positive");
    total += w;
    auto check_state = [&](State s) {
      if (s < 1 || s > d_) {
        std::ostringstream os;
        os << "path state " << s << " outside 1.." << d_;
        throw std::invalid_argument(os.str());
      }
    };
    check_state(path.initial());
    for (const auto& j : path.jumps()) {
      check_state(j.to);
      if (!std::binary_search(grid_.begin(), grid_.end(), j.t)) {
        std::ostringstream os;
        os << "path jump at " << j.t << " is not on the declared grid";
        throw std::invalid_argument(os.str());
      }
    }
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "path weights sum to " << total << ", not 1";
    throw std::invalid_argument(os.str());
  }
}

namespace {

void check_state(const PathSpace& ps, State j) {
  if (j < 1 || j > ps.d()) {
    std::ostringstream os;
    os << "state " << j << " outside 1.." << ps.d();
    throw std::out_of_range(os.str());
  }
}

State start_state(const StatePath& path, const Interval& a) {
  return a.lo_closed() ? path.before(a.lo()) : path.at(a.lo());
}

State end_state(const StatePath& path, const Interval& a) {
  return a.hi_closed() ? path.at(a.hi()) : path.before(a.hi());
}

}  // namespace

double occupation(const PathSpace& ps, State j, Time t, Side side) {
  check_state(ps, j);
  double p = 0.0;
  for (const auto& [path, w] : ps.paths()) {
    if (path.at(t, side) == j) p += w;
  }
  return p;
}

RowVector occupation_vector(const PathSpace& ps, Time t, Side side) {
  RowVector p = RowVector::Zero(ps.d());
  for (const auto& [path, w] : ps.paths()) p(path.at(t, side) - 1) += w;
  return p;
}

Matrix transition_matrix(const PathSpace& ps, const Interval& a) {
  const int d = ps.d();
  Matrix joint = Matrix::Zero(d, d);
  for (const auto& [path, w] : ps.paths()) {
    joint(start_state(path, a) - 1, end_state(path, a) - 1) += w;
  }
  Matrix p = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    const double mass = joint.row(j).sum();
    if (mass > 0.0) {
      p.row(j) = joint.row(j) / mass;
    } else {
      p(j, j) = 1.0;
    }
  }
  return p;
}

double transition_if(const PathSpace& ps, State j, State k, const Interval& a) {
  check_state(ps, j);
  check_state(ps, k);
  double cond = 0.0;
  double joint = 0.0;
  for (const auto& [path, w] : ps.paths()) {
    if (start_state(path, a) != j) continue;
    cond += w;
    if (end_state(path, a) == k) joint += w;
  }
  if (cond > 0.0) return joint / cond;
  return j == k ? 1.0 : 0.0;
}

GeneralIF transition_function(const PathSpace& ps) {
  return GeneralIF(
      ps.d(), [ps](const Interval& a) { return transition_matrix(ps, a); }, ps.grid());
}

double counting_mean(const PathSpace& ps, State j, State k, const Interval& a) {
  check_state(ps, j);
  check_state(ps, k);
  if (j == k) throw std::invalid_argument("counting_mean needs k != j");
  double f = 0.0;
  for (const auto& [path, w] : ps.paths()) {
    State prev = path.initial();
    for (const auto& jump : path.jumps()) {
      if (prev == j && jump.to == k && a.contains(jump.t)) f += w;
      prev = jump.to;
    }
  }
  return f;
}

double indicator_mean(const PathSpace& ps, State j, State k, const Interval& a) {
  check_state(ps, j);
  check_state(ps, k);
  if (j == k) throw std::invalid_argument("indicator_mean needs k != j");
  double q = 0.0;
  for (const auto& [path, w] : ps.paths()) {
    if (start_state(path, a) == j && end_state(path, a) == k) q += w;
  }
  return q;
}

AdditiveIF counting_mean_if(const PathSpace& ps) {
  const int d = ps.d();
  std::vector<Atom> atoms;
  for (Time u : ps.grid()) {
    Matrix m = Matrix::Zero(d, d);
    for (const auto& [path, w] : ps.paths()) {
      State prev = path.before(u);
      State next = path.at(u);
      if (prev != next) m(prev - 1, next - 1) += w;
    }
    if (!m.isZero(0.0)) atoms.push_back({u, std::move(m)});
  }
  return AdditiveIF(d, std::move(atoms));
}

GeneralIF indicator_mean_if(const PathSpace& ps) {
  return GeneralIF(
      ps.d(),
      [ps](const Interval& a) {
        Matrix q = Matrix::Zero(ps.d(), ps.d());
        for (const auto& [path, w] : ps.paths()) {
          const State s = start_state(path, a);
          const State e = end_state(path, a);
          if (s != e) q(s - 1, e - 1) += w;
        }
        return q;
      },
      ps.grid());
}

HazardMatrixIF::HazardMatrixIF(AdditiveIF lambda) : lambda_(std::move(lambda)) {
  constexpr double kTol = 1e-12;
  const Eigen::Index d = lambda_.dim();
  auto check = [&](const Matrix& m, bool atom, Time t) {
    for (Eigen::Index j = 0; j < d; ++j) {
      double off = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        if (k == j) continue;
        if (m(j, k) < -kTol) {
          std::ostringstream os;
          os << "negative hazard entry at t=" << t;
          throw std::invalid_argument(os.str());
        }
        off += m(j, k);
      }
      if (std::abs(off + m(j, j)) > kTol) {
        std::ostringstream os;
        os << "hazard row " << j + 1 << " does not sum to zero at t=" << t;
        throw std::invalid_argument(os.str());
      }
      if (atom && off > 1.0 + kTol) {
        std::ostringstream os;
        os << "hazard atom at t=" << t << " exits state " << j + 1 << " with mass " << off;
        throw std::invalid_argument(os.str());
      }
    }
  };
  for (const auto& a : lambda_.atoms()) check(a.jump, true, a.t);
  for (const auto& p : lambda_.density()) check(p.intensity, false, p.lo);
}

AdditiveIF HazardMatrixIF::exit_hazard(State j) const {
  AdditiveIF diag = lambda_.entry(j - 1, j - 1);
  std::vector<Atom> atoms;
  for (const auto& a : diag.atoms()) atoms.push_back({a.t, -a.jump});
  std::vector<DensityPiece> density;
  for (const auto& p : diag.density()) density.push_back({p.lo, p.hi, -p.intensity});
  return AdditiveIF(1, std::move(atoms), std::move(density));
}

HazardMatrixIF hazard(const PathSpace& ps) {
  const int d = ps.d();
  const AdditiveIF f = counting_mean_if(ps);
  std::vector<Atom> atoms;
  for (const auto& atom : f.atoms()) {
    const RowVector p_left = occupation_vector(ps, atom.t, Side::kLeft);
    Matrix m = Matrix::Zero(d, d);
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        if (j == k || atom.jump(j, k) == 0.0) continue;
        if (!(p_left(j) > 0.0)) {
          std::ostringstream os;
          os << "transitions out of unoccupied state " << j + 1 << " at t=" << atom.t;
          throw InconsistentPathSpace(os.str());
        }
        m(j, k) = atom.jump(j, k) / p_left(j);
      }
      m(j, j) = -(m.row(j).sum() - m(j, j));
    }
    atoms.push_back({atom.t, std::move(m)});
  }
  return HazardMatrixIF(AdditiveIF(d, std::move(atoms)));
}

RowVector iterated_product(const PathSpace& ps, Time s, Time t, const std::vector<Time>& cuts) {
  if (s > t) throw std::invalid_argument("iterated_product needs s <= t");
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    if (!(cuts[i - 1] < cuts[i])) throw std::invalid_argument("cuts must be strictly increasing");
  }
  for (Time c : cuts) {
    if (c < s || c > t) throw std::invalid_argument("cut outside [s, t]");
  }
  RowVector p = occupation_vector(ps, s);
  Time left = s;
  auto step = [&](Time right) {
    if (right > left) {
      p = p * transition_matrix(ps, Interval::left_open(left, right));
      left = right;
    }
  };
  for (Time c : cuts) step(c);
  step(t);
  return p;
}

StepFunction inverse_left_occupation(const PathSpace& ps, State j) {
  auto inv = [](double p) { return p > 0.0 ? 1.0 / p : 0.0; };
  std::vector<StepFunction::Break> breaks;
  for (Time u : ps.grid()) {
    const double left = inv(occupation(ps, j, u, Side::kLeft));
    breaks.push_back({u, left, left, inv(occupation(ps, j, u, Side::kRight))});
  }
  return StepFunction(inv(occupation(ps, j, 0.0)), std::move(breaks));
}

BoundCheck check_occupation_lower_bound(const PathSpace& ps, State j, Time s, Time t) {
  check_state(ps, j);
  if (s > t) throw std::invalid_argument("occupation lower bound needs s <= t");
  BoundCheck check;
  check.lhs = occupation(ps, j, t);
  check.rhs = occupation(ps, j, s);
  if (s < t) {
    const AdditiveIF exit = hazard(ps).exit_hazard(j);
    std::vector<Atom> neg;
    for (const auto& a : exit.atoms()) neg.push_back({a.t, -a.jump});
    check.rhs *= prodint_additive(AdditiveIF(1, std::move(neg)), Interval::left_open(s, t))(0, 0);
  }
  check.ok = check.lhs >= check.rhs - 1e-12;
  return check;
}

bool ExtinctionReport::ok() const {
  return std::all_of(boundaries.begin(), boundaries.end(),
                     [](const ExtinctionBoundary& b) { return b.ok; });
}

std::string ExtinctionReport::summary() const {
  if (boundaries.empty()) return "no extinction boundary";
  std::ostringstream os;
  os.precision(15);
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    const auto& b = boundaries[i];
    if (i > 0) os << "; ";
    os << "t=" << b.t << " p(t-)=" << b.occupation_before << " exit=" << b.exit_hazard
       << (b.ok ? " ok" : " FAIL");
  }
  return os.str();
}

ExtinctionReport check_extinction_dichotomy(const PathSpace& ps, State j) {
  check_state(ps, j);
  ExtinctionReport report{j, {}};
  const HazardMatrixIF lambda = hazard(ps);
  double prev_right = occupation(ps, j, 0.0);
  for (Time u : ps.grid()) {
    const double left = occupation(ps, j, u, Side::kLeft);
    const double right = occupation(ps, j, u, Side::kRight);
    if (prev_right > 0.0 && (left == 0.0 || right == 0.0)) {
      // left == 0 would need infinite hazard mass, impossible on finitely many paths.
      const double exit = -lambda.lambda().jump_at(u)(j - 1, j - 1);
      const bool ok = left > 0.0 && std::abs(exit - 1.0) <= 1e-12;
      report.boundaries.push_back({u, left, exit, ok});
    }
    prev_right = right;
  }
  return report;
}

}  // namespace msint
