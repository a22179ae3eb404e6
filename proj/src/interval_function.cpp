#include "msint/interval_function.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace msint {

namespace {

Time overlap_length(Time lo, Time hi, const Interval& a) {
  return std::max(0.0, std::min(hi, a.hi()) - std::max(lo, a.lo()));
}

void check_shape(const Matrix& m, Eigen::Index dim, const char* what) {
  if (m.rows() != dim || m.cols() != dim) {
    std::ostringstream os;
    os << what << " has shape " << m.rows() << "x" << m.cols() << ", expected " << dim << "x"
       << dim;
    throw std::invalid_argument(os.str());
  }
}

std::vector<Time> merged_support(const std::vector<Time>& a, const std::vector<Time>& b) {
  std::vector<Time> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Ordered factors whose product is the product integral over a. Each density
/// segment between atoms is cut into `cuts` equal parts.
std::vector<Matrix> elementary_factors(const AdditiveIF& mu, const Interval& a, int cuts) {
  struct Item {
    Time key;
    int kind;  // 0 = atom, 1 = density segment; atoms sort first at equal keys
    Time end;
    const Matrix* m;
  };
  std::vector<Item> items;
  std::vector<Time> atom_times;
  for (const auto& atom : mu.atoms()) {
    if (a.contains(atom.t)) {
      items.push_back({atom.t, 0, atom.t, &atom.jump});
      atom_times.push_back(atom.t);
    }
  }
  for (const auto& piece : mu.density()) {
    const Time s = std::max(piece.lo, a.lo());
    const Time e = std::min(piece.hi, a.hi());
    if (!(s < e)) continue;
    Time left = s;
    for (Time t : atom_times) {
      if (t > left && t < e) {
        items.push_back({left, 1, t, &piece.intensity});
        left = t;
      }
    }
    items.push_back({left, 1, e, &piece.intensity});
  }
  std::sort(items.begin(), items.end(), [](const Item& x, const Item& y) {
    return x.key != y.key ? x.key < y.key : x.kind < y.kind;
  });

  const Matrix eye = identity(mu.dim());
  std::vector<Matrix> factors;
  for (const auto& item : items) {
    if (item.kind == 0) {
      factors.push_back(eye + *item.m);
      continue;
    }
    const Time step = (item.end - item.key) / cuts;
    const Matrix f = expm(*item.m * step);
    for (int c = 0; c < cuts; ++c) factors.push_back(f);
  }
  return factors;
}

}  // namespace

// ---------------------------------------------------------------------------

AdditiveIF::AdditiveIF(Eigen::Index dim, std::vector<Atom> atoms, std::vector<DensityPiece> density)
    : dim_(dim), atoms_(std::move(atoms)), density_(std::move(density)) {
  if (dim_ < 1) throw std::invalid_argument("dimension must be positive");
  std::sort(atoms_.begin(), atoms_.end(),
            [](const Atom& x, const Atom& y) { return x.t < y.t; });
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    check_shape(atoms_[i].jump, dim_, "atom");
    if (i > 0 && atoms_[i - 1].t == atoms_[i].t) {
      throw std::invalid_argument("duplicate atom time");
    }
  }
  std::sort(density_.begin(), density_.end(),
            [](const DensityPiece& x, const DensityPiece& y) { return x.lo < y.lo; });
  for (std::size_t i = 0; i < density_.size(); ++i) {
    check_shape(density_[i].intensity, dim_, "density intensity");
    if (!(density_[i].lo < density_[i].hi)) {
      throw std::invalid_argument("density piece must have lo < hi");
    }
    if (i > 0 && density_[i - 1].hi > density_[i].lo) {
      throw std::invalid_argument("density pieces overlap");
    }
  }
}

AdditiveIF AdditiveIF::scalar(std::span<const std::pair<Time, double>> atoms) {
  std::vector<Atom> out;
  for (const auto& [t, m] : atoms) out.push_back({t, Matrix::Constant(1, 1, m)});
  return AdditiveIF(1, std::move(out));
}

Matrix AdditiveIF::operator()(const Interval& a) const {
  Matrix sum = Matrix::Zero(dim_, dim_);
  for (const auto& atom : atoms_) {
    if (a.contains(atom.t)) sum += atom.jump;
  }
  for (const auto& piece : density_) {
    const Time len = overlap_length(piece.lo, piece.hi, a);
    if (len > 0.0) sum += piece.intensity * len;
  }
  return sum;
}

double AdditiveIF::variation(const Interval& a) const {
  double v = 0.0;
  for (const auto& atom : atoms_) {
    if (a.contains(atom.t)) v += op_norm(atom.jump);
  }
  for (const auto& piece : density_) {
    v += op_norm(piece.intensity) * overlap_length(piece.lo, piece.hi, a);
  }
  return v;
}

Matrix AdditiveIF::jump_at(Time t) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), t,
                             [](const Atom& x, Time v) { return x.t < v; });
  if (it != atoms_.end() && it->t == t) return it->jump;
  return Matrix::Zero(dim_, dim_);
}

std::vector<Time> AdditiveIF::support() const {
  std::vector<Time> out;
  for (const auto& atom : atoms_) out.push_back(atom.t);
  for (const auto& piece : density_) {
    out.push_back(piece.lo);
    out.push_back(piece.hi);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

AdditiveIF AdditiveIF::entry(Eigen::Index j, Eigen::Index k) const {
  std::vector<Atom> atoms;
  for (const auto& atom : atoms_) atoms.push_back({atom.t, Matrix::Constant(1, 1, atom.jump(j, k))});
  std::vector<DensityPiece> density;
  for (const auto& piece : density_) {
    density.push_back({piece.lo, piece.hi, Matrix::Constant(1, 1, piece.intensity(j, k))});
  }
  return AdditiveIF(1, std::move(atoms), std::move(density));
}

// ---------------------------------------------------------------------------

GeneralIF::GeneralIF(Eigen::Index dim, IntervalEvaluator eval, std::vector<Time> support,
                     std::optional<double> variation_hint)
    : dim_(dim),
      eval_(std::move(eval)),
      support_(std::move(support)),
      variation_hint_(variation_hint) {
  std::sort(support_.begin(), support_.end());
  support_.erase(std::unique(support_.begin(), support_.end()), support_.end());
}

GeneralIF GeneralIF::from(const AdditiveIF& mu) {
  return GeneralIF(mu.dim(), [mu](const Interval& a) { return mu(a); }, mu.support());
}

GeneralIF GeneralIF::shifted(double shift) const {
  const Eigen::Index d = dim_;
  auto eval = eval_;
  return GeneralIF(
      d, [eval, shift, d](const Interval& a) -> Matrix { return eval(a) + shift * identity(d); },
      support_);
}

GeneralIF GeneralIF::entry(Eigen::Index j, Eigen::Index k) const {
  auto eval = eval_;
  return GeneralIF(
      1, [eval, j, k](const Interval& a) -> Matrix { return Matrix::Constant(1, 1, eval(a)(j, k)); },
      support_);
}

GeneralIF identity_plus(const AdditiveIF& mu) {
  return GeneralIF(
      mu.dim(), [mu](const Interval& a) -> Matrix { return identity(mu.dim()) + mu(a); },
      mu.support());
}

GeneralIF product_integral_if(const AdditiveIF& mu) {
  return GeneralIF(
      mu.dim(), [mu](const Interval& a) { return prodint_additive(mu, a); }, mu.support());
}

// ---------------------------------------------------------------------------

Partition schedule_partition(std::span<const Time> support, const Interval& a, int depth,
                             ScheduleStart start) {
  Partition p = start == ScheduleStart::kTrivial ? Partition::trivial(a)
                                                 : young_partition(times_within(support, a), a);
  for (int k = 0; k < depth; ++k) p = halve_cells(p);
  return p;
}

const Matrix& TransformResult::value_or_throw() const {
  if (!converged) {
    std::ostringstream os;
    os << "transform did not converge by depth " << depth << " (last change " << change << ")";
    throw ConvergenceError(os.str());
  }
  return value;
}

namespace {

template <class Combine>
TransformResult refinement_limit(const GeneralIF& f, const Interval& a,
                                 const TransformOptions& opts, Combine combine) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  Partition p = young_partition(times_within(f.support(), a), a);
  TransformResult result;
  result.value = combine(f, p);
  result.change = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= opts.max_depth; ++k) {
    p = halve_cells(p);
    Matrix next = combine(f, p);
    result.change = op_norm(next - result.value);
    result.value = std::move(next);
    result.depth = k;
    if (result.change < opts.tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace

TransformResult additive_transform(const GeneralIF& f, const Interval& a,
                                   const TransformOptions& opts) {
  return refinement_limit(f, a, opts, [](const GeneralIF& g, const Partition& p) {
    Matrix sum = Matrix::Zero(g.dim(), g.dim());
    for (const auto& cell : p) sum += g(cell);
    return sum;
  });
}

TransformResult multiplicative_transform(const GeneralIF& f, const Interval& a,
                                         const TransformOptions& opts) {
  return refinement_limit(f, a, opts, [](const GeneralIF& g, const Partition& p) {
    Matrix prod = identity(g.dim());
    for (const auto& cell : p) prod = prod * g(cell);
    return prod;
  });
}

double variation_norm(const AdditiveIF& mu, const Interval& a) { return mu.variation(a); }

double variation_norm(const GeneralIF& f, const Interval& a, int depth) {
  if (depth < 0) throw std::invalid_argument("depth must be nonnegative");
  Partition p = young_partition(times_within(f.support(), a), a);
  double best = 0.0;
  for (int k = 0;; ++k) {
    double sum = 0.0;
    for (const auto& cell : p) sum += op_norm(f(cell));
    best = std::max(best, sum);
    if (k == depth) break;
    p = halve_cells(p);
  }
  return best;
}

double strict_transform_defect(const GeneralIF& f, const GeneralIF& target, const Partition& p) {
  double sum = 0.0;
  for (const auto& cell : p) sum += op_norm(f(cell) - target(cell));
  return sum;
}

double strict_transform_defect(const GeneralIF& f, const AdditiveIF& target, const Partition& p) {
  double sum = 0.0;
  for (const auto& cell : p) sum += op_norm(f(cell) - target(cell));
  return sum;
}

std::vector<double> defect_sweep(const GeneralIF& f, const GeneralIF& target, const Interval& a,
                                 int max_depth, ScheduleStart start) {
  const std::vector<Time> support = merged_support(f.support(), target.support());
  Partition p = schedule_partition(support, a, 0, start);
  std::vector<double> out;
  for (int k = 0; k <= max_depth; ++k) {
    if (k > 0) p = halve_cells(p);
    out.push_back(strict_transform_defect(f, target, p));
  }
  return out;
}

// ---------------------------------------------------------------------------

Matrix prodint_additive(const AdditiveIF& mu, const Interval& a) {
  Matrix prod = identity(mu.dim());
  for (const auto& f : elementary_factors(mu, a, 1)) prod = prod * f;
  return prod;
}

StepFunction::StepFunction(double before, std::vector<Break> breaks)
    : before_(before), breaks_(std::move(breaks)) {
  double expect_left = before_;
  for (std::size_t i = 0; i < breaks_.size(); ++i) {
    if (i > 0 && !(breaks_[i - 1].t < breaks_[i].t)) {
      throw std::invalid_argument("step function breakpoints must be strictly increasing");
    }
    if (breaks_[i].left != expect_left) {
      std::ostringstream os;
      os << "step function changes value before breakpoint " << breaks_[i].t
         << " at an undeclared point";
      throw std::invalid_argument(os.str());
    }
    expect_left = breaks_[i].right;
  }
}

double StepFunction::gap_value(Time t) const {
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t,
                             [](Time v, const Break& b) { return v < b.t; });
  return it == breaks_.begin() ? before_ : std::prev(it)->right;
}

namespace {
template <class It>
It find_break(It first, It last, Time t) {
  auto it = std::lower_bound(first, last, t, [](const auto& b, Time v) { return b.t < v; });
  return (it != last && it->t == t) ? it : last;
}
}  // namespace

double StepFunction::operator()(Time t) const {
  auto it = find_break(breaks_.begin(), breaks_.end(), t);
  return it != breaks_.end() ? it->value : gap_value(t);
}

double StepFunction::left_limit(Time t) const {
  auto it = find_break(breaks_.begin(), breaks_.end(), t);
  return it != breaks_.end() ? it->left : gap_value(t);
}

double StepFunction::right_limit(Time t) const {
  auto it = find_break(breaks_.begin(), breaks_.end(), t);
  return it != breaks_.end() ? it->right : gap_value(t);
}

double StepFunction::sup_abs(const Interval& a) const {
  if (a.is_singleton()) return std::abs((*this)(a.lo()));
  double best = 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= breaks_.size(); ++i) {
    const Time glo = i == 0 ? -inf : breaks_[i - 1].t;
    const Time ghi = i == breaks_.size() ? inf : breaks_[i].t;
    if (std::max(glo, a.lo()) < std::min(ghi, a.hi())) {
      best = std::max(best, std::abs(i == 0 ? before_ : breaks_[i - 1].right));
    }
  }
  for (const auto& b : breaks_) {
    if (a.contains(b.t)) best = std::max(best, std::abs(b.value));
  }
  return best;
}

Matrix kolmogorov_integral(const StepFunction& f, const AdditiveIF& mu, const Interval& a) {
  Matrix sum = Matrix::Zero(mu.dim(), mu.dim());
  for (const auto& atom : mu.atoms()) {
    if (a.contains(atom.t)) sum += f(atom.t) * atom.jump;
  }
  for (const auto& piece : mu.density()) {
    const Time s = std::max(piece.lo, a.lo());
    const Time e = std::min(piece.hi, a.hi());
    if (!(s < e)) continue;
    Time left = s;
    double weighted = 0.0;
    for (const auto& b : f.breaks()) {
      if (b.t > left && b.t < e) {
        weighted += f.right_limit(left) * (b.t - left);
        left = b.t;
      }
    }
    weighted += f.right_limit(left) * (e - left);
    sum += weighted * piece.intensity;
  }
  return sum;
}

BoundCheck check_duality_bound(const AdditiveIF& mu, const Interval& a, int density_cuts) {
  if (density_cuts < 1) throw std::invalid_argument("density_cuts must be positive");
  const std::vector<Matrix> factors = elementary_factors(mu, a, density_cuts);
  const Matrix eye = identity(mu.dim());

  // best[i]: largest sum over groupings of the first i factors into
  // consecutive blocks, each block scored by ||product - identity||.
  std::vector<double> best(factors.size() + 1, 0.0);
  for (std::size_t i = 1; i <= factors.size(); ++i) {
    double top = -1.0;
    Matrix block = eye;
    for (std::size_t j = i; j-- > 0;) {
      block = factors[j] * block;
      top = std::max(top, best[j] + op_norm(block - eye));
    }
    best[i] = top;
  }

  BoundCheck check;
  check.lhs = best.back();
  const double v = mu.variation(a);
  check.rhs = std::exp(v) * v;
  check.ok = check.lhs <= check.rhs + 1e-12;
  return check;
}

}  // namespace msint
