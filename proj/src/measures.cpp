#include "edfq/measures.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "edfq/errors.hpp"
#include "edfq/numerics.hpp"

namespace edfq {

FiniteMeasure FiniteMeasure::point_masses(std::vector<std::pair<double, double>> atoms) {
  std::sort(atoms.begin(), atoms.end());
  FiniteMeasure m;
  m.repr_ = MeasureRepr::PointMasses;
  for (const auto& [loc, w] : atoms) {
    if (!(loc >= 0.0)) throw std::invalid_argument("point mass location must be >= 0");
    if (!(w > 0.0)) throw std::invalid_argument("point mass weight must be > 0");
    if (!m.xs_.empty() && m.xs_.back() == loc) {
      m.ws_.back() += w;
    } else {
      m.xs_.push_back(loc);
      m.ws_.push_back(w);
    }
  }
  m.suffix_.assign(m.xs_.size() + 1, 0.0);
  for (std::size_t i = m.xs_.size(); i-- > 0;) m.suffix_[i] = m.suffix_[i + 1] + m.ws_[i];
  m.mass_ = m.suffix_.empty() ? 0.0 : m.suffix_[0];
  return m;
}

FiniteMeasure FiniteMeasure::tail_grid(std::vector<double> points, std::vector<double> tails) {
  if (points.size() < 2 || points.size() != tails.size())
    throw std::invalid_argument("tail_grid needs >= 2 matching points and tails");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0 && !(points[i] > points[i - 1]))
      throw std::invalid_argument("tail_grid points must be strictly increasing");
    if (!(tails[i] >= 0.0) || (i > 0 && tails[i] > tails[i - 1] + 1e-12))
      throw std::invalid_argument("tail_grid tails must be nonincreasing and >= 0");
  }
  if (!(points.front() >= 0.0)) throw std::invalid_argument("tail_grid points must be >= 0");
  FiniteMeasure m;
  m.repr_ = MeasureRepr::TailGrid;
  m.xs_ = std::move(points);
  m.tails_ = std::move(tails);
  m.mass_ = m.tails_.front();
  return m;
}

FiniteMeasure FiniteMeasure::analytic(std::function<double(double)> tail, double total_mass,
                                      std::function<double(double)> quantile,
                                      double support_hint) {
  if (!tail) throw std::invalid_argument("analytic measure needs a tail evaluator");
  if (!(total_mass >= 0.0)) throw std::invalid_argument("total mass must be >= 0");
  FiniteMeasure m;
  m.repr_ = MeasureRepr::Analytic;
  m.tail_fn_ = std::move(tail);
  m.quantile_fn_ = std::move(quantile);
  m.mass_ = total_mass;
  m.support_hint_ = support_hint;
  return m;
}

FiniteMeasure FiniteMeasure::scaled_law(const DistributionSpec& law, double mass) {
  if (!(mass >= 0.0)) throw std::invalid_argument("total mass must be >= 0");
  const double ymax = law.y_max();
  return analytic([law, mass](double a) { return mass * law.tail(a); }, mass,
                  [law](double u) { return law.quantile(u); },
                  std::isfinite(ymax) ? ymax : -1.0);
}

FiniteMeasure FiniteMeasure::zero() { return point_masses({}); }

double FiniteMeasure::tail(double a) const {
  switch (repr_) {
    case MeasureRepr::PointMasses: {
      auto it = std::upper_bound(xs_.begin(), xs_.end(), a);
      return suffix_[static_cast<std::size_t>(it - xs_.begin())];
    }
    case MeasureRepr::TailGrid: {
      if (a <= xs_.front()) return tails_.front();
      if (a >= xs_.back()) return tails_.back();
      auto it = std::upper_bound(xs_.begin(), xs_.end(), a);
      const std::size_t j = static_cast<std::size_t>(it - xs_.begin());
      const double x1 = xs_[j - 1], x2 = xs_[j];
      return tails_[j - 1] + (tails_[j] - tails_[j - 1]) * (a - x1) / (x2 - x1);
    }
    case MeasureRepr::Analytic:
      return tail_fn_(a);
  }
  return 0.0;
}

double FiniteMeasure::tail_closed(double a) const {
  if (repr_ == MeasureRepr::PointMasses) {
    auto it = std::lower_bound(xs_.begin(), xs_.end(), a);
    return suffix_[static_cast<std::size_t>(it - xs_.begin())];
  }
  return tail(a);
}

double FiniteMeasure::mass_interval_cc(double a, double b) const {
  if (b < a) return 0.0;
  return tail_closed(a) - tail(b);
}

double FiniteMeasure::quantile(double u) const {
  if (!(u >= 0.0) || !(u < 1.0)) throw std::invalid_argument("quantile needs u in [0,1)");
  if (mass_ <= 0.0) throw std::invalid_argument("quantile of a zero measure");
  switch (repr_) {
    case MeasureRepr::PointMasses: {
      const double target = u * mass_;
      double cum = 0.0;
      for (std::size_t i = 0; i < xs_.size(); ++i) {
        cum += ws_[i];
        if (cum >= target) return xs_[i];
      }
      return xs_.back();
    }
    case MeasureRepr::TailGrid: {
      const double target_tail = mass_ * (1.0 - u);  // solve tail(x) = target
      if (target_tail >= tails_.front()) return xs_.front();
      for (std::size_t j = 1; j < xs_.size(); ++j) {
        if (tails_[j] <= target_tail) {
          const double t1 = tails_[j - 1], t2 = tails_[j];
          if (t1 == t2) return xs_[j - 1];
          return xs_[j - 1] + (xs_[j] - xs_[j - 1]) * (t1 - target_tail) / (t1 - t2);
        }
      }
      return xs_.back();
    }
    case MeasureRepr::Analytic: {
      if (quantile_fn_) return quantile_fn_(u);
      const double target_tail = mass_ * (1.0 - u);
      double hi = 1.0;
      while (tail_fn_(hi) > target_tail) hi *= 2.0;
      return num::bisect([&](double x) { return tail_fn_(x) - target_tail; }, 0.0, hi, 1e-12);
    }
  }
  return 0.0;
}

FiniteMeasure FiniteMeasure::scaled(double factor) const {
  if (!(factor >= 0.0)) throw std::invalid_argument("scale factor must be >= 0");
  FiniteMeasure m = *this;
  m.mass_ *= factor;
  for (auto& w : m.ws_) w *= factor;
  for (auto& s : m.suffix_) s *= factor;
  for (auto& t : m.tails_) t *= factor;
  if (repr_ == MeasureRepr::Analytic) {
    auto base = tail_fn_;
    m.tail_fn_ = [base, factor](double a) { return factor * base(a); };
  }
  return m;
}

std::vector<double> FiniteMeasure::breakpoints() const {
  if (repr_ == MeasureRepr::Analytic) return {};
  return xs_;
}

double FiniteMeasure::support_upper(double eps) const {
  if (mass_ <= 0.0) return 0.0;
  switch (repr_) {
    case MeasureRepr::PointMasses:
      return xs_.back();
    case MeasureRepr::TailGrid:
      return xs_.back();
    case MeasureRepr::Analytic: {
      if (support_hint_ >= 0.0) return support_hint_;
      double hi = 1.0;
      const double thresh = eps * mass_;
      int guard = 0;
      while (tail_fn_(hi) > thresh && guard++ < 60) hi *= 2.0;
      return hi;
    }
  }
  return 0.0;
}

namespace {

std::vector<double> candidate_points(const FiniteMeasure& m1, const FiniteMeasure& m2, int refine) {
  std::set<double> pts{0.0};
  for (double x : m1.breakpoints()) pts.insert(x);
  for (double x : m2.breakpoints()) pts.insert(x);
  const double upper = std::max(m1.support_upper(), m2.support_upper());
  pts.insert(upper);
  const bool need_grid = m1.repr() != MeasureRepr::PointMasses || m2.repr() != MeasureRepr::PointMasses;
  if (need_grid && refine > 0 && upper > 0.0) {
    for (int i = 1; i < refine; ++i) pts.insert(upper * i / refine);
  }
  return {pts.begin(), pts.end()};
}

}  // namespace

double kolmogorov_distance(const FiniteMeasure& m1, const FiniteMeasure& m2, int refine) {
  double d = std::abs(m1.total_mass() - m2.total_mass());  // a -> 0- limit
  for (double a : candidate_points(m1, m2, refine)) {
    d = std::max(d, std::abs(m1.tail(a) - m2.tail(a)));
    d = std::max(d, std::abs(m1.tail_closed(a) - m2.tail_closed(a)));
  }
  return d;
}

double prohorov_upper_bound(const FiniteMeasure& m1, const FiniteMeasure& m2, double grid_step) {
  if (!(grid_step > 0.0)) throw std::invalid_argument("grid_step must be > 0");
  const auto pts = candidate_points(m1, m2, 1024);
  const double mass1 = m1.total_mass();
  const double mass2 = m2.total_mass();

  // m([a - eps, inf)^eps) on [0, inf): set is (a-eps, inf) intersected with [0, inf)
  auto open_tail = [](const FiniteMeasure& m, double a) {
    return a < 0.0 ? m.total_mass() : m.tail(a);
  };

  auto passes = [&](double eps) {
    if (std::abs(mass1 - mass2) > eps) return false;
    for (double a : pts) {
      // A = [a, inf): m1(A) <= m2(A^eps) + eps, and swapped
      if (m1.tail_closed(a) > open_tail(m2, a - eps) + eps) return false;
      if (m2.tail_closed(a) > open_tail(m1, a - eps) + eps) return false;
      // A = [0, a]: A^eps = [0, a + eps)
      if (mass1 - m1.tail(a) > (mass2 - m2.tail_closed(a + eps)) + eps) return false;
      if (mass2 - m2.tail(a) > (mass1 - m1.tail_closed(a + eps)) + eps) return false;
    }
    return true;
  };

  const double eps_max =
      std::max({1.0, mass1, mass2, std::max(m1.support_upper(), m2.support_upper())}) + grid_step;
  for (double eps = grid_step; eps <= eps_max; eps += grid_step) {
    if (passes(eps)) return eps;
  }
  return eps_max;
}

}  // namespace edfq
