#include "nlsg/sampled.hpp"

#include <algorithm>
#include <cmath>

namespace nlsg {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<cd> y) : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw ValidationError("CubicSpline: need >= 2 matching nodes");
  c2_.assign(n, cd{0.0, 0.0});
  if (n < 3) return;
  // Natural spline: tridiagonal Thomas solve for interior second derivatives.
  const double h = x_[1] - x_[0];
  const std::size_t m = n - 2;
  std::vector<cd> d(m, cd{2.0 * h / 3.0, 0.0}), u(m, cd{h / 6.0, 0.0}), r(m);
  for (std::size_t i = 0; i < m; ++i) r[i] = (y_[i + 2] - 2.0 * y_[i + 1] + y_[i]) / h;
  for (std::size_t i = 1; i < m; ++i) {
    const cd f = (h / 6.0) / d[i - 1];
    d[i] -= f * u[i - 1];
    r[i] -= f * r[i - 1];
  }
  c2_[m] = r[m - 1] / d[m - 1];
  for (std::size_t i = m - 1; i >= 1; --i) {
    c2_[i] = (r[i - 1] - u[i - 1] * c2_[i + 1]) / d[i - 1];
    if (i == 1) break;
  }
}

cd CubicSpline::operator()(double x) const {
  const std::size_t n = x_.size();
  const double h = x_[1] - x_[0];
  double pos = (x - x_[0]) / h;
  std::size_t i = pos <= 0.0 ? 0 : std::min(n - 2, (std::size_t)pos);
  const double a = (x_[i + 1] - x) / h, b = (x - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * c2_[i] + (b * b * b - b) * c2_[i + 1]) * (h * h) / 6.0;
}

cd CubicSpline::derivative(double x) const {
  const std::size_t n = x_.size();
  const double h = x_[1] - x_[0];
  double pos = (x - x_[0]) / h;
  std::size_t i = pos <= 0.0 ? 0 : std::min(n - 2, (std::size_t)pos);
  const double a = (x_[i + 1] - x) / h, b = (x - x_[i]) / h;
  return (y_[i + 1] - y_[i]) / h +
         h / 6.0 * ((3.0 * b * b - 1.0) * c2_[i + 1] - (3.0 * a * a - 1.0) * c2_[i]);
}

SampledFunction::SampledFunction(std::vector<double> grid, std::vector<std::vector<cd>> values,
                                 bool decay_flag)
    : grid_(std::move(grid)), values_(std::move(values)), decay_flag_(decay_flag) {
  if (grid_.size() < 2) throw ValidationError("SampledFunction: grid too short");
  if (values_.empty()) throw ValidationError("SampledFunction: no edges");
  const double h = grid_[1] - grid_[0];
  if (h <= 0.0) throw ValidationError("SampledFunction: grid not increasing");
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    if (std::abs(grid_[i] - grid_[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw ValidationError("SampledFunction: grid not uniform");
  }
  for (const auto& v : values_) {
    if (v.size() != grid_.size()) throw ValidationError("SampledFunction: value/grid length mismatch");
    for (const auto& z : v)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw ValidationError("SampledFunction: non-finite value");
  }
  analytic_.resize(values_.size());
  splines_.resize(values_.size());
}

SampledFunction SampledFunction::from_callables(const std::vector<EdgeFn>& fns, double lo, double hi,
                                                std::size_t npts, bool decay_flag) {
  if (npts < 2) throw ValidationError("SampledFunction: need >= 2 points");
  std::vector<double> grid(npts);
  const double h = (hi - lo) / (double)(npts - 1);
  for (std::size_t i = 0; i < npts; ++i) grid[i] = lo + (double)i * h;
  std::vector<std::vector<cd>> vals(fns.size(), std::vector<cd>(npts));
  for (std::size_t e = 0; e < fns.size(); ++e)
    for (std::size_t i = 0; i < npts; ++i) vals[e][i] = fns[e](grid[i]);
  SampledFunction s(std::move(grid), std::move(vals), decay_flag);
  for (std::size_t e = 0; e < fns.size(); ++e) s.set_analytic(e, fns[e]);
  return s;
}

cd SampledFunction::eval(std::size_t e, double x) const {
  if (analytic_[e]) return analytic_[e](x);
  if (x < lo() || x > hi()) {
    if (decay_flag_) return cd{0.0, 0.0};
    x = std::clamp(x, lo(), hi());
  }
  if (!splines_[e]) splines_[e].emplace(grid_, values_[e]);
  return (*splines_[e])(x);
}

EdgeFn SampledFunction::edge_fn(std::size_t e) const {
  if (analytic_[e]) return analytic_[e];
  return [this, e](double x) { return eval(e, x); };
}

DiagMat SampledFunction::at_index(std::size_t i) const {
  DiagMat d(edges());
  for (std::size_t e = 0; e < edges(); ++e) d[e] = values_[e].at(i);
  return d;
}

cd SampledFunction::derivative_at_lo(std::size_t e) const {
  if (analytic_[e]) {
    const double h = dx() * 1e-3;
    return (-3.0 * analytic_[e](lo()) + 4.0 * analytic_[e](lo() + h) - analytic_[e](lo() + 2 * h)) /
           (2.0 * h);
  }
  const double h = dx();
  const auto& v = values_[e];
  return (-11.0 * v[0] + 18.0 * v[1] - 9.0 * v[2] + 2.0 * v[3]) / (6.0 * h);
}

double SampledFunction::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_)
    for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

EdgeFn Profile::to_fn() const {
  if (kind == "zero") return [](double) { return cd{0.0, 0.0}; };
  if (kind == "box") {
    const cd c = amplitude;
    const double l = width;
    return [c, l](double x) { return (x >= 0.0 && x <= l) ? c : cd{0.0, 0.0}; };
  }
  if (kind == "gaussian") {
    const cd a = amplitude;
    const double w = width, x0 = center, v = velocity;
    return [a, w, x0, v](double x) {
      const double u = (x - x0) / w;
      return a * std::exp(-u * u) * std::exp(I1 * (v * x));
    };
  }
  if (kind == "sech") {
    const cd a = amplitude;
    const double w = width, x0 = center, v = velocity;
    return [a, w, x0, v](double x) { return a / std::cosh((x - x0) / w) * std::exp(I1 * (v * x)); };
  }
  throw ValidationError("Profile: unknown kind '" + kind + "'");
}

SampledFunction sample_profiles(const std::vector<Profile>& per_edge, double lo, double hi,
                                std::size_t npts, bool decay_flag) {
  std::vector<EdgeFn> fns;
  fns.reserve(per_edge.size());
  for (const auto& p : per_edge) fns.push_back(p.to_fn());
  return SampledFunction::from_callables(fns, lo, hi, npts, decay_flag);
}

}  // namespace nlsg
