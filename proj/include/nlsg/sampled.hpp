#ifndef NLSG_SAMPLED_HPP
#define NLSG_SAMPLED_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nlsg/types.hpp"

namespace nlsg {

using EdgeFn = std::function<cd(double)>;

// Not-a-knot cubic spline through complex samples on a uniform grid.
// Used to evaluate file-loaded data between nodes; analytic profiles bypass it.
class CubicSpline {
public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<cd> y);
  cd operator()(double x) const;
  cd derivative(double x) const;

private:
  std::vector<double> x_;
  std::vector<cd> y_, c2_;  // second derivatives at nodes
};

// Per-edge complex function sampled on one uniform grid (x- or t-grid).
// decay_flag: treated as negligible beyond the grid end. An edge may carry an
// analytic evaluator (builtin profiles); otherwise evaluation goes through the
// spline.
class SampledFunction {
public:
  SampledFunction() = default;
  SampledFunction(std::vector<double> grid, std::vector<std::vector<cd>> values, bool decay_flag);

  static SampledFunction from_callables(const std::vector<EdgeFn>& fns, double lo, double hi,
                                        std::size_t npts, bool decay_flag);

  std::size_t edges() const { return values_.size(); }
  std::size_t points() const { return grid_.size(); }
  const std::vector<double>& grid() const { return grid_; }
  double lo() const { return grid_.front(); }
  double hi() const { return grid_.back(); }
  double dx() const { return grid_.size() > 1 ? grid_[1] - grid_[0] : 0.0; }
  bool decays() const { return decay_flag_; }

  const std::vector<cd>& edge_values(std::size_t e) const { return values_.at(e); }
  cd value(std::size_t e, std::size_t i) const { return values_.at(e).at(i); }

  // Evaluate edge e anywhere on [lo, hi]; outside, 0 if decaying else clamped.
  cd eval(std::size_t e, double x) const;
  EdgeFn edge_fn(std::size_t e) const;

  // Values at a fixed grid index across edges, as a DiagMat.
  DiagMat at_index(std::size_t i) const;

  // One-sided 4-point derivative estimate at the first grid node.
  cd derivative_at_lo(std::size_t e) const;

  double max_abs() const;
  double tail_abs(std::size_t e) const { return std::abs(values_.at(e).back()); }

  void set_analytic(std::size_t e, EdgeFn fn) { analytic_.at(e) = std::move(fn); }
  bool has_analytic(std::size_t e) const { return (bool)analytic_.at(e); }

private:
  std::vector<double> grid_;
  std::vector<std::vector<cd>> values_;  // [edge][node]
  std::vector<EdgeFn> analytic_;
  mutable std::vector<std::optional<CubicSpline>> splines_;
  bool decay_flag_ = true;
};

// Builtin per-edge profiles: zero, box(c, l), gaussian(A, w, x0), sech(A, v, x0).
struct Profile {
  std::string kind = "zero";
  cd amplitude{0.0, 0.0};
  double width = 1.0;   // box length l / gaussian w / sech 1/scale
  double center = 0.0;  // x0; box starts at 0 by construction
  double velocity = 0.0;  // sech/gaussian phase e^{i v x}

  EdgeFn to_fn() const;
};

SampledFunction sample_profiles(const std::vector<Profile>& per_edge, double lo, double hi,
                                std::size_t npts, bool decay_flag = true);

}  // namespace nlsg

#endif
