#include "nlsg/problem.hpp"

#include <cmath>

namespace nlsg {

std::string BoundarySpec::name() const {
  switch (kind) {
    case Kind::Prescribed: return "prescribed";
    case Kind::Transparent: return "transparent";
    case Kind::DeltaImpurity: return "delta-impurity";
    case Kind::JumpDefect: return "jump-defect";
    case Kind::GeneralRobin: return "general-robin";
    case Kind::GeneralizedDelta: return "generalized-delta";
  }
  return "?";
}

void BoundarySpec::validate(std::size_t n, double tol) const {
  switch (kind) {
    case Kind::Transparent:
    case Kind::DeltaImpurity:
    case Kind::JumpDefect:
      if (n != 2) throw ValidationError(name() + " requires N = 2");
      break;
    case Kind::GeneralRobin: {
      if ((std::size_t)U.rows() != n || (std::size_t)U.cols() != n)
        throw ValidationError("general-robin: U must be N x N");
      const MatX r = U * U.adjoint() - MatX::Identity(U.rows(), U.cols());
      if (r.cwiseAbs().maxCoeff() > tol) throw ValidationError("general-robin: U not unitary");
      break;
    }
    case Kind::GeneralizedDelta: {
      const MatX u = generalized_delta_U(n, alpha);
      if (!is_circulant(u, tol)) throw ValidationError("generalized-delta: U not circulant");
      break;
    }
    case Kind::Prescribed: break;
  }
}

MatX generalized_delta_U(std::size_t n, double alpha) {
  const cd s = 2.0 / (cd{(double)n, alpha});
  return s * ones_J(n) - MatX::Identity((Eigen::Index)n, (Eigen::Index)n);
}

void GraphProblem::validate(double corner_tol) const {
  if (N < 1) throw ValidationError("GraphProblem: N >= 1 required");
  if (Q0.edges() != N) throw ValidationError("GraphProblem: Q0 edge count != N");
  if (!T_infinite && T <= 0.0) throw ValidationError("GraphProblem: T must be positive");
  boundary.validate(N);
  if (H0 && H0->edges() != N) throw ValidationError("GraphProblem: H0 edge count != N");
  if (H1 && H1->edges() != N) throw ValidationError("GraphProblem: H1 edge count != N");
  if (H0) {
    const double scale = std::max(1.0, Q0.max_abs());
    for (std::size_t e = 0; e < N; ++e) {
      if (std::abs(Q0.value(e, 0) - H0->value(e, 0)) > corner_tol * scale)
        throw ValidationError("GraphProblem: corner condition Q0(0)=H0(0) violated on edge " +
                              std::to_string(e + 1));
    }
  }
  if (H0 && H1) {
    const double scale = std::max(1.0, Q0.max_abs());
    for (std::size_t e = 0; e < N; ++e) {
      if (std::abs(Q0.derivative_at_lo(e) - H1->value(e, 0)) > std::sqrt(corner_tol) * scale)
        throw ValidationError("GraphProblem: corner condition Q0_x(0)=H1(0) violated on edge " +
                              std::to_string(e + 1));
    }
  }
}

std::vector<double> geometric_points(std::size_t n, double lo, double hi) {
  if (n < 2 || lo <= 0.0 || hi <= lo) throw ValidationError("geometric_points: bad range");
  std::vector<double> p(n);
  const double q = std::pow(hi / lo, 1.0 / (double)(n - 1));
  double v = lo;
  for (std::size_t i = 0; i < n; ++i, v *= q) p[i] = v;
  p.back() = hi;
  return p;
}

std::vector<double> uniform_points(std::size_t n, double lo, double hi) {
  if (n < 2) throw ValidationError("uniform_points: need >= 2");
  std::vector<double> p(n);
  const double h = (hi - lo) / (double)(n - 1);
  for (std::size_t i = 0; i < n; ++i) p[i] = lo + (double)i * h;
  return p;
}

Kgrid kgrid_real_axis(std::size_t n, double kmin, double kmax) {
  Kgrid g;
  g.contour = Contour::RealAxis;
  const auto r = geometric_points(n, kmin, kmax);
  g.points.reserve(2 * n);
  for (auto it = r.rbegin(); it != r.rend(); ++it) g.points.emplace_back(-*it, 0.0);
  for (double v : r) g.points.emplace_back(v, 0.0);
  return g;
}

Kgrid kgrid_ray(std::size_t n, double angle, double kmin, double kmax, Contour label) {
  Kgrid g;
  g.contour = label;
  const cd dir{std::cos(angle), std::sin(angle)};
  for (double v : geometric_points(n, kmin, kmax)) g.points.push_back(v * dir);
  return g;
}

Kgrid kgrid_boundary_D1(std::size_t n_per_ray, double kmin, double kmax) {
  Kgrid g;
  g.contour = Contour::BoundaryD1;
  const auto r = geometric_points(n_per_ray, kmin, kmax);
  g.points.reserve(2 * n_per_ray);
  for (auto it = r.rbegin(); it != r.rend(); ++it) g.points.emplace_back(0.0, *it);
  for (double v : r) g.points.emplace_back(v, 0.0);
  return g;
}

}  // namespace nlsg
