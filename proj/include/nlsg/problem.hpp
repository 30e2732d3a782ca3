#ifndef NLSG_PROBLEM_HPP
#define NLSG_PROBLEM_HPP

#include <optional>
#include <string>
#include <vector>

#include "nlsg/blockmat.hpp"
#include "nlsg/sampled.hpp"
#include "nlsg/types.hpp"

namespace nlsg {

// Vertex boundary condition catalog.
struct BoundarySpec {
  enum class Kind { Prescribed, Transparent, DeltaImpurity, JumpDefect, GeneralRobin, GeneralizedDelta };

  Kind kind = Kind::Prescribed;
  double eta = 0.0;    // DeltaImpurity
  double alpha = 0.0;  // JumpDefect / GeneralizedDelta
  double beta = 0.0;   // JumpDefect
  MatX U;              // GeneralRobin

  static BoundarySpec prescribed() { BoundarySpec b; b.kind = Kind::Prescribed; return b; }
  static BoundarySpec transparent() { BoundarySpec b; b.kind = Kind::Transparent; return b; }
  static BoundarySpec delta_impurity(double eta) {
    BoundarySpec b; b.kind = Kind::DeltaImpurity;
    b.eta = eta;
    return b;
  }
  static BoundarySpec jump_defect(double alpha, double beta) {
    BoundarySpec b; b.kind = Kind::JumpDefect;
    b.alpha = alpha;
    b.beta = beta;
    return b;
  }
  static BoundarySpec general_robin(MatX u) {
    BoundarySpec b; b.kind = Kind::GeneralRobin;
    b.U = std::move(u);
    return b;
  }
  static BoundarySpec generalized_delta(double alpha) {
    BoundarySpec b; b.kind = Kind::GeneralizedDelta;
    b.alpha = alpha;
    return b;
  }

  std::string name() const;
  // Checks N-compatibility, U unitarity (tol), circulant requirement.
  void validate(std::size_t n, double tol = 1e-10) const;
};

// U = (2/(N + i alpha)) J - I, the generalized delta vertex matrix.
MatX generalized_delta_U(std::size_t n, double alpha);

// Full problem instance: N edges, coupling g, horizon T (or decaying-data
// "infinite" mode), initial data and boundary data/condition.
struct GraphProblem {
  std::size_t N = 1;
  double g = 0.0;
  double T = 1.0;
  bool T_infinite = false;
  SampledFunction Q0;
  BoundarySpec boundary;
  std::optional<SampledFunction> H0, H1;

  // Corner compatibility Q0(0)=H0(0), Q0_x(0)=H1(0) when prescribed.
  void validate(double corner_tol = 1e-6) const;
};

// Complex sample points grouped by the contour they live on.
enum class Contour { RealAxis, RealNeg, ImagPos, ImagNeg, BoundaryD1, D1Interior, D2Ray, D4Ray };

struct Kgrid {
  std::vector<cd> points;
  Contour contour = Contour::RealAxis;

  std::size_t size() const { return points.size(); }
};

// Symmetric real-axis grid, geometric |k| spacing from kmin to kmax (dense
// near 0), n points per sign.
Kgrid kgrid_real_axis(std::size_t n, double kmin, double kmax);
// Single ray k = r e^{i angle}, geometric r in [kmin, kmax].
Kgrid kgrid_ray(std::size_t n, double angle, double kmin, double kmax, Contour label);
// Boundary of D1 sampled on both rays (imag then real), geometric.
Kgrid kgrid_boundary_D1(std::size_t n_per_ray, double kmin, double kmax);

std::vector<double> geometric_points(std::size_t n, double lo, double hi);
std::vector<double> uniform_points(std::size_t n, double lo, double hi);

}  // namespace nlsg

#endif
