#ifndef NLSG_ORACLE_HPP
#define NLSG_ORACLE_HPP

#include <functional>
#include <optional>
#include <vector>

#include "nlsg/sampled.hpp"
#include "nlsg/types.hpp"

namespace nlsg {

// Crank-Nicolson field on a truncated interval with prescribed Dirichlet data
// at both ends and extracted traces at a marked interior/boundary node.
struct PDEField {
  std::vector<double> xgrid;   // uniform
  std::vector<double> tgrid;   // uniform
  // field[edge][it][ix]
  std::vector<std::vector<std::vector<cd>>> field;
  std::size_t vertex_index = 0;  // x-node where traces are read
  SampledFunction H0, H1;        // traces at the vertex node
  double mass_drift = 0.0;       // max |mass(t) - mass(0)| over edges (zero-flux runs)
  double error_estimate = 0.0;   // Richardson estimate from a half-resolution rerun

  cd at(std::size_t edge, std::size_t it, std::size_t ix) const { return field[edge][it][ix]; }
  SampledFunction slice(double t) const;  // nearest-node time slice as x-sampled data
};

struct EvolveParams {
  double dx = 0.02;
  double dt = 0.01;
  int cubic_iterations = 3;
  double blowup_threshold = 1e6;
  bool estimate_error = true;   // half-resolution rerun
  unsigned threads = 0;
};

// i q_t + q_xx - 2 g |q|^2 q = 0 per edge on [0, L], Dirichlet q(0,t) given
// (defaults to frozen initial value when no data), q(L,t) = 0.
PDEField evolve_nls(const SampledFunction& Q0, const std::optional<SampledFunction>& H0, double L,
                    double T, double g, const EvolveParams& params = {});

// Full-line variant on [-L, L] (both ends zero), traces extracted at x = 0.
// Edge count of u0 must be 1; the returned field has one edge on the full
// interval, H0/H1 are the x = 0 traces (centered difference for H1).
PDEField evolve_nls_fullline(const SampledFunction& u0, double L, double T, double g,
                             const EvolveParams& params = {});

// Exact linear (g = 0) solutions by Fourier quadrature.
struct LinearSolution {
  bool full_line = false;
  double kmax = 60.0;
  std::size_t nk = 6001;
  std::vector<EdgeFn> q0hat;  // spectrum per edge (half- or full-line transform)
  std::vector<std::function<cd(double, double)>> eval;   // (x, t) -> value
  std::vector<std::function<cd(double, double)>> deriv;  // d/dx

  cd value(std::size_t e, double x, double t) const { return eval[e](x, t); }
  cd dx_value(std::size_t e, double x, double t) const { return deriv[e](x, t); }
};

// Half-line linear solution from the evolved transform
// Qhat(k,t) = e^{-ik^2 t} Qhat(k,0) - e^{-ik^2 t} int_0^t e^{ik^2 tau}(i H1 + k H0) dtau,
// inverted by Fourier quadrature. H0/H1 must be supplied as callables.
LinearSolution linear_halfline(const SampledFunction& Q0, const std::vector<EdgeFn>& h0,
                               const std::vector<EdgeFn>& h1, double kmax = 60.0,
                               std::size_t nk = 6001, std::size_t nt_quad = 2048);

// Free full-line evolution of u0 (one edge).
LinearSolution linear_fullline(const SampledFunction& u0, double kmax = 60.0,
                               std::size_t nk = 6001);

}  // namespace nlsg

#endif
