#ifndef NLSG_INTEGRATE_HPP
#define NLSG_INTEGRATE_HPP

#include <functional>
#include <vector>

#include "nlsg/sampled.hpp"
#include "nlsg/types.hpp"

namespace nlsg {

// Closed-form exponential of a 2x2 complex matrix.
Mat2 expm2(const Mat2& m);

// int_0^h e^{mu tau} dtau and int_0^h e^{mu tau} (tau - h/2) dtau, stable for
// small |mu h|. The building block of every Filon-type quadrature here.
void phase_moments(cd mu, double h, cd& i0, cd& i1);

// One edge's Lax system y' = (Lambda + V(s)) y with Lambda = diag(lambda, 0).
// x-system: lambda = -2ik,   V = [[0, q(x)], [g conj(q(x)), 0]].
// t-system: lambda = -4ik^2, V = [[-ig|h0|^2, 2k h0 + i h1],
//                                 [g(2k conj(h0) - i conj(h1)), ig|h0|^2]].
struct EdgeSystem {
  cd lambda;
  std::function<Mat2(double)> V;
};

struct StepperParams {
  std::size_t steps = 1200;
  bool richardson = true;   // second run at 2x steps, extrapolated
  double ip_switch = 0.5;   // use interaction-picture steps when |lambda|*h exceeds this
};

// Propagate y from s0 to s1 (either direction); per-step scheme is Magnus-4
// (two Gauss nodes + commutator) at small |lambda*h| and an interaction-picture
// Magnus with exact phase moments otherwise, so cost is k-independent.
// If `trace` is non-null it receives y after every step (size steps+1,
// trace[0] = y(s0)).
Eigen::Vector2cd propagate_column(const EdgeSystem& sys, double s0, double s1,
                                  const Eigen::Vector2cd& y0, std::size_t steps,
                                  double ip_switch, std::vector<Eigen::Vector2cd>* trace = nullptr);

struct ColumnResult {
  cd top, bottom;
  double err = 0.0;  // Richardson error estimate (max of both components)
};

// Richardson-wrapped propagate for the scattering value y(s1).
ColumnResult propagate_with_estimate(const EdgeSystem& sys, double s0, double s1,
                                     const Eigen::Vector2cd& y0, const StepperParams& p);

EdgeSystem x_system(const EdgeFn& q, double g, cd k);
EdgeSystem t_system(const EdgeFn& h0, const EdgeFn& h1, double g, cd k);

// phi(x_lo) of the x-system integrated backward from x_hi with value (0,1):
// top = b(k), bottom = a(k) for the half line when x_lo = 0.
ColumnResult x_scatter_edge(const EdgeFn& q, double x_lo, double x_hi, double g, cd k,
                            const StepperParams& p);

// Phi(0) of the t-system integrated backward from T with value (0,1):
// top = B(k), bottom = A(k).
ColumnResult t_scatter_edge(const EdgeFn& h0, const EdgeFn& h1, double T, double g, cd k,
                            const StepperParams& p);

// Forward solution with Phi(0) = (0,1) recorded on a uniform t-grid with
// nt_out nodes (t = 0 .. T). Internal step count is rounded up to a multiple
// of nt_out-1.
void t_forward_edge(const EdgeFn& h0, const EdgeFn& h1, double T, double g, cd k,
                    std::size_t nt_out, const StepperParams& p, std::vector<cd>& phi1,
                    std::vector<cd>& phi2);

// Adaptive embedded RK (Cash-Karp 4/5) for dense matrix ODEs Y' = F(x, Y),
// used by the 2N x 2N verification path on the oscillation-factored form.
MatX rk45_dense(const std::function<MatX(double, const MatX&)>& f, double x0, double x1, MatX y0,
                double tol, std::size_t max_steps = 2000000);

}  // namespace nlsg

#endif
