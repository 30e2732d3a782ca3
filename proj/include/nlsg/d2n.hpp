#ifndef NLSG_D2N_HPP
#define NLSG_D2N_HPP

#include <optional>
#include <vector>

#include "nlsg/spectral.hpp"

namespace nlsg {

struct D2NParams {
  double kmax = 40.0;            // contour truncation radius |k|
  std::size_t n_per_period = 8;  // s = k^2 nodes per oscillation period at t = T
  std::size_t smooth_nodes = 201;  // uniform-r Simpson nodes on [0, sqrt(s_knee)]
  double s_knee = 1.0;
  std::size_t fit_nodes = 96;    // geometric nodes on [Smax, 4 Smax] for tail models
  double fit_threshold = 8.0;    // min |4 t Smax| for the oscillatory tail models
  std::size_t nt = 257;          // H1 sample nodes on [0, T]
  StepperParams stepper{.steps = 1024, .richardson = false};
  StepperParams xstepper{.steps = 1600, .richardson = false};
  double damping = 0.5;          // iterate update weight (1 used when g = 0)
  double tol = 1e-9;
  std::size_t max_iter = 40;
  bool check_a_zeros = true;
  double zero_box = 3.0;         // D1 zero search box half-size
  unsigned threads = 0;
};

struct D2NState {
  SampledFunction H1;
  std::vector<double> update_norms;
  std::size_t iterations = 0;
  bool converged = false;
  double final_update = 0.0;
  double fixed_point_residual = 0.0;
};

// The three contour integrals of the Neumann representation, tail-completed,
// per edge on the uniform t-grid. J3 carries the e^{-4ik^2 t} factor; J2half
// is int (k Phi1 + i H0/2) dk, used by the identity checks.
struct FormIntegrals {
  std::vector<double> tgrid;
  std::vector<std::vector<cd>> J1, J2, J2half, J3;
  std::vector<std::vector<cd>> H1_formula;  // (2/pi) H0 J1 + (2i/pi) J2 + (4i/pi) J3
};

FormIntegrals evaluate_form_integrals(const XSpectrum& xs, const std::vector<EdgeFn>& h0,
                                      const std::vector<EdgeFn>& h1, double T, double g,
                                      const D2NParams& params);

// Damped fixed-point iteration on the Neumann representation: integrate the
// Phi system forward from (0, I) with the current iterate, evaluate the three
// boundary-of-D1 integrals, update. Requires a(k) zero-free in D1.
D2NState solve_neumann(const SampledFunction& Q0, const SampledFunction& H0, double T, double g,
                       const D2NParams& params = {},
                       const std::optional<SampledFunction>& warm_start = std::nullopt);

// A(k) = conj(Phi2(T, conj k)), B(k) = -Phi1(T,k) e^{4ik^2 T} from forward
// runs with the given boundary pair; agrees with direct_t_transform.
BoundarySpectral spectral_from_phi(const SampledFunction& H0, const SampledFunction& H1, double T,
                                   double g, const Kgrid& kgrid,
                                   const StepperParams& stepper = {.steps = 1024});

struct AsymptoticConsistency {
  double phi11_residual = 0.0;    // fitted Phi1^1(t) vs -(i/2) H0(t)
  double phi21_residual = 0.0;    // fitted Phi2^1(t) vs -(g/2) int (conj(H1)H0 - conj(H0)H1)
  double h1_recovery = 0.0;       // H1 vs 4 Phi1^2 + 2i H0 Phi2^1 (fit route)
  double c1_plus_b1 = 0.0;        // |(i/2) H0(0) + b^1|, b^1 = -(i/2) Q0(0)
  double p21_identity = 0.0;      // i pi Phi2^1 = int (Phi2(k) - Phi2(-k)) dk
  double p12_identity = 0.0;      // i pi Phi1^2 = 2 int (k Phi1 + i H0/2) - int [k(Phi1-Phi1(-k)) + iH0]
  double last_identity = 0.0;     // int (k c a^{-1} + i H0/2) dk = -(i pi/2) Phi1^2
  double t_min = 0.0;             // identities evaluated for t >= t_min
};

// Large-k consistency of the Phi system on a D2-interior ray plus the
// contour-integral identities, for a consistent (Q0, H0, H1) triple.
AsymptoticConsistency asymptotic_consistency(const SampledFunction& Q0,
                                             const SampledFunction& H0,
                                             const SampledFunction& H1, double T, double g,
                                             const D2NParams& params = {});

}  // namespace nlsg

#endif
