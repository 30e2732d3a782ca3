#ifndef NLSG_SPECTRAL_HPP
#define NLSG_SPECTRAL_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nlsg/integrate.hpp"
#include "nlsg/problem.hpp"
#include "nlsg/types.hpp"

namespace nlsg {

// On-demand evaluator for the x-system scattering pair (a(k), b(k)),
// k in the closed upper half-plane. Pure; safe to share across threads.
struct XSpectrum {
  std::vector<EdgeFn> q;
  double L = 0.0;
  double g = 0.0;
  StepperParams stepper;

  std::size_t edges() const { return q.size(); }
  void eval(cd k, DiagMat& a, DiagMat& b, double* err = nullptr) const;
  cd a_edge(std::size_t e, cd k) const;
  cd b_edge(std::size_t e, cd k) const;
};

// Evaluator for the t-system pair (A(k), B(k)); entire in k for finite T,
// stable on Im(k^2) >= 0 for decaying data in infinite-horizon mode.
struct TSpectrum {
  std::vector<EdgeFn> h0, h1;
  double T = 0.0;
  double g = 0.0;
  StepperParams stepper;

  std::size_t edges() const { return h0.size(); }
  void eval(cd k, DiagMat& A, DiagMat& B, double* err = nullptr) const;
};

struct ZeroSet {
  struct Zero {
    cd k;
    int quadrant = 0;        // 1 or 2; 0 when within tol of the imaginary axis
    bool on_boundary = false;
    cd fprime;               // derivative at the zero (simplicity witness)
  };
  std::vector<std::vector<Zero>> kappa;   // zeros of a_alpha in D1 u D2, per edge
  std::vector<std::vector<Zero>> lambda;  // zeros of d_alpha in D2, per edge
  std::vector<std::string> violations;    // (C1)-(C3) findings

  std::size_t total_kappa() const {
    std::size_t s = 0;
    for (const auto& v : kappa) s += v.size();
    return s;
  }
  std::size_t total_lambda() const {
    std::size_t s = 0;
    for (const auto& v : lambda) s += v.size();
    return s;
  }
  bool clean() const { return violations.empty(); }
};

struct SpectralData {
  Kgrid kgrid;
  std::vector<DiagMat> a, b;   // per sample
  std::vector<double> err;     // integrator estimates per sample
  ZeroSet zeros;
  double L = 0.0;
  double g = 0.0;
  std::size_t N = 0;
  XSpectrum evaluator;

  // max over real-axis samples of | |a|^2 - g|b|^2 - 1 | per edge
  double unit_det_residual() const;
};

struct AllTimeTable {
  std::vector<double> tgrid;
  // [sample][time] diagonal values; Phi normalized by Phi(0,k) = (0, I)
  std::vector<std::vector<DiagMat>> phi1, phi2;
};

struct BoundarySpectral {
  Kgrid kgrid;
  std::vector<DiagMat> A, B;
  std::vector<double> err;
  double T = 0.0;
  double g = 0.0;
  bool T_infinite = false;
  std::size_t N = 0;
  TSpectrum evaluator;
  std::optional<AllTimeTable> all_time;

  double unit_det_residual() const;
};

struct XParams {
  StepperParams stepper{.steps = 2400};
  double decay_tol = 1e-9;  // tail acceptance vs max when decay untagged
  unsigned threads = 0;
};

struct TParams {
  StepperParams stepper{.steps = 1024};
  bool want_all_time = false;
  std::size_t all_time_nodes = 129;
  unsigned threads = 0;
};

// Integrates the x-system backward from L per edge; a = lower block of
// phi(0,k), b = upper block. Each edge depends only on its own q0.
SpectralData direct_x_transform(const GraphProblem& problem, const Kgrid& kgrid,
                                const XParams& params = {});

// Same machinery for arbitrary per-edge data (used by boundary/oracle code).
SpectralData direct_x_transform(const std::vector<EdgeFn>& q, double L, double g,
                                const Kgrid& kgrid, const XParams& params = {});

// Integrates the t-system backward from T; A, B = blocks of Phi(0,k).
// For infinite horizon pass the truncated grid of decayed data, T = grid end.
BoundarySpectral direct_t_transform(const SampledFunction& H0, const SampledFunction& H1, double T,
                                    double g, const Kgrid& kgrid, const TParams& params = {});
BoundarySpectral direct_t_transform(const std::vector<EdgeFn>& h0, const std::vector<EdgeFn>& h1,
                                    double T, double g, std::size_t n_edges, const Kgrid& kgrid,
                                    const TParams& params = {});

struct MdClosureReport {
  double off_max = 0.0;        // || project_a(mu(0,k)) ||_max from the dense run
  DiagMat a_dense, b_dense;    // blocks read off the dense 2N x 2N integration
  DiagMat a_split, b_split;    // blocks from the per-edge theta-split integration
  double split_vs_dense = 0.0; // max entry difference between the two routes
};

// Full dense 2N x 2N integration of the x-system (adaptive RK45 on the
// oscillation-factored form, no block shortcut) against the theta-split path.
MdClosureReport verify_md_closure(const GraphProblem& problem, cd k, double rk_tol = 1e-12);

struct AsymptoticReport {
  DiagMat a1_fit, a1_quad;  // fitted k(a-1) at the two largest real samples vs
                            // (ig/2) int |q|^2
  DiagMat b1_fit, b1_quad;  // fitted k b vs -(i/2) Q0(0)
  double kmax_used = 0.0;
};

// Large-k coefficients from the top of the sampled real axis.
AsymptoticReport asymptotic_coefficients(const SpectralData& data, double kmin_required = 10.0);

struct SearchBox {
  double re_min, re_max, im_min, im_max;
};

struct FindZeroParams {
  double tol = 1e-9;            // root polish target on |k|-scale
  double boundary_tol = 1e-6;   // distance to the imaginary axis counted as "on boundary"
  int max_depth = 9;
  std::size_t boundary_samples = 48;
};

using EdgeScalarFn = std::function<cd(std::size_t edge, cd k)>;

// Argument-principle search with quadtree subdivision and Newton polish.
// kappa: zeros of a_alpha over the box (upper half-plane);
// lambda: zeros of d_alpha over the D2 part of the box when d is provided.
ZeroSet find_zeros(const XSpectrum& xs, const EdgeScalarFn* d_fn, const SearchBox& box,
                   const FindZeroParams& params = {});

}  // namespace nlsg

#endif
