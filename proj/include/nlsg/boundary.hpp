#ifndef NLSG_BOUNDARY_HPP
#define NLSG_BOUNDARY_HPP

#include <optional>
#include <utility>

#include "nlsg/spectral.hpp"

namespace nlsg {

// hat(U - I) H0(t) + i hat(U + I) H1(t) per grid time; zero iff the general
// Robin vertex condition holds. Equivalent to (U-I)R + i(U+I)R_x on the
// diagonal vectors.
SampledFunction robin_residual(const MatX& U, const SampledFunction& H0,
                               const SampledFunction& H1, double unitary_tol = 1e-10);

// (sigma H0 sigma - H0, sigma H1 sigma + H1 - eta H0) for the delta impurity.
std::pair<SampledFunction, SampledFunction> delta_residual(double eta, const SampledFunction& H0,
                                                           const SampledFunction& H1);

struct JumpDefectResidual {
  std::vector<double> tgrid;
  std::vector<cd> first, second;
  std::vector<double> omega;  // Omega(t) = sqrt(beta^2 + 2 g |g0^2 - g0^1|^2)
  double max_first = 0.0, max_second = 0.0;
};

// Both defect-condition residuals; the time derivative of g0^2 - g0^1 comes
// from centered differences of the samples unless the data is analytic.
JumpDefectResidual jump_defect_residual(double alpha, double beta, double g,
                                        const SampledFunction& H0, const SampledFunction& H1);

// H0 = g0 I, H1 = g1 sigma3 from scalar data (N = 2 embedding).
std::pair<SampledFunction, SampledFunction> make_transparent(const SampledFunction& g0,
                                                             const SampledFunction& g1);

// Full-line scattering of a single potential u0 on [-L, L] together with the
// reflected-negated component w(x) = -u0(-x); the pair forms the 2x2 diagonal
// blocks of S^line.
struct FullLineData {
  Kgrid kgrid;
  std::vector<cd> a_line, b_line;  // component 1: u0(x)
  std::vector<cd> a_refl, b_refl;  // component 2: -u0(-x)
  double L = 0.0;
  double g = 0.0;
  std::function<void(cd, cd&, cd&)> eval1, eval2;  // (k) -> (a, b) on demand

  double unit_det_residual() const;
};

FullLineData fullline_scattering(const SampledFunction& u0, double g, const Kgrid& kgrid,
                                 const StepperParams& stepper = {.steps = 3200});

struct FulllineRecoveryReport {
  double rel_SSline = 0.0;   // I3 S(k) I3 = Sigma I3 S(-k) I3 Sigma S^line(k)
  double rel_T = 0.0;        // T(k) = Sigma3 Sigma T(-k) Sigma Sigma3
  double sym_A = 0.0;        // A(-k) = sigma A(k) sigma
  double sym_B = 0.0;        // B(-k) = -sigma B(k) sigma
  double net = 0.0;          // a F^line = conj(b(conj k)) G^line
  double gamma_closed = 0.0; // gamma from half-line data vs its closed form
  double Gamma_closed = 0.0; // Gamma vs the a_line/b_line closed form (R^- samples)
  double fourier_line = 0.0; // g = 0 block-(12) degeneration (quadrature identity)
  bool fourier_checked = false;
};

// Residuals of the transparent-recovery relations on real-axis samples.
// spec/bspec must come from the restricted half-line problem (q1 = u0|+,
// q2 = u0(-.)|+) with transparent traces; fl from fullline_scattering(u0).
FulllineRecoveryReport verify_fullline_recovery(const SpectralData& spec,
                                                const BoundarySpectral& bspec,
                                                const FullLineData& fl, const Kgrid& real_grid);

// g = 0 Fourier identity Qhat_line(k,0) = sigma3(Qhat(k,0) + sigma Qhat(-k,0) sigma),
// checked by quadrature on the restriction data.
double fourier_line_identity(const SampledFunction& u0, const Kgrid& real_grid);

struct SymmetryReduction {
  bool linearizable = false;
  int p = -1;
  double sym_residual = 0.0;
  bool dirichlet = false;
  cd coef_q{0.0, 0.0}, coef_qx{0.0, 0.0};  // coef_q q(0,t) + coef_qx q_x(0,t) = 0
  bool extension = false;                  // general circulant route (DFT symbol)
  std::string note;
};

// Detects K Q0 K^{-1} = omega^p Q0 and reduces circulant vertex conditions to
// a scalar half-line condition. GeneralizedDelta uses the beta_p coefficients
// (2i alpha - 2(N-1) + beta_p, i(2 + beta_p)); a general circulant U goes
// through the DFT symbol route and is flagged as an extension.
SymmetryReduction reduce_symmetric(const SampledFunction& Q0, const BoundarySpec& spec,
                                   double tol = 1e-10);

struct DaughterReduction {
  bool symmetric = false;
  double residual = 0.0;
  std::optional<SampledFunction> reduced;  // two-component problem (edge 1, edge 2)
};

// N = 3 daughter-edge symmetry: edges 2 and 3 carry identical data.
DaughterReduction daughter_symmetry_check(const SampledFunction& Q0, double tol = 1e-10);

}  // namespace nlsg

#endif
