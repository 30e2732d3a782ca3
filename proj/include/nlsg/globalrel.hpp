#ifndef NLSG_GLOBALREL_HPP
#define NLSG_GLOBALREL_HPP

#include <functional>
#include <vector>

#include "nlsg/spectral.hpp"

namespace nlsg {

struct GlobalResidual {
  Kgrid kgrid;
  std::vector<DiagMat> residual;   // per sample, per edge
  std::vector<double> per_edge_max;
  double max_norm = 0.0;

  void finalize(std::size_t n_edges);
};

// a(k)B(k) - b(k)A(k) on the closure of D1; vanishes for consistent decaying
// data in the infinite-horizon mode.
GlobalResidual residual_infinite_T(const SpectralData& spec, const BoundarySpectral& bspec,
                                   const Kgrid& kgrid);

// c(T,k) = int_0^inf e^{2ikx} Q(x,T) (mu3(x,T,k))_22 dx, evaluated through the
// direct transform of the time slice: c = -b[Q(.,T)].
DiagMat compute_c(const SampledFunction& slice, double g, cd k,
                  const StepperParams& stepper = {.steps = 2400});

// aB - bA - e^{4ik^2 T} c(T,k) on the boundary of D1.
GlobalResidual residual_finite_T(const SpectralData& spec, const BoundarySpectral& bspec,
                                 const SampledFunction& final_slice, const Kgrid& kgrid);

// All-time version: A(t,k) b(k) - B(t,k) a(k) + c(t,k) e^{4ik^2 t} at the
// table's time nodes selected by `time_indices`, with solution slices supplied
// per time. (The sign of c follows the slice-transform convention above.)
std::vector<GlobalResidual> residual_all_time(
    const SpectralData& spec, const BoundarySpectral& bspec,
    const std::function<SampledFunction(double)>& slice_at,
    const std::vector<std::size_t>& time_indices);

// Declared consistency budget: integrator estimates + oracle discretization
// error + the infinite-horizon truncation term max_k |c(T,k)| when a final
// slice is supplied.
double consistency_budget(const SpectralData& spec, const BoundarySpectral& bspec,
                          double oracle_error, const SampledFunction* final_slice = nullptr,
                          const Kgrid* kgrid = nullptr);

}  // namespace nlsg

#endif
