#include "nlsg/globalrel.hpp"

#include <cmath>

namespace nlsg {

void GlobalResidual::finalize(std::size_t n_edges) {
  per_edge_max.assign(n_edges, 0.0);
  max_norm = 0.0;
  for (const auto& r : residual)
    for (std::size_t e = 0; e < n_edges; ++e) {
      per_edge_max[e] = std::max(per_edge_max[e], std::abs(r[e]));
      max_norm = std::max(max_norm, std::abs(r[e]));
    }
}

static void check_same_edges(const SpectralData& s, const BoundarySpectral& b) {
  if (s.N != b.N) throw ValidationError("global relation: edge count mismatch");
}

GlobalResidual residual_infinite_T(const SpectralData& spec, const BoundarySpectral& bspec,
                                   const Kgrid& kgrid) {
  check_same_edges(spec, bspec);
  GlobalResidual out;
  out.kgrid = kgrid;
  out.residual.assign(kgrid.size(), DiagMat(spec.N));
  for (std::size_t i = 0; i < kgrid.size(); ++i) {
    const cd k = kgrid.points[i];
    if (k.real() < -1e-12 || k.imag() < -1e-12)
      throw ValidationError("residual_infinite_T: k outside the closure of D1");
    DiagMat a, b, A, B;
    spec.evaluator.eval(k, a, b);
    bspec.evaluator.eval(k, A, B);
    out.residual[i] = a * B - b * A;
  }
  out.finalize(spec.N);
  return out;
}

DiagMat compute_c(const SampledFunction& slice, double g, cd k, const StepperParams& stepper) {
  if (!slice.decays()) {
    const double m = slice.max_abs();
    for (std::size_t e = 0; e < slice.edges(); ++e)
      if (slice.tail_abs(e) > 1e-6 * std::max(m, 1e-300))
        throw ValidationError("compute_c: slice does not decay at the grid end");
  }
  DiagMat c(slice.edges());
  for (std::size_t e = 0; e < slice.edges(); ++e) {
    const auto r = x_scatter_edge(slice.edge_fn(e), 0.0, slice.hi(), g, k, stepper);
    c[e] = -r.top;  // c = -b of the slice
  }
  return c;
}

GlobalResidual residual_finite_T(const SpectralData& spec, const BoundarySpectral& bspec,
                                 const SampledFunction& final_slice, const Kgrid& kgrid) {
  check_same_edges(spec, bspec);
  GlobalResidual out;
  out.kgrid = kgrid;
  out.residual.assign(kgrid.size(), DiagMat(spec.N));
  const double T = bspec.T;
  for (std::size_t i = 0; i < kgrid.size(); ++i) {
    const cd k = kgrid.points[i];
    DiagMat a, b, A, B;
    spec.evaluator.eval(k, a, b);
    bspec.evaluator.eval(k, A, B);
    const DiagMat c = compute_c(final_slice, spec.g, k);
    out.residual[i] = a * B - b * A - std::exp(4.0 * I1 * k * k * T) * c;
  }
  out.finalize(spec.N);
  return out;
}

std::vector<GlobalResidual> residual_all_time(
    const SpectralData& spec, const BoundarySpectral& bspec,
    const std::function<SampledFunction(double)>& slice_at,
    const std::vector<std::size_t>& time_indices) {
  check_same_edges(spec, bspec);
  if (!bspec.all_time) throw ValidationError("residual_all_time: all-time table missing");
  const auto& tab = *bspec.all_time;
  std::vector<GlobalResidual> out;
  for (std::size_t jt : time_indices) {
    if (jt >= tab.tgrid.size()) throw ValidationError("residual_all_time: bad time index");
    const double t = tab.tgrid[jt];
    const SampledFunction slice = slice_at(t);
    GlobalResidual gr;
    gr.kgrid = bspec.kgrid;
    gr.residual.assign(bspec.kgrid.size(), DiagMat(spec.N));
    for (std::size_t i = 0; i < bspec.kgrid.size(); ++i) {
      const cd k = bspec.kgrid.points[i];
      DiagMat a, b;
      spec.evaluator.eval(k, a, b);
      // A(t,k) = conj(Phi2(t, conj(k))), B(t,k) = -Phi1(t,k) e^{4ik^2 t};
      // restricted to real-axis samples so the conjugate point is the sample.
      if (std::abs(k.imag()) > 1e-12)
        throw ValidationError("residual_all_time: table checks run on real-axis samples");
      const cd ph = std::exp(4.0 * I1 * k * k * t);
      DiagMat At(spec.N), Bt(spec.N);
      for (std::size_t e = 0; e < spec.N; ++e) {
        At[e] = std::conj(tab.phi2[i][jt][e]);
        Bt[e] = -tab.phi1[i][jt][e] * ph;
      }
      const DiagMat c = compute_c(slice, spec.g, k);
      gr.residual[i] = At * b - Bt * a + ph * c;
    }
    gr.finalize(spec.N);
    out.push_back(std::move(gr));
  }
  return out;
}

double consistency_budget(const SpectralData& spec, const BoundarySpectral& bspec,
                          double oracle_error, const SampledFunction* final_slice,
                          const Kgrid* kgrid) {
  double integ = 0.0;
  for (double e : spec.err) integ = std::max(integ, e);
  for (double e : bspec.err) integ = std::max(integ, e);
  double trunc = 0.0;
  if (final_slice && kgrid) {
    for (const cd& k : kgrid->points) {
      const DiagMat c = compute_c(*final_slice, spec.g, k);
      trunc = std::max(trunc, c.max_abs());
    }
  }
  return integ + oracle_error + trunc;
}

}  // namespace nlsg
