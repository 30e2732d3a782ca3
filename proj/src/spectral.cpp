#include "nlsg/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "nlsg/blockmat.hpp"

namespace nlsg {

void XSpectrum::eval(cd k, DiagMat& a, DiagMat& b, double* err) const {
  const std::size_t n = edges();
  a = DiagMat(n);
  b = DiagMat(n);
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = x_scatter_edge(q[i], 0.0, L, g, k, stepper);
    b[i] = r.top;
    a[i] = r.bottom;
    e = std::max(e, r.err);
  }
  if (err) *err = e;
}

cd XSpectrum::a_edge(std::size_t e, cd k) const {
  return x_scatter_edge(q[e], 0.0, L, g, k, stepper).bottom;
}

cd XSpectrum::b_edge(std::size_t e, cd k) const {
  return x_scatter_edge(q[e], 0.0, L, g, k, stepper).top;
}

void TSpectrum::eval(cd k, DiagMat& A, DiagMat& B, double* err) const {
  const std::size_t n = edges();
  A = DiagMat(n);
  B = DiagMat(n);
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = t_scatter_edge(h0[i], h1[i], T, g, k, stepper);
    B[i] = r.top;
    A[i] = r.bottom;
    e = std::max(e, r.err);
  }
  if (err) *err = e;
}

static double unit_det_residual_impl(const Kgrid& kg, const std::vector<DiagMat>& a,
                                     const std::vector<DiagMat>& b, double g) {
  double worst = 0.0;
  for (std::size_t i = 0; i < kg.size(); ++i) {
    if (std::abs(kg.points[i].imag()) > 1e-14) continue;
    for (std::size_t e = 0; e < a[i].size(); ++e) {
      const double det = std::norm(a[i][e]) - g * std::norm(b[i][e]);
      worst = std::max(worst, std::abs(det - 1.0));
    }
  }
  return worst;
}

double SpectralData::unit_det_residual() const { return unit_det_residual_impl(kgrid, a, b, g); }
double BoundarySpectral::unit_det_residual() const { return unit_det_residual_impl(kgrid, A, B, g); }

static void check_decay(const SampledFunction& f, double tol, const char* what) {
  if (f.decays()) return;
  const double m = f.max_abs();
  for (std::size_t e = 0; e < f.edges(); ++e) {
    if (f.tail_abs(e) > tol * std::max(m, 1e-300))
      throw ValidationError(std::string(what) +
                            ": data does not decay at the grid end (edge " + std::to_string(e + 1) +
                            "); flag it compactly supported or extend the grid");
  }
}

SpectralData direct_x_transform(const GraphProblem& problem, const Kgrid& kgrid,
                                const XParams& params) {
  check_decay(problem.Q0, params.decay_tol, "direct_x_transform");
  std::vector<EdgeFn> fns;
  fns.reserve(problem.N);
  for (std::size_t e = 0; e < problem.N; ++e) fns.push_back(problem.Q0.edge_fn(e));
  return direct_x_transform(fns, problem.Q0.hi(), problem.g, kgrid, params);
}

SpectralData direct_x_transform(const std::vector<EdgeFn>& q, double L, double g,
                                const Kgrid& kgrid, const XParams& params) {
  SpectralData out;
  out.kgrid = kgrid;
  out.L = L;
  out.g = g;
  out.N = q.size();
  out.evaluator = XSpectrum{q, L, g, params.stepper};
  out.a.assign(kgrid.size(), DiagMat(out.N));
  out.b.assign(kgrid.size(), DiagMat(out.N));
  out.err.assign(kgrid.size(), 0.0);
  const XSpectrum& xs = out.evaluator;
  parallel_for(
      kgrid.size(),
      [&](std::size_t i) { xs.eval(kgrid.points[i], out.a[i], out.b[i], &out.err[i]); },
      params.threads);
  return out;
}

BoundarySpectral direct_t_transform(const SampledFunction& H0, const SampledFunction& H1, double T,
                                    double g, const Kgrid& kgrid, const TParams& params) {
  if (H0.edges() != H1.edges()) throw ValidationError("direct_t_transform: H0/H1 edge mismatch");
  if (T <= 0.0) throw ValidationError("direct_t_transform: T must be positive");
  if (T > H0.hi() + 1e-12 || T > H1.hi() + 1e-12)
    throw ValidationError("direct_t_transform: grid does not reach T");
  std::vector<EdgeFn> f0, f1;
  for (std::size_t e = 0; e < H0.edges(); ++e) {
    f0.push_back(H0.edge_fn(e));
    f1.push_back(H1.edge_fn(e));
  }
  return direct_t_transform(f0, f1, T, g, H0.edges(), kgrid, params);
}

BoundarySpectral direct_t_transform(const std::vector<EdgeFn>& h0, const std::vector<EdgeFn>& h1,
                                    double T, double g, std::size_t n_edges, const Kgrid& kgrid,
                                    const TParams& params) {
  BoundarySpectral out;
  out.kgrid = kgrid;
  out.T = T;
  out.g = g;
  out.N = n_edges;
  out.evaluator = TSpectrum{h0, h1, T, g, params.stepper};
  out.A.assign(kgrid.size(), DiagMat(n_edges));
  out.B.assign(kgrid.size(), DiagMat(n_edges));
  out.err.assign(kgrid.size(), 0.0);
  const TSpectrum& ts = out.evaluator;
  parallel_for(
      kgrid.size(),
      [&](std::size_t i) { ts.eval(kgrid.points[i], out.A[i], out.B[i], &out.err[i]); },
      params.threads);

  if (params.want_all_time) {
    AllTimeTable tab;
    tab.tgrid = uniform_points(params.all_time_nodes, 0.0, T);
    tab.phi1.assign(kgrid.size(), std::vector<DiagMat>(params.all_time_nodes, DiagMat(n_edges)));
    tab.phi2 = tab.phi1;
    parallel_for(
        kgrid.size(),
        [&](std::size_t i) {
          std::vector<cd> p1, p2;
          for (std::size_t e = 0; e < n_edges; ++e) {
            t_forward_edge(h0[e], h1[e], T, g, kgrid.points[i], params.all_time_nodes,
                           params.stepper, p1, p2);
            for (std::size_t j = 0; j < params.all_time_nodes; ++j) {
              tab.phi1[i][j][e] = p1[j];
              tab.phi2[i][j][e] = p2[j];
            }
          }
        },
        params.threads);
    out.all_time = std::move(tab);
  }
  return out;
}

MdClosureReport verify_md_closure(const GraphProblem& problem, cd k, double rk_tol) {
  const std::size_t n = problem.N;
  const double L = problem.Q0.hi();
  std::vector<EdgeFn> q;
  for (std::size_t e = 0; e < n; ++e) q.push_back(problem.Q0.edge_fn(e));

  // Dense conjugated system: nu' = What(x) nu with What12 = e^{2ikx} Q0,
  // What21 = g e^{-2ikx} conj(Q0); nu(L) = I, mu(0) = nu(0).
  const double g = problem.g;
  auto rhs = [&](double x, const MatX& y) {
    MatX w = MatX::Zero(2 * (Eigen::Index)n, 2 * (Eigen::Index)n);
    const cd up = std::exp(2.0 * I1 * k * x);
    const cd dn = std::exp(-2.0 * I1 * k * x);
    for (std::size_t e = 0; e < n; ++e) {
      const cd qv = q[e](x);
      w((Eigen::Index)e, (Eigen::Index)(e + n)) = up * qv;
      w((Eigen::Index)(e + n), (Eigen::Index)e) = g * dn * std::conj(qv);
    }
    return MatX(w * y);
  };
  const MatX mu0 = rk45_dense(rhs, L, 0.0, MatX::Identity(2 * (Eigen::Index)n, 2 * (Eigen::Index)n),
                              rk_tol);

  MdClosureReport rep;
  rep.off_max = project_a(mu0).cwiseAbs().maxCoeff();
  const BlockDiag bd = project_d(mu0);
  rep.a_dense = bd.m22;
  rep.b_dense = bd.m12;
  rep.a_split = DiagMat(n);
  rep.b_split = DiagMat(n);
  StepperParams sp;
  sp.steps = 3200;
  for (std::size_t e = 0; e < n; ++e) {
    const auto r = x_scatter_edge(q[e], 0.0, L, g, k, sp);
    rep.a_split[e] = r.bottom;
    rep.b_split[e] = r.top;
  }
  double d = 0.0;
  for (std::size_t e = 0; e < n; ++e) {
    d = std::max(d, std::abs(rep.a_split[e] - rep.a_dense[e]));
    d = std::max(d, std::abs(rep.b_split[e] - rep.b_dense[e]));
  }
  rep.split_vs_dense = d;
  return rep;
}

AsymptoticReport asymptotic_coefficients(const SpectralData& data, double kmin_required) {
  // pick the two largest positive real-axis samples
  std::vector<std::pair<double, std::size_t>> reals;
  for (std::size_t i = 0; i < data.kgrid.size(); ++i) {
    const cd k = data.kgrid.points[i];
    if (std::abs(k.imag()) < 1e-14 && k.real() > 0.0) reals.emplace_back(k.real(), i);
  }
  std::sort(reals.begin(), reals.end());
  if (reals.size() < 2 || reals.back().first < kmin_required)
    throw ValidationError("asymptotic_coefficients: real-axis k-grid maximum below threshold");
  const auto [k2, i2] = reals[reals.size() - 1];
  const auto [k1, i1] = reals[reals.size() - 2];

  const std::size_t n = data.N;
  AsymptoticReport rep{DiagMat(n), DiagMat(n), DiagMat(n), DiagMat(n), k2};
  for (std::size_t e = 0; e < n; ++e) {
    // model f(k) = c1 + c2/k from the two samples, for f = k(a-1) and f = k b
    const cd fa1 = k1 * (data.a[i1][e] - 1.0), fa2 = k2 * (data.a[i2][e] - 1.0);
    const cd ca2 = (fa2 - fa1) / (1.0 / k2 - 1.0 / k1);
    rep.a1_fit[e] = fa2 - ca2 / k2;
    const cd fb1 = k1 * data.b[i1][e], fb2 = k2 * data.b[i2][e];
    const cd cb2 = (fb2 - fb1) / (1.0 / k2 - 1.0 / k1);
    rep.b1_fit[e] = fb2 - cb2 / k2;
  }
  // quadrature predictions (ig/2) int |q|^2 dx and -(i/2) q(0)
  const auto& xs = data.evaluator;
  const std::size_t m = 4096;
  const double h = data.L / (double)m;
  for (std::size_t e = 0; e < n; ++e) {
    double acc = 0.0;  // Simpson on |q|^2 (real)
    for (std::size_t j = 0; j <= m; ++j) {
      const double w = (j == 0 || j == m) ? 1.0 : (j % 2 ? 4.0 : 2.0);
      acc += w * std::norm(xs.q[e](h * (double)j));
    }
    acc *= h / 3.0;
    rep.a1_quad[e] = I1 * data.g / 2.0 * acc;
    rep.b1_quad[e] = -I1 / 2.0 * xs.q[e](0.0);
  }
  return rep;
}

namespace {

struct WindingResult {
  int count = 0;
  bool unstable = false;  // contour passed too close to a zero
};

// Winding number of f along the rectangle boundary via adaptive phase tracking.
WindingResult winding_count(const std::function<cd(cd)>& f, const SearchBox& box,
                            std::size_t base_samples, double tiny) {
  std::vector<cd> corners = {cd(box.re_min, box.im_min), cd(box.re_max, box.im_min),
                             cd(box.re_max, box.im_max), cd(box.re_min, box.im_max),
                             cd(box.re_min, box.im_min)};
  WindingResult res;
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < corners.size(); ++s) {
    std::vector<std::pair<double, cd>> seg;  // parameter, value
    const std::size_t m = base_samples;
    for (std::size_t j = 0; j <= m; ++j) {
      const double t = (double)j / (double)m;
      const cd z = corners[s] + t * (corners[s + 1] - corners[s]);
      seg.emplace_back(t, f(z));
    }
    // refine until each phase increment is < pi/2
    for (int depth = 0; depth < 24; ++depth) {
      bool ok = true;
      std::vector<std::pair<double, cd>> next;
      next.reserve(seg.size() * 2);
      for (std::size_t j = 0; j + 1 < seg.size(); ++j) {
        next.push_back(seg[j]);
        const cd r = seg[j + 1].second / seg[j].second;
        if (std::abs(std::arg(r)) > M_PI / 2.0) {
          ok = false;
          const double tm = 0.5 * (seg[j].first + seg[j + 1].first);
          const cd z = corners[s] + tm * (corners[s + 1] - corners[s]);
          next.emplace_back(tm, f(z));
        }
      }
      next.push_back(seg.back());
      seg = std::move(next);
      if (ok) break;
      if (depth == 23) res.unstable = true;
    }
    double scale = 0.0;
    for (const auto& [t, v] : seg) scale = std::max(scale, std::abs(v));
    for (const auto& [t, v] : seg)
      if (std::abs(v) < tiny * std::max(scale, 1e-300)) res.unstable = true;
    for (std::size_t j = 0; j + 1 < seg.size(); ++j)
      total += std::arg(seg[j + 1].second / seg[j].second);
  }
  res.count = (int)std::lround(total / (2.0 * M_PI));
  return res;
}

cd numeric_derivative(const std::function<cd(cd)>& f, cd z, double h) {
  return (f(z + h) - f(z - h)) / (2.0 * h);
}

void collect_zeros(const std::function<cd(cd)>& f, SearchBox box, const FindZeroParams& p,
                   int depth, std::vector<cd>& found, std::vector<std::string>& notes,
                   const std::string& tag) {
  WindingResult w = winding_count(f, box, p.boundary_samples, 1e-9);
  if (w.unstable) {
    // perturb the box outward once, then report if still unstable
    SearchBox wider = box;
    const double dr = 0.013 * (box.re_max - box.re_min) + 1e-6;
    const double di = 0.017 * (box.im_max - box.im_min) + 1e-6;
    wider.re_min -= dr;
    wider.re_max += dr;
    wider.im_min = std::max(1e-9, wider.im_min - di);
    wider.im_max += di;
    w = winding_count(f, wider, p.boundary_samples, 1e-9);
    if (w.unstable) {
      notes.push_back(tag + ": argument-principle count unstable near box [" +
                      std::to_string(box.re_min) + "," + std::to_string(box.re_max) + "]x[" +
                      std::to_string(box.im_min) + "," + std::to_string(box.im_max) + "]");
      return;
    }
    box = wider;
  }
  if (w.count == 0) return;
  const double dre = box.re_max - box.re_min, dim = box.im_max - box.im_min;
  if (w.count > 1 || (std::max(dre, dim) > 64.0 * p.tol && depth < p.max_depth)) {
    if (depth >= p.max_depth) {
      notes.push_back(tag + ": could not isolate " + std::to_string(w.count) + " zeros (depth cap)");
      return;
    }
    SearchBox lohalf = box, hihalf = box;
    if (dre >= dim) {
      const double mid = 0.5 * (box.re_min + box.re_max);
      lohalf.re_max = mid;
      hihalf.re_min = mid;
    } else {
      const double mid = 0.5 * (box.im_min + box.im_max);
      lohalf.im_max = mid;
      hihalf.im_min = mid;
    }
    collect_zeros(f, lohalf, p, depth + 1, found, notes, tag);
    collect_zeros(f, hihalf, p, depth + 1, found, notes, tag);
    return;
  }
  // isolated: Newton polish from the box center
  cd z{0.5 * (box.re_min + box.re_max), 0.5 * (box.im_min + box.im_max)};
  const double hstep = 1e-6 * std::max(1.0, std::abs(z));
  bool converged = false;
  for (int it = 0; it < 60; ++it) {
    const cd fv = f(z);
    const cd dv = numeric_derivative(f, z, hstep);
    if (std::abs(dv) < 1e-300) break;
    const cd znew = z - fv / dv;
    if (std::abs(znew - z) < p.tol * std::max(1.0, std::abs(z))) {
      z = znew;
      converged = true;
      break;
    }
    z = znew;
  }
  if (!converged && std::abs(f(z)) > 1e-6) {
    notes.push_back(tag + ": Newton polish did not converge in box");
    return;
  }
  for (const cd& prev : found)
    if (std::abs(prev - z) < 16.0 * p.tol * std::max(1.0, std::abs(z))) return;
  found.push_back(z);
}

}  // namespace

ZeroSet find_zeros(const XSpectrum& xs, const EdgeScalarFn* d_fn, const SearchBox& box,
                   const FindZeroParams& p) {
  const std::size_t n = xs.edges();
  ZeroSet zs;
  zs.kappa.resize(n);
  zs.lambda.resize(n);
  if (box.im_min < 0.0) throw ValidationError("find_zeros: box must lie in the upper half-plane");

  for (std::size_t e = 0; e < n; ++e) {
    auto fa = [&](cd k) { return xs.a_edge(e, k); };
    std::vector<cd> roots;
    collect_zeros(fa, box, p, 0, roots, zs.violations, "a[" + std::to_string(e + 1) + "]");
    for (const cd& r : roots) {
      ZeroSet::Zero z;
      z.k = r;
      z.on_boundary = std::abs(r.real()) < p.boundary_tol || r.imag() < p.boundary_tol;
      z.quadrant = z.on_boundary ? 0 : (r.real() > 0.0 ? 1 : 2);
      const double h = 1e-5 * std::max(1.0, std::abs(r));
      z.fprime = numeric_derivative(fa, r, h);
      const cd f2 = (fa(r + h) - 2.0 * fa(r) + fa(r - h)) / (h * h);
      if (std::abs(z.fprime) < 1e-6 * std::max(1.0, std::abs(f2)))
        zs.violations.push_back("(C1) zero of a[" + std::to_string(e + 1) + "] not simple at k=" +
                                std::to_string(r.real()) + "+" + std::to_string(r.imag()) + "i");
      if (z.on_boundary)
        zs.violations.push_back("(C1) zero of a[" + std::to_string(e + 1) +
                                "] on a quadrant boundary at k=" + std::to_string(r.real()) + "+" +
                                std::to_string(r.imag()) + "i");
      zs.kappa[e].push_back(z);
    }
  }

  if (d_fn) {
    SearchBox d2box = box;
    d2box.re_max = std::min(d2box.re_max, -1e-9);  // D2 only
    if (d2box.re_min < d2box.re_max) {
      for (std::size_t e = 0; e < n; ++e) {
        auto fd = [&](cd k) { return (*d_fn)(e, k); };
        std::vector<cd> roots;
        collect_zeros(fd, d2box, p, 0, roots, zs.violations, "d[" + std::to_string(e + 1) + "]");
        for (const cd& r : roots) {
          ZeroSet::Zero z;
          z.k = r;
          z.on_boundary = std::abs(r.real()) < p.boundary_tol || r.imag() < p.boundary_tol;
          z.quadrant = 2;
          const double h = 1e-5 * std::max(1.0, std::abs(r));
          z.fprime = numeric_derivative(fd, r, h);
          const cd f2 = (fd(r + h) - 2.0 * fd(r) + fd(r - h)) / (h * h);
          if (std::abs(z.fprime) < 1e-6 * std::max(1.0, std::abs(f2)))
            zs.violations.push_back("(C2) zero of d[" + std::to_string(e + 1) + "] not simple");
          zs.lambda[e].push_back(z);
        }
        // (C3): a-zeros in D2 must avoid d-zeros
        for (const auto& ka : zs.kappa[e]) {
          if (ka.quadrant != 2) continue;
          for (const auto& la : zs.lambda[e])
            if (std::abs(ka.k - la.k) < 100.0 * p.tol)
              zs.violations.push_back("(C3) kappa/lambda collision on edge " +
                                      std::to_string(e + 1));
        }
      }
    }
  }
  return zs;
}

}  // namespace nlsg
