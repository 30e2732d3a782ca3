#include "nlsg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "nlsg/integrate.hpp"
#include "nlsg/problem.hpp"

namespace nlsg {

namespace {

// One Crank-Nicolson evolution on a uniform grid with Dirichlet values at both
// ends; the cubic term sits at the midpoint and is resolved by fixed-point
// iteration.
std::vector<std::vector<cd>> cn_run(const std::vector<cd>& psi0, const EdgeFn& left_bc,
                                    double dx, double dt, std::size_t nt, double g,
                                    int cubic_iterations, double blowup, double* drift) {
  const std::size_t nx = psi0.size();
  std::vector<std::vector<cd>> out;
  out.reserve(nt + 1);
  out.push_back(psi0);
  std::vector<cd> psi = psi0, next(nx), mid(nx), rhs(nx), dlo(nx), dmid(nx), dhi(nx);
  std::vector<cd> cp(nx), dp(nx);

  const cd idt = I1 / dt;
  const double ih2 = 1.0 / (dx * dx);
  auto mass = [&](const std::vector<cd>& v) {
    double m = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
      m += std::norm(v[i]) * ((i == 0 || i + 1 == v.size()) ? 0.5 : 1.0);
    return m * dx;
  };
  const double m0 = mass(psi);
  double worst_drift = 0.0;

  for (std::size_t n = 0; n < nt; ++n) {
    const double t1 = (double)(n + 1) * dt;
    next = psi;
    next[0] = left_bc(t1);
    next[nx - 1] = cd{0.0, 0.0};
    for (int it = 0; it < cubic_iterations; ++it) {
      for (std::size_t i = 0; i < nx; ++i) mid[i] = 0.5 * (psi[i] + next[i]);
      // (i/dt) next + (1/2) D2 next = (i/dt) psi - (1/2) D2 psi + 2 g |mid|^2 mid
      for (std::size_t i = 1; i + 1 < nx; ++i) {
        const cd d2psi = (psi[i + 1] - 2.0 * psi[i] + psi[i - 1]) * ih2;
        rhs[i] = idt * psi[i] - 0.5 * d2psi + 2.0 * g * std::norm(mid[i]) * mid[i];
        dlo[i] = 0.5 * ih2;
        dmid[i] = idt - ih2;
        dhi[i] = 0.5 * ih2;
      }
      dmid[0] = 1.0;
      dhi[0] = 0.0;
      rhs[0] = next[0];
      dlo[nx - 1] = 0.0;
      dmid[nx - 1] = 1.0;
      rhs[nx - 1] = cd{0.0, 0.0};
      cp[0] = dhi[0] / dmid[0];
      dp[0] = rhs[0] / dmid[0];
      for (std::size_t i = 1; i < nx; ++i) {
        const cd denom = dmid[i] - dlo[i] * cp[i - 1];
        cp[i] = (i + 1 < nx ? dhi[i] : cd{0.0, 0.0}) / denom;
        dp[i] = (rhs[i] - dlo[i] * dp[i - 1]) / denom;
      }
      next[nx - 1] = dp[nx - 1];
      for (std::size_t i = nx - 1; i >= 1; --i) next[i - 1] = dp[i - 1] - cp[i - 1] * next[i];
    }
    double peak = 0.0;
    for (const cd& v : next) peak = std::max(peak, std::abs(v));
    if (peak > blowup)
      throw NumericError("evolve_nls: field blew up at t = " + std::to_string(t1));
    psi = next;
    out.push_back(psi);
    worst_drift = std::max(worst_drift, std::abs(mass(psi) - m0));
  }
  if (drift) *drift = worst_drift;
  return out;
}

PDEField assemble_field(std::vector<double> xgrid, std::vector<double> tgrid,
                        std::vector<std::vector<std::vector<cd>>> field, std::size_t vertex) {
  PDEField f;
  f.xgrid = std::move(xgrid);
  f.tgrid = std::move(tgrid);
  f.field = std::move(field);
  f.vertex_index = vertex;
  const std::size_t nedges = f.field.size();
  const std::size_t nt = f.tgrid.size();
  const double dx = f.xgrid[1] - f.xgrid[0];
  std::vector<std::vector<cd>> h0(nedges, std::vector<cd>(nt));
  std::vector<std::vector<cd>> h1(nedges, std::vector<cd>(nt));
  for (std::size_t e = 0; e < nedges; ++e) {
    for (std::size_t n = 0; n < nt; ++n) {
      const auto& row = f.field[e][n];
      h0[e][n] = row[vertex];
      if (vertex == 0)
        h1[e][n] = (-3.0 * row[0] + 4.0 * row[1] - row[2]) / (2.0 * dx);
      else
        h1[e][n] = (row[vertex + 1] - row[vertex - 1]) / (2.0 * dx);
    }
  }
  f.H0 = SampledFunction(f.tgrid, std::move(h0), false);
  f.H1 = SampledFunction(f.tgrid, std::move(h1), false);
  return f;
}

}  // namespace

SampledFunction PDEField::slice(double t) const {
  const double dt = tgrid[1] - tgrid[0];
  const std::size_t it =
      std::min(tgrid.size() - 1, (std::size_t)std::llround((t - tgrid[0]) / dt));
  std::vector<std::vector<cd>> vals(field.size());
  for (std::size_t e = 0; e < field.size(); ++e) vals[e] = field[e][it];
  return SampledFunction(xgrid, std::move(vals), true);
}

PDEField evolve_nls(const SampledFunction& Q0, const std::optional<SampledFunction>& H0, double L,
                    double T, double g, const EvolveParams& params) {
  if (params.dx <= 0.0 || params.dt <= 0.0)
    throw ValidationError("evolve_nls: dx and dt must be positive");
  std::size_t nx = (std::size_t)std::llround(L / params.dx) + 1;
  if (nx % 2 == 0) ++nx;
  std::size_t nt = (std::size_t)std::llround(T / params.dt);
  if (nt % 2 == 1) ++nt;
  const double dx = L / (double)(nx - 1);
  const double dt = T / (double)nt;
  const std::size_t nedges = Q0.edges();

  auto run_all = [&](double fdx, double fdt, std::size_t fnx, std::size_t fnt,
                     double* drift) -> std::vector<std::vector<std::vector<cd>>> {
    std::vector<std::vector<std::vector<cd>>> fld(nedges);
    double worst = 0.0;
    std::mutex mtx;
    parallel_for(
        nedges,
        [&](std::size_t e) {
          std::vector<cd> psi0(fnx);
          for (std::size_t i = 0; i < fnx; ++i) psi0[i] = Q0.eval(e, fdx * (double)i);
          EdgeFn bc;
          if (H0)
            bc = H0->edge_fn(e);
          else {
            const cd frozen = Q0.eval(e, 0.0);
            bc = [frozen](double) { return frozen; };
          }
          double d = 0.0;
          auto r = cn_run(psi0, bc, fdx, fdt, fnt, g, params.cubic_iterations,
                          params.blowup_threshold, &d);
          std::lock_guard<std::mutex> lock(mtx);
          fld[e] = std::move(r);
          worst = std::max(worst, d);
        },
        params.threads);
    if (drift) *drift = worst;
    return fld;
  };

  double drift = 0.0;
  auto fld = run_all(dx, dt, nx, nt, &drift);
  PDEField f = assemble_field(uniform_points(nx, 0.0, L), uniform_points(nt + 1, 0.0, T),
                              std::move(fld), 0);
  f.mass_drift = drift;

  if (params.estimate_error) {
    const std::size_t cnx = (nx - 1) / 2 + 1, cnt = nt / 2;
    auto coarse = run_all(2.0 * dx, 2.0 * dt, cnx, cnt, nullptr);
    double diff = 0.0;
    for (std::size_t e = 0; e < nedges; ++e)
      for (std::size_t n = 0; n <= cnt; ++n)
        for (std::size_t i = 0; i < cnx; ++i)
          diff = std::max(diff, std::abs(coarse[e][n][i] - f.field[e][2 * n][2 * i]));
    f.error_estimate = diff / 3.0;
  }
  return f;
}

PDEField evolve_nls_fullline(const SampledFunction& u0, double L, double T, double g,
                             const EvolveParams& params) {
  if (u0.edges() != 1) throw ValidationError("evolve_nls_fullline: one edge expected");
  std::size_t half = (std::size_t)std::llround(L / params.dx);
  if (half % 2 == 1) ++half;
  const std::size_t nx = 2 * half + 1;
  std::size_t nt = (std::size_t)std::llround(T / params.dt);
  if (nt % 2 == 1) ++nt;
  const double dx = L / (double)half;
  const double dt = T / (double)nt;

  auto run = [&](double fdx, double fdt, std::size_t fnx, std::size_t fnt) {
    std::vector<cd> psi0(fnx);
    for (std::size_t i = 0; i < fnx; ++i) psi0[i] = u0.eval(0, -L + fdx * (double)i);
    auto zero_bc = [](double) { return cd{0.0, 0.0}; };
    double d = 0.0;
    return cn_run(psi0, zero_bc, fdx, fdt, fnt, g, params.cubic_iterations,
                  params.blowup_threshold, &d);
  };

  std::vector<std::vector<std::vector<cd>>> fld(1);
  fld[0] = run(dx, dt, nx, nt);
  PDEField f = assemble_field(uniform_points(nx, -L, L), uniform_points(nt + 1, 0.0, T),
                              std::move(fld), half);

  if (params.estimate_error) {
    const std::size_t chalf = half / 2, cnt = nt / 2;
    auto coarse = run(2.0 * dx, 2.0 * dt, 2 * chalf + 1, cnt);
    double diff = 0.0;
    for (std::size_t n = 0; n <= cnt; ++n)
      for (std::size_t i = 0; i < 2 * chalf + 1; ++i)
        diff = std::max(diff, std::abs(coarse[n][i] - f.field[0][2 * n][2 * i]));
    f.error_estimate = diff / 3.0;
  }
  return f;
}

namespace {

// Filon quadrature of int_a^b e^{mu s} f(s) ds on uniform panels, linear
// f-model from the two Gauss samples per panel.
cd filon_integral(cd mu, double a, double b, const std::function<cd(double)>& f,
                  std::size_t panels) {
  cd acc{0.0, 0.0};
  const double h = (b - a) / (double)panels;
  if (h == 0.0) return acc;
  for (std::size_t p = 0; p < panels; ++p) {
    const double s0 = a + (double)p * h;
    const double c1 = s0 + h * (0.5 - 0.28867513459481287);
    const double c2 = s0 + h * (0.5 + 0.28867513459481287);
    const cd f1 = f(c1), f2 = f(c2);
    const cd fm = 0.5 * (f1 + f2);
    const cd slope = (f2 - f1) * (std::sqrt(3.0) / h);
    cd i0, i1;
    phase_moments(mu, h, i0, i1);
    acc += std::exp(mu * s0) * (fm * i0 + slope * i1);
  }
  return acc;
}

struct HalflineSpectrumCache {
  std::vector<double> kgrid;
  std::map<double, std::vector<std::vector<cd>>> per_t;  // t -> [edge][ik]
  std::mutex mtx;
};

}  // namespace

LinearSolution linear_halfline(const SampledFunction& Q0, const std::vector<EdgeFn>& h0,
                               const std::vector<EdgeFn>& h1, double kmax, std::size_t nk,
                               std::size_t nt_quad) {
  if (h0.size() != Q0.edges() || h1.size() != Q0.edges())
    throw ValidationError("linear_halfline: edge count mismatch");
  if (nk % 2 == 0) ++nk;  // Simpson wants an odd node count
  const std::size_t nedges = Q0.edges();
  const double L = Q0.hi();

  LinearSolution sol;
  sol.full_line = false;
  sol.kmax = kmax;
  sol.nk = nk;

  auto cache = std::make_shared<HalflineSpectrumCache>();
  cache->kgrid = uniform_points(nk, -kmax, kmax);

  std::vector<EdgeFn> q0fn;
  for (std::size_t e = 0; e < nedges; ++e) q0fn.push_back(Q0.edge_fn(e));
  auto q0hat_at = [q0fn, L](std::size_t e, double k) {
    return filon_integral(I1 * k, 0.0, L, q0fn[e], 1024);
  };
  for (std::size_t e = 0; e < nedges; ++e)
    sol.q0hat.push_back([q0hat_at, e](double k) { return q0hat_at(e, k); });

  // Qhat(k,t) = e^{-ik^2 t}[Qhat(k,0) - int_0^t e^{ik^2 tau}(i H1 + k H0) dtau]
  auto spectrum_for = [cache, q0hat_at, h0, h1, nedges,
                       nt_quad](double t) -> const std::vector<std::vector<cd>>& {
    std::lock_guard<std::mutex> lock(cache->mtx);
    auto it = cache->per_t.find(t);
    if (it != cache->per_t.end()) return it->second;
    std::vector<std::vector<cd>> spec(nedges, std::vector<cd>(cache->kgrid.size()));
    for (std::size_t e = 0; e < nedges; ++e) {
      const EdgeFn f0 = h0[e], f1 = h1[e];
      for (std::size_t ik = 0; ik < cache->kgrid.size(); ++ik) {
        const double k = cache->kgrid[ik];
        const cd ph = std::exp(-I1 * k * k * t);
        cd bnd{0.0, 0.0};
        if (t > 0.0) {
          auto integrand = [&](double tau) { return I1 * f1(tau) + k * f0(tau); };
          bnd = filon_integral(I1 * k * k, 0.0, t, integrand, std::max<std::size_t>(64, nt_quad));
        }
        spec[e][ik] = ph * (q0hat_at(e, k) - bnd);
      }
    }
    auto [pos, ok] = cache->per_t.emplace(t, std::move(spec));
    (void)ok;
    return pos->second;
  };

  for (std::size_t e = 0; e < nedges; ++e) {
    // The spectrum carries slow tails i H0(t)/k - H1(t)/k^2 because the field
    // does not vanish at the vertex; subtract their mollified versions and add
    // the closed-form inverse (e^{-x} kernels) back.
    auto core = [cache, spectrum_for, h0, h1, e](double x, double t, bool deriv) {
      const auto& spec = spectrum_for(t)[e];
      const auto& kg = cache->kgrid;
      const double dk = kg[1] - kg[0];
      const cd a0 = h0[e](t), a1 = h1[e](t);
      cd acc{0.0, 0.0};
      for (std::size_t ik = 0; ik < kg.size(); ++ik) {
        const double k = kg[ik];
        const cd model = (I1 * a0 * k - a1) / (k * k + 1.0);
        const double w = (ik == 0 || ik + 1 == kg.size()) ? 1.0 : (ik % 2 ? 4.0 : 2.0);
        cd term = (spec[ik] - model) * std::exp(-I1 * k * x);
        if (deriv) term *= -I1 * k;
        acc += w * term;
      }
      acc *= dk / 3.0 / (2.0 * M_PI);
      const cd kernel = 0.5 * std::exp(-x) * (a0 - a1);
      return deriv ? acc - kernel : acc + kernel;
    };
    sol.eval.push_back([core](double x, double t) { return core(x, t, false); });
    sol.deriv.push_back([core](double x, double t) { return core(x, t, true); });
  }
  return sol;
}

LinearSolution linear_fullline(const SampledFunction& u0, double kmax, std::size_t nk) {
  if (u0.edges() != 1) throw ValidationError("linear_fullline: one edge expected");
  if (nk % 2 == 0) ++nk;
  LinearSolution sol;
  sol.full_line = true;
  sol.kmax = kmax;
  sol.nk = nk;

  const double lo = u0.lo(), hi = u0.hi();
  const EdgeFn f = u0.edge_fn(0);
  auto kgrid = std::make_shared<std::vector<double>>(uniform_points(nk, -kmax, kmax));
  auto spec = std::make_shared<std::vector<cd>>(nk);
  for (std::size_t ik = 0; ik < nk; ++ik)
    (*spec)[ik] = filon_integral(I1 * (*kgrid)[ik], lo, hi, f, 2048);

  sol.q0hat.push_back(
      [lo, hi, f](double k) { return filon_integral(I1 * k, lo, hi, f, 2048); });
  auto make = [kgrid, spec](bool deriv) {
    return [kgrid, spec, deriv](double x, double t) {
      const double dk = (*kgrid)[1] - (*kgrid)[0];
      cd acc{0.0, 0.0};
      for (std::size_t ik = 0; ik < kgrid->size(); ++ik) {
        const double k = (*kgrid)[ik];
        const double w = (ik == 0 || ik + 1 == kgrid->size()) ? 1.0 : (ik % 2 ? 4.0 : 2.0);
        cd term = (*spec)[ik] * std::exp(-I1 * (k * x + k * k * t));
        if (deriv) term *= -I1 * k;
        acc += w * term;
      }
      return acc * (dk / 3.0 / (2.0 * M_PI));
    };
  };
  sol.eval.push_back(make(false));
  sol.deriv.push_back(make(true));
  return sol;
}

}  // namespace nlsg
