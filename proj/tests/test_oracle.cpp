#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlsg/oracle.hpp"
#include "nlsg/sampled.hpp"
#include "oracles.hpp"

using namespace nlsg;

namespace {

SampledFunction gaussian_data(cd amp, double w, double x0, double lo, double hi, std::size_t n) {
  Profile p;
  p.kind = "gaussian";
  p.amplitude = amp;
  p.width = w;
  p.center = x0;
  return sample_profiles({p}, lo, hi, n);
}

}  // namespace

TEST_CASE("zero data stays zero") {
  Profile z;
  const auto Q0 = sample_profiles({z, z}, 0.0, 10.0, 101);
  EvolveParams ep;
  ep.dx = 0.1;
  ep.dt = 0.05;
  ep.estimate_error = false;
  const auto f = evolve_nls(Q0, std::nullopt, 10.0, 0.5, 1.0, ep);
  double peak = 0.0;
  for (std::size_t e = 0; e < 2; ++e)
    for (const auto& row : f.field[e])
      for (const cd& v : row) peak = std::max(peak, std::abs(v));
  CHECK(peak == 0.0);
  CHECK(f.H1.max_abs() == 0.0);
}

TEST_CASE("full-line linear solver matches the closed-form Gaussian evolution") {
  const auto u0 = gaussian_data(cd{0.3, 0.1}, 1.2, 0.5, -14.0, 14.0, 201);
  const auto sol = linear_fullline(u0, 20.0, 4001);
  for (double t : {0.0, 0.4, 1.5}) {
    for (double x : {-2.0, 0.0, 0.7, 3.0}) {
      const cd ref = testor::gaussian_free_evolution(cd{0.3, 0.1}, 1.2, 0.5, x, t);
      CHECK(std::abs(sol.value(0, x, t) - ref) < 2e-9);
    }
  }
}

TEST_CASE("half-line linear solver: t = 0 round trip and consistency with the full line") {
  // transparent situation: half-line data = restriction of the free evolution
  const cd amp{0.25, 0.0};
  const double w = 1.1, x0 = 1.0;
  const auto Q0 = gaussian_data(amp, w, x0, 0.0, 14.0, 201);
  std::vector<EdgeFn> h0 = {[&](double t) { return testor::gaussian_free_evolution(amp, w, x0, 0.0, t); }};
  std::vector<EdgeFn> h1 = {[&](double t) {
    const double h = 1e-5;
    return (testor::gaussian_free_evolution(amp, w, x0, h, t) -
            testor::gaussian_free_evolution(amp, w, x0, -h, t)) /
           (2.0 * h);
  }};
  const auto sol = linear_halfline(Q0, h0, h1, 40.0, 16001, 256);
  for (double x : {0.3, 1.0, 2.5}) {
    CHECK(std::abs(sol.value(0, x, 0.0) - Q0.eval(0, x)) < 2e-6);
  }
  for (double t : {0.3, 1.0}) {
    for (double x : {0.2, 0.8, 2.0}) {
      const cd ref = testor::gaussian_free_evolution(amp, w, x0, x, t);
      CHECK(std::abs(sol.value(0, x, t) - ref) < 5e-6);
      const double h = 1e-5;
      const cd refdx = (testor::gaussian_free_evolution(amp, w, x0, x + h, t) -
                        testor::gaussian_free_evolution(amp, w, x0, x - h, t)) /
                       (2.0 * h);
      // the differentiated spectrum decays one power slower; ~1e-4 is the
      // honest truncation level at kmax = 40
      CHECK(std::abs(sol.dx_value(0, x, t) - refdx) < 5e-4);
    }
  }
}

TEST_CASE("Crank-Nicolson matches the linear solution at g = 0, second order") {
  const cd amp{0.3, 0.0};
  const double w = 1.0, x0 = 4.0, L = 16.0, T = 0.48;  // all grids divide evenly
  const auto Q0 = gaussian_data(amp, w, x0, 0.0, L, 321);
  std::vector<EdgeFn> bc = {[&](double t) { return testor::gaussian_free_evolution(amp, w, x0, 0.0, t); }};
  const auto H0 = SampledFunction::from_callables(bc, 0.0, T, 201, false);

  auto field_err = [&](double dx, double dt) {
    EvolveParams ep;
    ep.dx = dx;
    ep.dt = dt;
    ep.estimate_error = false;
    const auto f = evolve_nls(Q0, H0, L, T, 0.0, ep);
    double worst = 0.0;
    const std::size_t nt = f.tgrid.size() - 1;
    for (std::size_t i = 0; i < f.xgrid.size(); ++i) {
      const cd ref = testor::gaussian_free_evolution(amp, w, x0, f.xgrid[i], f.tgrid[nt]);
      worst = std::max(worst, std::abs(f.field[0][nt][i] - ref));
    }
    return worst;
  };
  const double e1 = field_err(0.02, 0.01);
  const double e2 = field_err(0.01, 0.005);
  CHECK(e2 < 1e-4);
  const double ratio = e1 / e2;
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("soliton translates at the CN scheme accuracy (g = -1)") {
  // one-soliton of i q_t + q_xx + 2|q|^2 q = 0: q = eta sech(eta x) e^{i eta^2 t}
  // centered away from both ends, evolved for a short time
  const double eta = 1.0, x0 = 10.0, L = 20.0, T = 0.25;
  std::vector<EdgeFn> init = {[&](double x) { return eta / std::cosh(eta * (x - x0)); }};
  const auto Q0 = SampledFunction::from_callables(init, 0.0, L, 1601, true);
  EvolveParams ep;
  ep.dx = 0.0125;
  ep.dt = 0.0025;
  const auto f = evolve_nls(Q0, std::nullopt, L, T, -1.0, ep);
  const std::size_t nt = f.tgrid.size() - 1;
  double worst = 0.0;
  for (std::size_t i = 0; i < f.xgrid.size(); i += 5) {
    const double x = f.xgrid[i];
    const cd ref = eta / std::cosh(eta * (x - x0)) * std::exp(I1 * eta * eta * T);
    worst = std::max(worst, std::abs(f.field[0][nt][i] - ref));
  }
  CHECK(worst < 5e-4);
  CHECK(f.error_estimate < 5e-4);
  CHECK(f.mass_drift < 1e-6);
}

TEST_CASE("transparent full-line run: traces satisfy g1^1 = -g1^2 by symmetry") {
  // even initial profile: u(x,t) stays even, so u_x(0,t) = 0; the two half-line
  // Neumann traces are g1^1 = u_x(0+,t), g1^2 = -u_x(0-,t) and must be opposite
  const auto u0 = gaussian_data(cd{0.2, 0.0}, 1.0, 0.0, -12.0, 12.0, 241);
  EvolveParams ep;
  ep.dx = 0.05;
  ep.dt = 0.02;
  ep.estimate_error = false;
  const auto f = evolve_nls_fullline(u0, 12.0, 0.4, 1.0, ep);
  for (std::size_t n = 0; n < f.tgrid.size(); n += 4) {
    CHECK(std::abs(f.H1.value(0, n)) < 1e-9);  // centered difference of an even field
  }
}
