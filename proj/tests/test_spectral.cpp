#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlsg/spectral.hpp"
#include "oracles.hpp"

using namespace nlsg;

namespace {

GraphProblem make_problem(std::vector<Profile> profiles, double g, double L = 12.0,
                          std::size_t npts = 481) {
  GraphProblem p;
  p.N = profiles.size();
  p.g = g;
  p.T = 1.0;
  p.Q0 = sample_profiles(profiles, 0.0, L, npts);
  p.boundary = BoundarySpec::prescribed();
  return p;
}

Profile box_profile(cd c, double l) {
  Profile p;
  p.kind = "box";
  p.amplitude = c;
  p.width = l;
  return p;
}

Profile gauss_profile(cd a, double w, double x0) {
  Profile p;
  p.kind = "gaussian";
  p.amplitude = a;
  p.width = w;
  p.center = x0;
  return p;
}

}  // namespace

TEST_CASE("zero potential: a = I, b = 0 on every contour") {
  auto prob = make_problem({Profile{}, Profile{}}, 1.0);
  const auto kg = kgrid_boundary_D1(16, 0.05, 30.0);
  const auto sd = direct_x_transform(prob, kg);
  for (std::size_t i = 0; i < kg.size(); ++i) {
    for (std::size_t e = 0; e < 2; ++e) {
      CHECK(std::abs(sd.a[i][e] - 1.0) < 1e-11);
      CHECK(std::abs(sd.b[i][e]) < 1e-11);
    }
  }
  const auto zs = find_zeros(sd.evaluator, nullptr, SearchBox{-3.0, 3.0, 1e-3, 3.0});
  CHECK(zs.total_kappa() == 0);
}

TEST_CASE("box potential closed form on the real axis") {
  const cd c{0.75, 0.2};
  const double l = 1.5, g = 1.0;
  auto prob = make_problem({box_profile(c, l)}, g);
  const auto kg = kgrid_real_axis(64, 0.02, 40.0);
  const auto sd = direct_x_transform(prob, kg);
  for (std::size_t i = 0; i < kg.size(); ++i) {
    const cd k = kg.points[i];
    cd a_ref, b_ref;
    testor::box_scatter(c, l, g, k, a_ref, b_ref);
    CHECK(std::abs(sd.a[i][0] - a_ref) < 1e-8 * std::abs(a_ref));
    CHECK(std::abs(sd.b[i][0] - b_ref) < 1e-8 * std::max(1.0, std::abs(b_ref)));
  }
  CHECK(sd.unit_det_residual() < 1e-8);
}

TEST_CASE("per-edge decoupling: silent edge keeps a = 1, b = 0; labels permute") {
  auto prob = make_problem({gauss_profile(cd{0.4, 0.1}, 1.0, 3.0), Profile{}}, -1.0);
  const auto kg = kgrid_real_axis(24, 0.1, 20.0);
  const auto sd = direct_x_transform(prob, kg);
  auto prob_sw = make_problem({Profile{}, gauss_profile(cd{0.4, 0.1}, 1.0, 3.0)}, -1.0);
  const auto sd_sw = direct_x_transform(prob_sw, kg);
  for (std::size_t i = 0; i < kg.size(); ++i) {
    CHECK(std::abs(sd.a[i][1] - 1.0) < 1e-11);
    CHECK(std::abs(sd.b[i][1]) < 1e-11);
    CHECK(std::abs(sd.a[i][0] - sd_sw.a[i][1]) < 1e-12);
    CHECK(std::abs(sd.b[i][0] - sd_sw.b[i][1]) < 1e-12);
  }
}

TEST_CASE("gaussian: unit determinant and 1/k large-k decay exponent") {
  auto prob = make_problem({gauss_profile(cd{0.5, 0.0}, 1.2, 4.0)}, 1.0);
  const auto kg = kgrid_real_axis(128, 0.05, 40.0);
  const auto sd = direct_x_transform(prob, kg);
  CHECK(sd.unit_det_residual() < 1e-8);

  // fit log|b| vs log k on the top decade of positive k
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < kg.size(); ++i) {
    const double k = kg.points[i].real();
    if (k > 4.0) {
      xs.push_back(std::log(k));
      ys.push_back(std::log(std::abs(sd.b[i][0])));
    }
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double n = (double)xs.size();
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(std::abs(slope + 1.0) < 0.2);
}

TEST_CASE("M_d closure: dense 2Nx2N integration vs theta split") {
  auto prob = make_problem({gauss_profile(cd{0.3, 0.1}, 1.0, 3.0),
                            gauss_profile(cd{-0.2, 0.25}, 1.4, 4.5),
                            gauss_profile(cd{0.15, -0.3}, 0.8, 2.5)},
                           1.0);
  const auto rep = verify_md_closure(prob, cd{1.0, 0.5});
  CHECK(rep.off_max < 1e-10);
  CHECK(rep.split_vs_dense < 1e-10);

  auto zero = make_problem({Profile{}, Profile{}}, 1.0);
  const auto rep0 = verify_md_closure(zero, cd{0.7, 0.2});
  CHECK(rep0.off_max == 0.0);
}

TEST_CASE("sech asymptotics: a1 = ig/2, b1 = -i/2 q0(0)") {
  // q0 = sech(x): int_0^inf sech^2 = 1, q0(0) = 1
  Profile s;
  s.kind = "sech";
  s.amplitude = cd{1.0, 0.0};
  s.width = 1.0;
  s.center = 0.0;
  auto prob = make_problem({s}, 1.0, 16.0, 641);
  const auto kg = kgrid_real_axis(96, 0.05, 60.0);
  const auto sd = direct_x_transform(prob, kg);
  const auto rep = asymptotic_coefficients(sd);
  const cd a1_expect{0.0, 0.5};   // ig/2 * 1
  const cd b1_expect{0.0, -0.5};  // -(i/2) q0(0)
  CHECK(std::abs(rep.a1_fit[0] - a1_expect) < 0.01 * std::abs(a1_expect));
  CHECK(std::abs(rep.b1_fit[0] - b1_expect) < 0.01 * std::abs(b1_expect));
  CHECK(std::abs(rep.a1_quad[0] - a1_expect) < 1e-6);
  CHECK(std::abs(rep.b1_quad[0] - b1_expect) < 1e-12);

  // zero data: both coefficients vanish
  auto zero = make_problem({Profile{}}, 1.0);
  const auto sdz = direct_x_transform(zero, kg);
  const auto repz = asymptotic_coefficients(sdz);
  CHECK(std::abs(repz.a1_fit[0]) < 1e-8);
  CHECK(std::abs(repz.b1_fit[0]) < 1e-8);

  // too-small grid maximum is a precondition error
  const auto kg_small = kgrid_real_axis(16, 0.05, 5.0);
  const auto sd_small = direct_x_transform(prob, kg_small);
  CHECK_THROWS_AS(asymptotic_coefficients(sd_small), ValidationError);
}

TEST_CASE("find_zeros: box potential bound states at g = -1") {
  // threshold |c| l = pi/2; below: no zeros, above: one on the imaginary axis
  const double l = 1.0;
  SearchBox box{-2.5, 2.5, 5e-3, 2.5};

  auto below = make_problem({box_profile(cd{1.2, 0.0}, l)}, -1.0);
  const auto sd_b = direct_x_transform(below, kgrid_real_axis(8, 0.1, 10.0));
  const auto zs_b = find_zeros(sd_b.evaluator, nullptr, box);
  CHECK(zs_b.total_kappa() == 0);
  // grid-minimum oracle: |a| stays away from zero over the searched region
  double amin = 1e9;
  for (double re = -2.4; re <= 2.4; re += 0.12)
    for (double im = 0.02; im <= 2.4; im += 0.12)
      amin = std::min(amin, std::abs(sd_b.evaluator.a_edge(0, cd{re, im})));
  CHECK(amin > 0.05);

  auto above = make_problem({box_profile(cd{2.0, 0.0}, l)}, -1.0);
  const auto sd_a = direct_x_transform(above, kgrid_real_axis(8, 0.1, 10.0));
  const auto zs_a = find_zeros(sd_a.evaluator, nullptr, box);
  CHECK(zs_a.total_kappa() >= 1);
  double root = 0.0;
  const int count = testor::box_bound_states(2.0, l, &root);
  CHECK(count == (int)zs_a.total_kappa());
  REQUIRE(zs_a.kappa[0].size() >= 1);
  const auto& z = zs_a.kappa[0][0];
  CHECK(std::abs(z.k.real()) < 1e-7);
  CHECK(std::abs(z.k.imag() - root) < 1e-6);
  CHECK(z.on_boundary);  // purely imaginary zero sits on the D1/D2 boundary
  CHECK_FALSE(zs_a.clean());
}

TEST_CASE("t-transform: zero data, constant closed form, decoupling") {
  const double T = 1.5, g = -1.0;
  const auto kg = kgrid_real_axis(12, 0.1, 8.0);

  std::vector<EdgeFn> z2 = {[](double) { return cd{0.0, 0.0}; }, [](double) { return cd{0.0, 0.0}; }};
  const auto bs0 = direct_t_transform(z2, z2, T, g, 2, kg);
  for (std::size_t i = 0; i < kg.size(); ++i) {
    CHECK(std::abs(bs0.A[i][0] - 1.0) < 1e-11);
    CHECK(std::abs(bs0.B[i][0]) < 1e-11);
  }

  const cd h0c{0.25, -0.15}, h1c{0.1, 0.2};
  std::vector<EdgeFn> f0 = {[h0c](double) { return h0c; }, [](double) { return cd{0.0, 0.0}; }};
  std::vector<EdgeFn> f1 = {[h1c](double) { return h1c; }, [](double) { return cd{0.0, 0.0}; }};
  const auto bs = direct_t_transform(f0, f1, T, g, 2, kg);
  for (std::size_t i = 0; i < kg.size(); ++i) {
    cd A_ref, B_ref;
    testor::const_tscatter(h0c, h1c, T, g, kg.points[i], A_ref, B_ref);
    CHECK(std::abs(bs.A[i][0] - A_ref) < 1e-8 * std::max(1.0, std::abs(A_ref)));
    CHECK(std::abs(bs.B[i][0] - B_ref) < 1e-8 * std::max(1.0, std::abs(B_ref)));
    CHECK(std::abs(bs.A[i][1] - 1.0) < 1e-11);  // silent edge decouples
    CHECK(std::abs(bs.B[i][1]) < 1e-11);
  }
  CHECK(bs.unit_det_residual() < 1e-8);
}

TEST_CASE("all-time table: horizon slices match separate backward runs") {
  const double T = 2.0, g = 1.0;
  std::vector<EdgeFn> f0 = {[](double t) { return cd{0.2, 0.0} * std::exp(-0.5 * t); }};
  std::vector<EdgeFn> f1 = {[](double t) { return cd{0.0, 0.1} * std::cos(t); }};
  Kgrid kg;
  kg.contour = Contour::RealAxis;
  kg.points = {cd{0.6, 0.0}, cd{2.2, 0.0}, cd{0.0, 1.1}};
  TParams tp;
  tp.want_all_time = true;
  tp.all_time_nodes = 9;
  const auto bs = direct_t_transform(f0, f1, T, g, 1, kg, tp);
  REQUIRE(bs.all_time.has_value());
  const auto& tab = *bs.all_time;
  // A(t*,k) = conj(Phi2(t*, conj(k))), B(t*,k) = -Phi1(t*,k) e^{4ik^2 t*}
  for (std::size_t ik = 0; ik < kg.size(); ++ik) {
    for (std::size_t jt = 2; jt < tab.tgrid.size(); jt += 3) {
      const double tstar = tab.tgrid[jt];
      const auto bs_cut = direct_t_transform(f0, f1, tstar, g, 1, kg);
      // at real k the conj(k) sample is the same grid point
      if (std::abs(kg.points[ik].imag()) > 1e-14) continue;
      const cd k = kg.points[ik];
      const cd A_slice = std::conj(tab.phi2[ik][jt][0]);
      const cd B_slice = -tab.phi1[ik][jt][0] * std::exp(4.0 * I1 * k * k * tstar);
      CHECK(std::abs(bs_cut.A[ik][0] - A_slice) < 1e-8);
      CHECK(std::abs(bs_cut.B[ik][0] - B_slice) < 1e-8);
    }
  }
}
