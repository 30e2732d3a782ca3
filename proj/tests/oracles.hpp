// Test-only independent oracles: closed forms and plain quadrature only,
// deliberately avoiding the library's integration paths.
#ifndef NLSG_TESTS_ORACLES_HPP
#define NLSG_TESTS_ORACLES_HPP

#include <cmath>
#include <complex>
#include <functional>

#include <Eigen/Dense>

namespace testor {

using cd = std::complex<double>;
constexpr cd J{0.0, 1.0};

// exp(M) for 2x2 by scaling-and-squaring on the plain Taylor series.
inline Eigen::Matrix2cd expm_series(Eigen::Matrix2cd m) {
  int s = 0;
  double nrm = m.cwiseAbs().maxCoeff();
  while (nrm > 0.25) {
    nrm /= 2.0;
    ++s;
  }
  m /= std::pow(2.0, s);
  Eigen::Matrix2cd r = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd term = Eigen::Matrix2cd::Identity();
  for (int n = 1; n <= 24; ++n) {
    term = (term * m) / (double)n;
    r += term;
  }
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}

// Half-line box potential q0 = c on [0, l]: phi(0) = exp(-M l) (0,1)^T
// with M = [[-2ik, c], [g conj(c), 0]]; a = lower, b = upper component.
inline void box_scatter(cd c, double l, double g, cd k, cd& a, cd& b) {
  Eigen::Matrix2cd m;
  m << -2.0 * J * k, c, g * std::conj(c), cd{0.0, 0.0};
  const Eigen::Matrix2cd e = expm_series(Eigen::Matrix2cd(-l * m));
  b = e(0, 1);
  a = e(1, 1);
}

// Constant boundary data h0, h1 on [0, T]: Phi(0) = exp(-M T) (0,1)^T with
// M = [[-4ik^2 - i g |h0|^2, 2 k h0 + i h1], [g(2 k conj(h0) - i conj(h1)), i g |h0|^2]].
inline void const_tscatter(cd h0, cd h1, double T, double g, cd k, cd& A, cd& B) {
  Eigen::Matrix2cd m;
  const cd mod = J * g * h0 * std::conj(h0);
  m << -4.0 * J * k * k - mod, 2.0 * k * h0 + J * h1, g * (2.0 * k * std::conj(h0) - J * std::conj(h1)),
      mod;
  const Eigen::Matrix2cd e = expm_series(Eigen::Matrix2cd(-T * m));
  B = e(0, 1);
  A = e(1, 1);
}

// Free full-line evolution of a Gaussian A e^{-(x-x0)^2/w^2} under i u_t + u_xx = 0.
inline cd gaussian_free_evolution(cd amp, double w, double x0, double x, double t) {
  const cd denom = w * w + 4.0 * J * t;
  return amp * w / std::sqrt(denom) * std::exp(-(x - x0) * (x - x0) / denom);
}

// Bound-state count for the half-line box with g = -1: zeros of
// a(k) = e^{ikl} [cos(rho l) - i k sin(rho l)/rho], rho = sqrt(|c|^2 + k^2),
// on the positive imaginary axis k = iy solve tan(l rho) = -rho / y,
// rho = sqrt(|c|^2 - y^2). Bisection on (0, |c|).
inline int box_bound_states(double c, double l, double* root_out = nullptr) {
  auto f = [&](double y) {
    const double rho = std::sqrt(std::max(0.0, c * c - y * y));
    return std::cos(l * rho) * rho + y * std::sin(l * rho);
  };
  // count sign changes on a fine grid
  int count = 0;
  const int n = 20000;
  double prev = f(1e-9), prev_y = 1e-9, root = -1.0;
  for (int i = 1; i <= n; ++i) {
    const double y = (double)i / (double)(n + 1) * c;
    const double cur = f(y);
    if (prev != 0.0 && cur != 0.0 && ((prev < 0.0) != (cur < 0.0))) {
      ++count;
      double lo = prev_y, hi = y;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((f(lo) < 0.0) != (f(mid) < 0.0))
          hi = mid;
        else
          lo = mid;
      }
      root = 0.5 * (lo + hi);
    }
    prev = cur;
    prev_y = y;
  }
  if (root_out && root > 0.0) *root_out = root;
  return count;
}

}  // namespace testor

#endif
