#include "nlsg/blockmat.hpp"

#include <cmath>

namespace nlsg {

static std::size_t half_dim(const MatX& m) {
  if (m.rows() != m.cols()) throw ValidationError("project: matrix not square");
  if (m.rows() % 2 != 0) throw ValidationError("project: dimension not even");
  return (std::size_t)(m.rows() / 2);
}

BlockDiag project_d(const MatX& m) {
  const std::size_t n = half_dim(m);
  BlockDiag b{DiagMat(n), DiagMat(n), DiagMat(n), DiagMat(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Index ii = (Eigen::Index)i, nn = (Eigen::Index)n;
    b.m11[i] = m(ii, ii);
    b.m12[i] = m(ii, ii + nn);
    b.m21[i] = m(ii + nn, ii);
    b.m22[i] = m(ii + nn, ii + nn);
  }
  return b;
}

MatX project_a(const MatX& m) {
  const std::size_t n = half_dim(m);
  MatX r = m;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Index ii = (Eigen::Index)i, nn = (Eigen::Index)n;
    r(ii, ii) = r(ii, ii + nn) = r(ii + nn, ii) = r(ii + nn, ii + nn) = cd{0.0, 0.0};
  }
  return r;
}

BlockDiag theta(const std::vector<Mat2>& mats) {
  if (mats.empty()) throw ValidationError("theta: empty tuple");
  const std::size_t n = mats.size();
  BlockDiag b{DiagMat(n), DiagMat(n), DiagMat(n), DiagMat(n)};
  for (std::size_t i = 0; i < n; ++i) {
    b.m11[i] = mats[i](0, 0);
    b.m12[i] = mats[i](0, 1);
    b.m21[i] = mats[i](1, 0);
    b.m22[i] = mats[i](1, 1);
  }
  return b;
}

std::vector<Mat2> theta_inv(const BlockDiag& b) {
  std::vector<Mat2> mats(b.edges());
  for (std::size_t i = 0; i < b.edges(); ++i) {
    mats[i] << b.m11[i], b.m12[i], b.m21[i], b.m22[i];
  }
  return mats;
}

Mat2 sigma3_2() {
  Mat2 s;
  s << 1, 0, 0, -1;
  return s;
}

Mat2 sigma_swap() {
  Mat2 s;
  s << 0, 1, 1, 0;
  return s;
}

MatX Sigma3(std::size_t n) {
  MatX s = MatX::Identity(2 * (Eigen::Index)n, 2 * (Eigen::Index)n);
  for (Eigen::Index i = 0; i < (Eigen::Index)n; ++i) s(i + (Eigen::Index)n, i + (Eigen::Index)n) = -1;
  return s;
}

MatX SigmaSwap(std::size_t n) {
  if (n != 2) throw ValidationError("SigmaSwap: defined for N = 2");
  MatX s = MatX::Zero(4, 4);
  s(0, 1) = s(1, 0) = s(2, 3) = s(3, 2) = 1;
  return s;
}

MatX I3_mat() {
  MatX s = MatX::Identity(4, 4);
  s(1, 1) = -1;
  return s;
}

MatX cyclic_K(std::size_t n) {
  MatX k = MatX::Zero((Eigen::Index)n, (Eigen::Index)n);
  for (std::size_t i = 0; i < n; ++i) k((Eigen::Index)i, (Eigen::Index)((i + 1) % n)) = 1;
  return k;
}

MatX ones_J(std::size_t n) { return MatX::Ones((Eigen::Index)n, (Eigen::Index)n); }

cd omega_root(std::size_t n) {
  const double t = 2.0 * M_PI / (double)n;
  return cd{std::cos(t), std::sin(t)};
}

std::vector<DiagMat> k_decompose(const MatX& m) {
  if (m.rows() != m.cols()) throw ValidationError("k_decompose: matrix not square");
  const std::size_t n = (std::size_t)m.rows();
  // (M_j)_{ii} = M_{i, i+j mod N}: each diagonal of M wraps onto one power of K.
  std::vector<DiagMat> parts(n, DiagMat(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) parts[j][i] = m((Eigen::Index)i, (Eigen::Index)((i + j) % n));
  return parts;
}

MatX k_recompose(const std::vector<DiagMat>& parts) {
  if (parts.empty()) throw ValidationError("k_recompose: empty decomposition");
  const std::size_t n = parts.size();
  MatX m = MatX::Zero((Eigen::Index)n, (Eigen::Index)n);
  for (std::size_t j = 0; j < n; ++j) {
    if (parts[j].size() != n) throw ValidationError("k_recompose: inconsistent sizes");
    for (std::size_t i = 0; i < n; ++i) m((Eigen::Index)i, (Eigen::Index)((i + j) % n)) += parts[j][i];
  }
  return m;
}

DiagMat hat_apply(const MatX& m, const DiagMat& d) {
  if ((std::size_t)m.rows() != d.size()) throw ValidationError("hat_apply: shape mismatch");
  const std::size_t n = d.size();
  const auto parts = k_decompose(m);
  // K^j D K^{-j} shifts the diagonal: entry i picks up d_{i+j mod N}.
  DiagMat r(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) r[i] += parts[j][i] * d[(i + j) % n];
  return r;
}

bool is_circulant(const MatX& m, double tol) {
  if (m.rows() != m.cols()) throw ValidationError("is_circulant: matrix not square");
  const MatX k = cyclic_K((std::size_t)m.rows());
  const MatX comm = m * k - k * m;
  return comm.cwiseAbs().maxCoeff() <= tol;
}

}  // namespace nlsg
