#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nlsg/blockmat.hpp"
#include "nlsg/problem.hpp"

using namespace nlsg;

namespace {

MatX random_matrix(std::size_t n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatX m((Eigen::Index)n, (Eigen::Index)n);
  for (Eigen::Index i = 0; i < (Eigen::Index)n; ++i)
    for (Eigen::Index j = 0; j < (Eigen::Index)n; ++j) m(i, j) = cd{u(rng), u(rng)};
  return m;
}

Mat2 random_mat2(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat2 m;
  m << cd{u(rng), u(rng)}, cd{u(rng), u(rng)}, cd{u(rng), u(rng)}, cd{u(rng), u(rng)};
  return m;
}

}  // namespace

TEST_CASE("project_d of the identity") {
  const MatX id = MatX::Identity(6, 6);
  const BlockDiag b = project_d(id);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(b.m11[i] == cd{1.0, 0.0});
    CHECK(b.m22[i] == cd{1.0, 0.0});
    CHECK(b.m12[i] == cd{0.0, 0.0});
    CHECK(b.m21[i] == cd{0.0, 0.0});
  }
  CHECK(project_a(id).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pure off-diagonal-block entry lands in M_a") {
  MatX m = MatX::Zero(4, 4);
  m(0, 1) = cd{2.0, -1.0};  // row 1, column 2 at N=2
  const BlockDiag d = project_d(m);
  CHECK(d.to_dense().cwiseAbs().maxCoeff() == 0.0);
  CHECK(project_a(m) == m);
}

TEST_CASE("projections reassemble any matrix exactly") {
  std::mt19937 rng(41);
  for (int rep = 0; rep < 20; ++rep) {
    const MatX m = random_matrix(6, rng);
    const MatX re = project_d(m).to_dense() + project_a(m);
    CHECK((re - m).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("projection rejects odd dimension") {
  CHECK_THROWS_AS(project_d(MatX::Zero(3, 3)), ValidationError);
}

TEST_CASE("theta round trip and placement") {
  std::vector<Mat2> ms = {sigma3_2(), -sigma3_2()};
  const BlockDiag b = theta(ms);
  CHECK(b.m11[0] == cd{1.0, 0.0});
  CHECK(b.m11[1] == cd{-1.0, 0.0});
  CHECK(b.m22[0] == cd{-1.0, 0.0});
  CHECK(b.m22[1] == cd{1.0, 0.0});
  CHECK(b.m12.max_abs() == 0.0);
  const auto back = theta_inv(b);
  for (int i = 0; i < 2; ++i) CHECK((back[i] - ms[i]).cwiseAbs().maxCoeff() == 0.0);

  const BlockDiag idb = theta({Mat2::Identity(), Mat2::Identity(), Mat2::Identity()});
  CHECK((idb.to_dense() - MatX::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("theta is an algebra homomorphism") {
  std::mt19937 rng(7);
  for (int rep = 0; rep < 25; ++rep) {
    std::vector<Mat2> as, bs, prods;
    for (int i = 0; i < 3; ++i) {
      as.push_back(random_mat2(rng));
      bs.push_back(random_mat2(rng));
      prods.push_back(as.back() * bs.back());
    }
    const BlockDiag lhs = theta(as) * theta(bs);
    const BlockDiag rhs = theta(prods);
    CHECK((lhs.to_dense() - rhs.to_dense()).cwiseAbs().maxCoeff() < 1e-14);
    // dense-product cross-check and M_d closure
    const MatX dense = theta(as).to_dense() * theta(bs).to_dense();
    CHECK((lhs.to_dense() - dense).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(project_a(dense).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("BlockDiag inverse inverts when the 2x2 factors do") {
  std::mt19937 rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<Mat2> ms;
    for (int i = 0; i < 4; ++i) {
      Mat2 m = random_mat2(rng);
      m += 3.0 * Mat2::Identity();  // keep it invertible
      ms.push_back(m);
    }
    const BlockDiag b = theta(ms);
    const MatX prod = (b * b.inverse()).to_dense();
    CHECK((prod - MatX::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("K is unitary with K^N = I and omega^N = 1") {
  for (std::size_t n : {2u, 3u, 5u}) {
    const MatX k = cyclic_K(n);
    CHECK((k * k.adjoint() - MatX::Identity((Eigen::Index)n, (Eigen::Index)n)).cwiseAbs().maxCoeff() ==
          0.0);
    MatX p = MatX::Identity((Eigen::Index)n, (Eigen::Index)n);
    for (std::size_t j = 0; j < n; ++j) p = p * k;
    CHECK((p - MatX::Identity((Eigen::Index)n, (Eigen::Index)n)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(std::pow(omega_root(n), (double)n) - cd{1.0, 0.0}) < 1e-14);
  }
  CHECK((sigma_swap() * sigma_swap() - Mat2::Identity()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("k_decompose: identity and all-ones") {
  const auto pid = k_decompose(MatX::Identity(4, 4));
  CHECK(pid[0].max_abs() == 1.0);
  for (std::size_t j = 1; j < 4; ++j) CHECK(pid[j].max_abs() == 0.0);
  for (std::size_t i = 0; i < 4; ++i) CHECK(pid[0][i] == cd{1.0, 0.0});

  const auto pj = k_decompose(ones_J(3));
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < 3; ++i) CHECK(pj[j][i] == cd{1.0, 0.0});
}

TEST_CASE("k_decompose / k_recompose mutual inverses") {
  std::mt19937 rng(3);
  for (std::size_t n : {2u, 3u, 4u}) {
    for (int rep = 0; rep < 10; ++rep) {
      const MatX m = random_matrix(n, rng);
      CHECK((k_recompose(k_decompose(m)) - m).cwiseAbs().maxCoeff() == 0.0);
      // and against the explicit K-power sum
      MatX acc = MatX::Zero((Eigen::Index)n, (Eigen::Index)n);
      MatX kp = MatX::Identity((Eigen::Index)n, (Eigen::Index)n);
      const auto parts = k_decompose(m);
      const MatX k = cyclic_K(n);
      for (std::size_t j = 0; j < n; ++j) {
        acc += parts[j].to_dense() * kp;
        kp = kp * k;
      }
      CHECK((acc - m).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
}

TEST_CASE("hat_apply: identity, shift, linearity, dense oracle") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  DiagMat d(4);
  for (std::size_t i = 0; i < 4; ++i) d[i] = cd{u(rng), u(rng)};
  const DiagMat same = hat_apply(MatX::Identity(4, 4), d);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(same[i] - d[i]) == 0.0);

  // K D K^{-1} cyclically shifts the diagonal
  const DiagMat sh = hat_apply(cyclic_K(4), d);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(sh[i] - d[(i + 1) % 4]) == 0.0);

  for (int rep = 0; rep < 10; ++rep) {
    const MatX m = random_matrix(3, rng);
    DiagMat x(3), y(3);
    for (std::size_t i = 0; i < 3; ++i) {
      x[i] = cd{u(rng), u(rng)};
      y[i] = cd{u(rng), u(rng)};
    }
    // linearity
    const DiagMat lhs = hat_apply(m, x + y);
    const DiagMat rhs = hat_apply(m, x) + hat_apply(m, y);
    CHECK((lhs - rhs).max_abs() < 1e-14);
    // dense oracle: sum_j M_j K^j D K^{-j} by explicit matrix arithmetic
    const auto parts = k_decompose(m);
    const MatX k = cyclic_K(3);
    MatX kp = MatX::Identity(3, 3);
    MatX acc = MatX::Zero(3, 3);
    for (std::size_t j = 0; j < 3; ++j) {
      acc += parts[j].to_dense() * kp * x.to_dense() * kp.inverse();
      kp = kp * k;
    }
    const DiagMat ha = hat_apply(m, x);
    CHECK((ha.to_dense() - acc).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("is_circulant") {
  CHECK(is_circulant(cyclic_K(4), 1e-12));
  MatX d = MatX::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  CHECK_FALSE(is_circulant(d, 1e-12));
  // U = (2/(N+i alpha)) J - I at N = 3, alpha = 1
  CHECK(is_circulant(generalized_delta_U(3, 1.0), 1e-12));
}

TEST_CASE("generalized delta U is unitary; equals the swap at alpha=0, N=2") {
  for (std::size_t n : {2u, 3u, 4u}) {
    for (double al : {0.0, 0.7, -2.3}) {
      const MatX u = generalized_delta_U(n, al);
      CHECK((u * u.adjoint() - MatX::Identity((Eigen::Index)n, (Eigen::Index)n)).cwiseAbs().maxCoeff() <
            1e-12);
    }
  }
  const MatX u0 = generalized_delta_U(2, 0.0);
  MatX swap2 = MatX::Zero(2, 2);
  swap2(0, 1) = swap2(1, 0) = 1.0;
  CHECK((u0 - swap2).cwiseAbs().maxCoeff() < 1e-15);
}
