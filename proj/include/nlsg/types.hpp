#ifndef NLSG_TYPES_HPP
#define NLSG_TYPES_HPP

#include <complex>
#include <cstddef>
#include <functional>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace nlsg {

using cd = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using MatX = Eigen::MatrixXcd;
using VecX = Eigen::VectorXcd;

inline constexpr cd I1{0.0, 1.0};

// Thrown on bad inputs/config (CLI exit code 2).
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when an algorithm fails numerically (CLI exit code 3).
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Diagonal of an N x N matrix. All spectral quantities (a, b, A, B, d, Q, H0,
// H1, gamma, Gamma) live here; N is the number of edges.
class DiagMat {
public:
  DiagMat() = default;
  explicit DiagMat(std::size_t n, cd fill = cd{0.0, 0.0}) : e_(n, fill) {}
  explicit DiagMat(std::vector<cd> entries) : e_(std::move(entries)) {
    if (e_.empty()) throw ValidationError("DiagMat: N must be >= 1");
  }

  static DiagMat identity(std::size_t n) { return DiagMat(n, cd{1.0, 0.0}); }

  std::size_t size() const { return e_.size(); }
  cd& operator[](std::size_t i) { return e_[i]; }
  const cd& operator[](std::size_t i) const { return e_[i]; }
  const std::vector<cd>& entries() const { return e_; }

  DiagMat& operator+=(const DiagMat& o) {
    check(o);
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] += o.e_[i];
    return *this;
  }
  DiagMat& operator-=(const DiagMat& o) {
    check(o);
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] -= o.e_[i];
    return *this;
  }
  friend DiagMat operator+(DiagMat a, const DiagMat& b) { return a += b; }
  friend DiagMat operator-(DiagMat a, const DiagMat& b) { return a -= b; }
  friend DiagMat operator*(const DiagMat& a, const DiagMat& b) {
    a.check(b);
    DiagMat r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * b[i];
    return r;
  }
  friend DiagMat operator*(cd s, DiagMat a) {
    for (auto& v : a.e_) v *= s;
    return a;
  }

  DiagMat inverse() const {
    DiagMat r(size());
    for (std::size_t i = 0; i < size(); ++i) {
      if (e_[i] == cd{0.0, 0.0}) throw NumericError("DiagMat: singular entry " + std::to_string(i));
      r[i] = 1.0 / e_[i];
    }
    return r;
  }
  DiagMat conjugated() const {
    DiagMat r(size());
    for (std::size_t i = 0; i < size(); ++i) r[i] = std::conj(e_[i]);
    return r;
  }
  double max_abs() const {
    double m = 0.0;
    for (const auto& v : e_) m = std::max(m, std::abs(v));
    return m;
  }

  Eigen::MatrixXcd to_dense() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero((Eigen::Index)size(), (Eigen::Index)size());
    for (std::size_t i = 0; i < size(); ++i) m((Eigen::Index)i, (Eigen::Index)i) = e_[i];
    return m;
  }

private:
  void check(const DiagMat& o) const {
    if (o.size() != size()) throw ValidationError("DiagMat: size mismatch");
  }
  std::vector<cd> e_;
};

// Element of M_d: four diagonal N x N blocks of a 2N x 2N matrix,
//   [ m11 m12 ]
//   [ m21 m22 ].
// Products and inverses stay blockwise; dense form only for verification.
struct BlockDiag {
  DiagMat m11, m12, m21, m22;

  BlockDiag() = default;
  BlockDiag(DiagMat a, DiagMat b, DiagMat c, DiagMat d)
      : m11(std::move(a)), m12(std::move(b)), m21(std::move(c)), m22(std::move(d)) {
    if (m12.size() != m11.size() || m21.size() != m11.size() || m22.size() != m11.size())
      throw ValidationError("BlockDiag: block size mismatch");
  }

  static BlockDiag identity(std::size_t n) {
    return {DiagMat::identity(n), DiagMat(n), DiagMat(n), DiagMat::identity(n)};
  }

  std::size_t edges() const { return m11.size(); }

  friend BlockDiag operator*(const BlockDiag& a, const BlockDiag& b) {
    return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
            a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
  }
  friend BlockDiag operator+(const BlockDiag& a, const BlockDiag& b) {
    return {a.m11 + b.m11, a.m12 + b.m12, a.m21 + b.m21, a.m22 + b.m22};
  }
  friend BlockDiag operator-(const BlockDiag& a, const BlockDiag& b) {
    return {a.m11 - b.m11, a.m12 - b.m12, a.m21 - b.m21, a.m22 - b.m22};
  }

  // Blockwise inverse via the N independent 2x2 inverses.
  BlockDiag inverse() const {
    const std::size_t n = edges();
    BlockDiag r{DiagMat(n), DiagMat(n), DiagMat(n), DiagMat(n)};
    for (std::size_t i = 0; i < n; ++i) {
      const cd det = m11[i] * m22[i] - m12[i] * m21[i];
      if (det == cd{0.0, 0.0}) throw NumericError("BlockDiag: singular 2x2 factor at edge " + std::to_string(i));
      r.m11[i] = m22[i] / det;
      r.m12[i] = -m12[i] / det;
      r.m21[i] = -m21[i] / det;
      r.m22[i] = m11[i] / det;
    }
    return r;
  }

  Eigen::MatrixXcd to_dense() const {
    const Eigen::Index n = (Eigen::Index)edges();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
      m(i, i) = m11[(std::size_t)i];
      m(i, i + n) = m12[(std::size_t)i];
      m(i + n, i) = m21[(std::size_t)i];
      m(i + n, i + n) = m22[(std::size_t)i];
    }
    return m;
  }
};

// Static chunked parallel map; slot j is written only by the chunk owning j,
// so results do not depend on thread count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  threads = std::min<unsigned>(threads, (unsigned)n);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  std::exception_ptr err;
  std::mutex err_mtx;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> g(err_mtx);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace nlsg

#endif
