#ifndef NLSG_BLOCKMAT_HPP
#define NLSG_BLOCKMAT_HPP

#include <vector>

#include "nlsg/types.hpp"

namespace nlsg {

// Projections of a 2N x 2N matrix onto M_d (block-of-diagonals) and its
// complement M_a. project_d(M).to_dense() + project_a(M) == M entrywise.
BlockDiag project_d(const MatX& m);
MatX project_a(const MatX& m);

// theta: N-tuple of 2x2 matrices <-> M_d (algebra isomorphism).
BlockDiag theta(const std::vector<Mat2>& mats);
std::vector<Mat2> theta_inv(const BlockDiag& b);

// Structural matrices of the construction.
Mat2 sigma3_2();                 // diag(1,-1)
Mat2 sigma_swap();               // [[0,1],[1,0]]
MatX Sigma3(std::size_t n);      // diag(I_N, -I_N)
MatX SigmaSwap(std::size_t n);   // I_2 (x) sigma : block-diag(sigma, sigma), N = 2 only
MatX I3_mat();                   // diag(sigma3, I_2), N = 2
MatX cyclic_K(std::size_t n);    // N x N cyclic shift, K^N = I
MatX ones_J(std::size_t n);      // all-ones
cd omega_root(std::size_t n);    // e^{2 pi i / N}

// Unique decomposition M = sum_j M_j K^j with M_j diagonal, and its inverse.
std::vector<DiagMat> k_decompose(const MatX& m);
MatX k_recompose(const std::vector<DiagMat>& parts);

// Lifted action on diagonals: hat(M) D = sum_j M_j K^j D K^{-j}.
DiagMat hat_apply(const MatX& m, const DiagMat& d);

// True iff ||MK - KM||_max <= tol.
bool is_circulant(const MatX& m, double tol);

}  // namespace nlsg

#endif
