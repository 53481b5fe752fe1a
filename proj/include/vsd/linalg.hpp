#pragma once

#include "vsd/types.hpp"

namespace vsd::linalg {

Matrix symmetrize(const Matrix& m);

// Principal square root of a symmetric PSD matrix. Eigenvalues below zero
// (rounding noise) are clamped; anything below -tol is rejected.
Matrix sqrt_psd(const Matrix& m, double tol = 1e-9);

// Solves S X = B for symmetric positive definite S without forming S^{-1}.
Matrix solve_spd(const Matrix& s, const Matrix& b);

bool is_psd(const Matrix& m, double tol = 1e-10);

double min_eigenvalue(const Matrix& m);

}  // namespace vsd::linalg
