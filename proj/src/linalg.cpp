#include "vsd/linalg.hpp"

#include <cmath>

namespace vsd::linalg {

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Matrix sqrt_psd(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) throw LinalgError("sqrt_psd: matrix is not square");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(m));
  if (eig.info() != Eigen::Success) throw LinalgError("sqrt_psd: eigendecomposition failed");
  Vector ev = eig.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -tol * scale) throw LinalgError("sqrt_psd: matrix is not positive semi-definite");
    ev[i] = std::sqrt(std::max(ev[i], 0.0));
  }
  return eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
}

Matrix solve_spd(const Matrix& s, const Matrix& b) {
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) throw LinalgError("solve_spd: matrix is not positive definite");
  return llt.solve(b);
}

double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(m), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

bool is_psd(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol * std::max(1.0, m.cwiseAbs().maxCoeff())) return false;
  return min_eigenvalue(m) >= -tol;
}

}  // namespace vsd::linalg
