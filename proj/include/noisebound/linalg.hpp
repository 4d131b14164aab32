#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "noisebound/errors.hpp"

namespace noisebound {

using ComplexMatrix = Eigen::MatrixXcd;

// Largest singular value via the eigenvalues of M^dag M.
inline double spectral_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (!m.allFinite()) throw input_error("spectral_norm: non-finite entries");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver;
  solver.compute(m.adjoint() * m, Eigen::EigenvaluesOnly);
  const double top = solver.eigenvalues().maxCoeff();
  return std::sqrt(std::max(top, 0.0));
}

// exp(-i H t) for Hermitian H, by eigendecomposition: exact up to floating
// point, no Trotter or series error.
inline ComplexMatrix hermitian_propagator(const ComplexMatrix& h, double t) {
  if (h.rows() != h.cols())
    throw input_error("hermitian_propagator: matrix not square");
  if (!h.allFinite())
    throw input_error("hermitian_propagator: non-finite entries");
  const double scale = h.cwiseAbs().maxCoeff();
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(scale, 1.0))
    throw input_error("hermitian_propagator: matrix not Hermitian");

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();
  Eigen::VectorXcd phases(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i)
    phases(i) = std::exp(std::complex<double>(0.0, -values(i) * t));
  return vectors * phases.asDiagonal() * vectors.adjoint();
}

}  // namespace noisebound
