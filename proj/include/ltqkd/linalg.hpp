#pragma once

#include <complex>

#include <Eigen/Dense>

namespace ltqkd {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

struct HermitianEigen {
  RealVector values;  // ascending
  Matrix vectors;     // columns match values
};

HermitianEigen hermitian_eigen(const Matrix& m);
double min_eigenvalue(const Matrix& m);
double max_eigenvalue(const Matrix& m);

// Largest |m - m^dag| entry.
double hermiticity_error(const Matrix& m);
Matrix hermitian_part(const Matrix& m);

Matrix kron(const Matrix& a, const Matrix& b);

// Inverse for small square matrices; throws SingularGram when not invertible.
Matrix checked_inverse(const Matrix& m);

// Spectral condition number sigma_max / sigma_min (infinity if singular).
double condition_number(const Eigen::MatrixXd& m);

}  // namespace ltqkd
