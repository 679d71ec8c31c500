// linalg.hpp — Dense complex helpers: matrix exponential and small utilities

#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace wgheat::linalg {

using cplx = std::complex<double>;

// exp(A) by scaling and squaring with a degree-13 diagonal Pade approximant
// (Higham, SIAM J. Matrix Anal. Appl. 26, 2005). Relative accuracy ~1e-15
// for the small generators used here.
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a);

double norm1(const Eigen::MatrixXcd& a);

std::vector<double> linspace(double first, double last, std::size_t n);
std::vector<double> logspace(double first, double last, std::size_t n);

// True when the grid is non-empty and strictly increasing.
bool strictly_increasing(std::span<const double> grid);

} // namespace wgheat::linalg
