#pragma once

#include <Eigen/Dense>

namespace gowerslab {

// Unnormalized forward transform: X[xi] = sum_n x[n] e(-xi n / M).
Eigen::ArrayXcd dft_forward(const Eigen::ArrayXcd& x);

// Inverse with the 1/M factor: x[n] = (1/M) sum_xi X[xi] e(+xi n / M).
Eigen::ArrayXcd dft_inverse(const Eigen::ArrayXcd& X);

} // namespace gowerslab
