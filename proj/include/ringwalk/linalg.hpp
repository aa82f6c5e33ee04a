#pragma once

#include <complex>

#include <Eigen/Dense>

namespace ringwalk {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Coin4 = Eigen::Matrix4cd;

inline constexpr double kPi = 3.14159265358979323846;

// max_ij |(U U^dagger - I)_ij|
double unitarity_residual(const CMatrix& u);

// Circular distance between two angles, in [0, pi].
double angle_distance(double x, double y);

// Maps an angle onto (-pi, pi].
double wrap_phase(double x);

}  // namespace ringwalk
