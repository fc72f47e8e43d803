#pragma once

#include <complex>
#include <Eigen/Dense>

namespace kg {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kGramCondLimit = 1e12;
inline constexpr double kPairTolDefault = 1e-8;
inline constexpr double kRhoGuardDefault = 1e-8;

inline const char* version() { return "0.1.0"; }

} // namespace kg
