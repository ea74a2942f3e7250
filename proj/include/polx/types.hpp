#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace polx {

using cplx = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat2c = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Bad input: out-of-domain arguments, inconsistent configuration.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A computation ran but its result violates an invariant.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// How loops over independent work items are executed. Serial is the
/// reference; Parallel must reproduce it to rounding.
enum class Exec { Serial, Parallel };

}  // namespace polx
