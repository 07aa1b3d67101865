#pragma once

#include <Eigen/Dense>
#include <complex>

namespace isac {

struct Point2D {
  double x = 0.0;
  double y = 0.0;
};

/// Axis-aligned square region given by its center and side length (meters).
struct Region {
  Point2D center;
  double side = 0.0;
};

/// ULA phase response a(theta), entry m = exp(-j*pi*m*sin(theta)).
Eigen::VectorXcd steering_vector(double theta, int n_antennas);

/// Boresight angle of `to` as seen from `from`. Arrays are broadside-oriented
/// along global +y; the angle is measured from +y toward +x, range (-pi, pi].
/// Throws std::invalid_argument for coincident points.
double angle_between(const Point2D& from, const Point2D& to);

}  // namespace isac
