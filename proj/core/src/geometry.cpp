#include "isac/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace isac {

Eigen::VectorXcd steering_vector(double theta, int n_antennas) {
  Eigen::VectorXcd a(n_antennas);
  const double phase = -M_PI * std::sin(theta);
  for (int m = 0; m < n_antennas; ++m) {
    a(m) = std::polar(1.0, phase * m);
  }
  return a;
}

double angle_between(const Point2D& from, const Point2D& to) {
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  if (dx == 0.0 && dy == 0.0) {
    throw std::invalid_argument("angle_between: coincident points");
  }
  // atan2(dx, dy): 0 along +y (broadside), +pi/2 along +x.
  double ang = std::atan2(dx, dy);
  if (ang <= -M_PI) ang = M_PI;  // fold the -pi branch onto +pi
  return ang;
}

}  // namespace isac
