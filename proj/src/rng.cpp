#include "flowcert/rng.hpp"

#include <cmath>

namespace flowcert {

double Rng::normal() {
  // Box-Muller, cosine branch only. u1 is kept away from zero so the log is
  // finite.
  double u1 = uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Vector Rng::normal_vector(int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = normal();
  return v;
}

Vector Rng::in_ball(const Vector& center, double radius) {
  const int n = static_cast<int>(center.size());
  Vector dir = normal_vector(n);
  double norm = dir.norm();
  if (norm == 0.0) {
    dir.setZero();
    dir[0] = 1.0;
    norm = 1.0;
  }
  const double r = radius * std::pow(uniform(), 1.0 / n);
  return center + (r / norm) * dir;
}

Vector Rng::in_region(const Region& region) {
  if (region.kind() == Region::Kind::ball) {
    return in_ball(region.center(), region.radius());
  }
  Vector x(region.dim());
  for (int i = 0; i < region.dim(); ++i) {
    x[i] = region.center()[i] +
           uniform(-region.half_widths()[i], region.half_widths()[i]);
  }
  return x;
}

}  // namespace flowcert
