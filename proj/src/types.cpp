#include "flowcert/types.hpp"

#include <cstdio>
#include <utility>

namespace flowcert {

Region Region::ball(Vector center, double radius) {
  if (!all_finite(center)) {
    throw std::invalid_argument("Region: center must be finite");
  }
  if (!(radius > 0.0)) {
    throw std::invalid_argument("Region: ball radius must be positive");
  }
  Region r;
  r.kind_ = Kind::ball;
  r.center_ = std::move(center);
  r.radius_ = radius;
  return r;
}

Region Region::box(Vector center, Vector half_widths) {
  if (!all_finite(center) || !all_finite(half_widths)) {
    throw std::invalid_argument("Region: center/half_widths must be finite");
  }
  if (center.size() != half_widths.size()) {
    throw std::invalid_argument("Region: center/half_widths size mismatch");
  }
  if (!(half_widths.minCoeff() > 0.0)) {
    throw std::invalid_argument("Region: box half-widths must be positive");
  }
  Region r;
  r.kind_ = Kind::box;
  r.center_ = std::move(center);
  r.half_widths_ = std::move(half_widths);
  return r;
}

bool Region::contains(const Vector& x, double slack) const {
  if (x.size() != center_.size()) return false;
  if (kind_ == Kind::ball) {
    return (x - center_).norm() <= radius_ + slack;
  }
  return ((x - center_).cwiseAbs() - half_widths_).maxCoeff() <= slack;
}

double Region::circumradius() const {
  return kind_ == Kind::ball ? radius_ : half_widths_.norm();
}

std::string Region::describe() const {
  std::string s = kind_ == Kind::ball ? "ball" : "box";
  s += "(center=" + format_vector(center_);
  if (kind_ == Kind::ball) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", radius_);
    s += ", radius=";
    s += buf;
  } else {
    s += ", half_widths=" + format_vector(half_widths_);
  }
  return s + ")";
}

std::string format_vector(const Vector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v[i]);
    if (i) s += ", ";
    s += buf;
  }
  return s + ")";
}

}  // namespace flowcert
