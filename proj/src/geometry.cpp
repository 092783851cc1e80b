#include "tacloc/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace tacloc {

double angle_between(const Vec3& a, const Vec3& b) {
  const double d = std::clamp(a.dot(b), -1.0, 1.0);
  return std::acos(d);
}

Mat3 project_to_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues()(1) < 1e-12 * std::max(svd.singularValues()(0), 1e-300)) {
    throw std::invalid_argument("project_to_rotation: rank-deficient matrix");
  }
  const Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  d(2, 2) = (u * v.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  return u * d * v.transpose();
}

namespace {

bool is_rotation_within(const Mat3& r, double tol) {
  const Mat3 gram = r.transpose() * r;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(r.determinant() - 1.0) <= tol;
}

}  // namespace

RigidTransform::RigidTransform(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  if (!rotation_.allFinite() || !translation_.allFinite()) {
    throw std::invalid_argument("RigidTransform: non-finite entries");
  }
  if (!is_rotation_within(rotation_, kRotationDriftTol)) {
    rotation_ = project_to_rotation(rotation_);
  }
}

RigidTransform RigidTransform::from_matrix(const Mat4& m) {
  return RigidTransform(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
}

RigidTransform RigidTransform::from_axis_angle(const Vec3& axis, double angle,
                                               const Vec3& translation) {
  const double n = axis.norm();
  if (n < 1e-300) throw std::invalid_argument("from_axis_angle: zero axis");
  const Mat3 r = Eigen::AngleAxisd(angle, axis / n).toRotationMatrix();
  return RigidTransform(r, translation);
}

RigidTransform RigidTransform::rotation_z(double angle) {
  return from_axis_angle(Vec3::UnitZ(), angle);
}

Mat4 RigidTransform::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

RigidTransform RigidTransform::inverse() const {
  const Mat3 rt = rotation_.transpose();
  return RigidTransform(rt, -(rt * translation_));
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  return RigidTransform(a.rotation() * b.rotation(),
                        a.rotation() * b.translation() + a.translation());
}

void OrientedPointCloud::validate() const {
  if (points.size() != normals.size()) {
    throw std::invalid_argument("OrientedPointCloud: points/normals size mismatch");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].allFinite() || !normals[i].allFinite()) {
      throw std::invalid_argument("OrientedPointCloud: non-finite entry");
    }
    if (std::abs(normals[i].norm() - 1.0) > 1e-6) {
      throw std::invalid_argument("OrientedPointCloud: normal not unit length");
    }
  }
}

OrientedPointCloud apply(const RigidTransform& t, const OrientedPointCloud& cloud) {
  OrientedPointCloud out;
  out.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    out.push_back(t * cloud.points[i], t.rotate(cloud.normals[i]));
  }
  return out;
}

}  // namespace tacloc
