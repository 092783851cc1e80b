// Core geometry: SE(3) transforms and oriented point clouds.
#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace tacloc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Maximum per-element drift tolerated before a rotation matrix is
/// re-orthonormalized at construction.
inline constexpr double kRotationDriftTol = 1e-9;

/// Angle between two unit vectors, clamped arccos, range [0, pi].
double angle_between(const Vec3& a, const Vec3& b);

/// Nearest rotation matrix (polar factor) to an arbitrary full-rank matrix.
/// Throws std::invalid_argument if the input is rank-deficient.
Mat3 project_to_rotation(const Mat3& m);

/// Rigid body transform: rotation matrix plus translation, meters.
/// The rotation is guaranteed orthonormal with determinant +1; constructors
/// re-orthonormalize when the input drifts beyond kRotationDriftTol.
class RigidTransform {
 public:
  RigidTransform() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}
  RigidTransform(const Mat3& rotation, const Vec3& translation);

  static RigidTransform identity() { return RigidTransform(); }
  static RigidTransform from_matrix(const Mat4& m);
  static RigidTransform from_axis_angle(const Vec3& axis, double angle,
                                        const Vec3& translation = Vec3::Zero());
  static RigidTransform rotation_z(double angle);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Mat4 matrix() const;
  RigidTransform inverse() const;

  /// Applies the transform to a point: R p + t.
  Vec3 operator*(const Vec3& p) const { return rotation_ * p + translation_; }

  /// Rotates a direction (no translation).
  Vec3 rotate(const Vec3& d) const { return rotation_ * d; }

 private:
  Mat3 rotation_;
  Vec3 translation_;
};

/// a then b composed as a single transform: (a.R b.R, a.R b.t + a.t).
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

/// Positions with unit surface normals; the shared currency between the
/// tactile front end, the feature stage, and the solver.
struct OrientedPointCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  void reserve(std::size_t n) {
    points.reserve(n);
    normals.reserve(n);
  }
  void push_back(const Vec3& p, const Vec3& n) {
    points.push_back(p);
    normals.push_back(n);
  }

  /// Throws std::invalid_argument on size mismatch, non-finite values, or
  /// normals off unit length by more than 1e-6.
  void validate() const;
};

/// Transforms points by R p + t and normals by R n.
OrientedPointCloud apply(const RigidTransform& t, const OrientedPointCloud& cloud);

}  // namespace tacloc
