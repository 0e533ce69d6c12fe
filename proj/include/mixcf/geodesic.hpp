#pragma once

// Pointwise geometry on the unit sphere: tangent frames, great circles,
// parallel transport and difference quotients along geodesics.
//
// Tensor fields on S^2 are handled in ambient form: a symmetric 3x3 matrix T(y)
// with T(y) y = 0, acting on the tangent plane at y. Frame components are
// recovered with `to_frame`.

#include <Eigen/Dense>
#include <array>
#include <functional>

namespace mixcf {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// Scalar function on the unit sphere; only evaluated at unit vectors.
using ScalarFn = std::function<double(const Vec3&)>;
/// Symmetric tangential tensor field on the unit sphere, in ambient form.
using TensorFn = std::function<Mat3(const Vec3&)>;

struct TangentFrame {
  Vec3 e1;
  Vec3 e2;
};

/// Frame (e1, e2) rotated by `angle` inside its own plane.
TangentFrame rotate_frame(const TangentFrame& frame, double angle);

Mat2 to_frame(const Mat3& ambient, const TangentFrame& frame);
Mat3 from_frame(const Mat2& components, const TangentFrame& frame);

/// I - x x^T
Mat3 tangential_projector(const Vec3& x);

/// x cos t + d sin t, no validation (d must be a unit tangent at x).
Vec3 geodesic_point(const Vec3& x, const Vec3& d, double t);
/// Velocity of the same geodesic at time t.
Vec3 geodesic_velocity(const Vec3& x, const Vec3& d, double t);
/// Parallel transport of the tangent vector v at x along the geodesic
/// leaving x with unit velocity d, for time t.
Vec3 parallel_transport(const Vec3& x, const Vec3& d, const Vec3& v, double t);

/// Central difference quotients at t = 0 refined by Richardson extrapolation
/// in h^2. `levels` extra halvings of h are used.
struct StepRule {
  double h = 1e-2;
  int levels = 2;
};

double richardson_d1(const std::function<double(double)>& fn, StepRule rule);
double richardson_d2(const std::function<double(double)>& fn, StepRule rule);
/// Fourth-order five-point second derivative at t = 0.
double five_point_d2(const std::function<double(double)>& fn, double h);

/// Value, covariant gradient and covariant Hessian of a scalar field at a
/// point, expressed in a tangent frame.
struct ScalarJet {
  double value = 0.0;
  Vec2 grad = Vec2::Zero();
  Mat2 hess = Mat2::Zero();

  ScalarJet rotated(double angle) const;
};

/// Frame components of a tensor field together with their first and second
/// derivatives, taken in the frame that is parallel along every geodesic
/// leaving the base point. hess[k][l] is symmetric in (k, l).
struct TensorJet {
  Mat2 value = Mat2::Zero();
  std::array<Mat2, 2> grad{Mat2::Zero(), Mat2::Zero()};
  std::array<std::array<Mat2, 2>, 2> hess{};

  TensorJet rotated(double angle) const;
  /// Scalar jet of the (a, b) component.
  ScalarJet component(int a, int b) const;
};

ScalarJet scalar_jet(const ScalarFn& fn, const Vec3& x, const TangentFrame& frame,
                     StepRule rule = {});
TensorJet tensor_jet(const TensorFn& fn, const Vec3& x, const TangentFrame& frame,
                     StepRule rule = {});

/// W[g] = Hess g + g I from a scalar jet.
inline Mat2 weingarten_of_jet(const ScalarJet& jet) {
  return jet.hess + jet.value * Mat2::Identity();
}

/// Smallest eigenvalue of a symmetric 2x2 matrix in closed form.
double min_eigenvalue(const Mat2& m);

}  // namespace mixcf
