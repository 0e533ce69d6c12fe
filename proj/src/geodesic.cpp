#include "mixcf/geodesic.hpp"

#include <cmath>
#include <vector>

namespace mixcf {

TangentFrame rotate_frame(const TangentFrame& frame, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * frame.e1 + s * frame.e2, -s * frame.e1 + c * frame.e2};
}

Mat2 to_frame(const Mat3& ambient, const TangentFrame& frame) {
  Mat2 m;
  m(0, 0) = frame.e1.dot(ambient * frame.e1);
  m(1, 1) = frame.e2.dot(ambient * frame.e2);
  m(0, 1) = 0.5 * (frame.e1.dot(ambient * frame.e2) + frame.e2.dot(ambient * frame.e1));
  m(1, 0) = m(0, 1);
  return m;
}

Mat3 from_frame(const Mat2& c, const TangentFrame& frame) {
  const Vec3& a = frame.e1;
  const Vec3& b = frame.e2;
  return c(0, 0) * a * a.transpose() + c(0, 1) * (a * b.transpose() + b * a.transpose()) +
         c(1, 1) * b * b.transpose();
}

Mat3 tangential_projector(const Vec3& x) { return Mat3::Identity() - x * x.transpose(); }

Vec3 geodesic_point(const Vec3& x, const Vec3& d, double t) {
  return std::cos(t) * x + std::sin(t) * d;
}

Vec3 geodesic_velocity(const Vec3& x, const Vec3& d, double t) {
  return -std::sin(t) * x + std::cos(t) * d;
}

Vec3 parallel_transport(const Vec3& x, const Vec3& d, const Vec3& v, double t) {
  // The component along d turns with the velocity, the normal one is fixed.
  const double along = v.dot(d);
  return v + along * ((std::cos(t) - 1.0) * d - std::sin(t) * x);
}

namespace {

double extrapolate(std::vector<double> col) {
  // col[k] = D(h / 2^k); error expansion in even powers of h.
  const int n = static_cast<int>(col.size());
  for (int j = 1; j < n; ++j) {
    const double f = std::pow(4.0, j);
    for (int k = n - 1; k >= j; --k) col[k] = (f * col[k] - col[k - 1]) / (f - 1.0);
  }
  return col.back();
}

}  // namespace

double richardson_d1(const std::function<double(double)>& fn, StepRule rule) {
  std::vector<double> col;
  double h = rule.h;
  for (int k = 0; k <= rule.levels; ++k, h *= 0.5) col.push_back((fn(h) - fn(-h)) / (2.0 * h));
  return extrapolate(std::move(col));
}

double richardson_d2(const std::function<double(double)>& fn, StepRule rule) {
  const double f0 = fn(0.0);
  std::vector<double> col;
  double h = rule.h;
  for (int k = 0; k <= rule.levels; ++k, h *= 0.5)
    col.push_back((fn(h) - 2.0 * f0 + fn(-h)) / (h * h));
  return extrapolate(std::move(col));
}

double five_point_d2(const std::function<double(double)>& fn, double h) {
  return (-fn(2 * h) + 16.0 * fn(h) - 30.0 * fn(0.0) + 16.0 * fn(-h) - fn(-2 * h)) /
         (12.0 * h * h);
}

ScalarJet ScalarJet::rotated(double angle) const {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat2 r;
  r << c, s, -s, c;
  return {value, r * grad, r * hess * r.transpose()};
}

TensorJet TensorJet::rotated(double angle) const {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat2 r;
  r << c, s, -s, c;
  TensorJet out;
  out.value = r * value * r.transpose();
  std::array<Mat2, 2> g{r * grad[0] * r.transpose(), r * grad[1] * r.transpose()};
  for (int k = 0; k < 2; ++k) out.grad[k] = r(k, 0) * g[0] + r(k, 1) * g[1];
  std::array<std::array<Mat2, 2>, 2> h;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) h[i][j] = r * hess[i][j] * r.transpose();
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      Mat2 acc = Mat2::Zero();
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) acc += r(k, i) * r(l, j) * h[i][j];
      out.hess[k][l] = acc;
    }
  return out;
}

ScalarJet TensorJet::component(int a, int b) const {
  ScalarJet s;
  s.value = value(a, b);
  for (int k = 0; k < 2; ++k) s.grad(k) = grad[k](a, b);
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) s.hess(k, l) = hess[k][l](a, b);
  return s;
}

namespace {

// Samples of the frame components along the geodesic in direction d, with the
// base frame parallel transported: t -> b_a(t)^T T(gamma(t)) b_b(t).
struct DirectionalSamples {
  const TensorFn& fn;
  const Vec3& x;
  const TangentFrame& frame;
  Vec3 d;

  Mat2 at(double t) const {
    const Vec3 y = geodesic_point(x, d, t);
    const Mat3 amb = fn(y);
    const Vec3 b1 = parallel_transport(x, d, frame.e1, t);
    const Vec3 b2 = parallel_transport(x, d, frame.e2, t);
    Mat2 m;
    m(0, 0) = b1.dot(amb * b1);
    m(1, 1) = b2.dot(amb * b2);
    m(0, 1) = m(1, 0) = 0.5 * (b1.dot(amb * b2) + b2.dot(amb * b1));
    return m;
  }
};

// Returns (first derivative, second derivative) of every component.
std::pair<Mat2, Mat2> directional_derivatives(const DirectionalSamples& s, const Mat2& f0,
                                              StepRule rule) {
  const int n = rule.levels + 1;
  std::vector<Mat2> d1(n), d2(n);
  double h = rule.h;
  for (int k = 0; k < n; ++k, h *= 0.5) {
    const Mat2 fp = s.at(h);
    const Mat2 fm = s.at(-h);
    d1[k] = (fp - fm) / (2.0 * h);
    d2[k] = (fp - 2.0 * f0 + fm) / (h * h);
  }
  Mat2 first, second;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      std::vector<double> c1(n), c2(n);
      for (int k = 0; k < n; ++k) {
        c1[k] = d1[k](a, b);
        c2[k] = d2[k](a, b);
      }
      first(a, b) = extrapolate(c1);
      second(a, b) = extrapolate(c2);
    }
  return {first, second};
}

}  // namespace

TensorJet tensor_jet(const TensorFn& fn, const Vec3& x, const TangentFrame& frame,
                     StepRule rule) {
  const double r = std::sqrt(0.5);
  const Vec3 dirs[4] = {frame.e1, frame.e2, r * (frame.e1 + frame.e2),
                        r * (frame.e1 - frame.e2)};
  TensorJet jet;
  jet.value = to_frame(fn(x), frame);
  Mat2 second[4];
  for (int k = 0; k < 4; ++k) {
    DirectionalSamples samples{fn, x, frame, dirs[k]};
    auto [d1, d2] = directional_derivatives(samples, jet.value, rule);
    if (k < 2) jet.grad[k] = d1;
    second[k] = d2;
  }
  jet.hess[0][0] = second[0];
  jet.hess[1][1] = second[1];
  jet.hess[0][1] = jet.hess[1][0] = 0.5 * (second[2] - second[3]);
  return jet;
}

ScalarJet scalar_jet(const ScalarFn& fn, const Vec3& x, const TangentFrame& frame,
                     StepRule rule) {
  const double r = std::sqrt(0.5);
  const Vec3 dirs[4] = {frame.e1, frame.e2, r * (frame.e1 + frame.e2),
                        r * (frame.e1 - frame.e2)};
  ScalarJet jet;
  jet.value = fn(x);
  double second[4];
  for (int k = 0; k < 4; ++k) {
    auto along = [&](double t) { return fn(geodesic_point(x, dirs[k], t)); };
    if (k < 2) jet.grad(k) = richardson_d1(along, rule);
    second[k] = richardson_d2(along, rule);
  }
  jet.hess(0, 0) = second[0];
  jet.hess(1, 1) = second[1];
  jet.hess(0, 1) = jet.hess(1, 0) = 0.5 * (second[2] - second[3]);
  return jet;
}

double min_eigenvalue(const Mat2& m) {
  const double mean = 0.5 * (m(0, 0) + m(1, 1));
  const double half_diff = 0.5 * (m(0, 0) - m(1, 1));
  const double off = 0.5 * (m(0, 1) + m(1, 0));
  return mean - std::hypot(half_diff, off);
}

}  // namespace mixcf
