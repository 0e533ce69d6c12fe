#pragma once

// Catalog of smooth convex bodies given through their support functions,
// 1-homogeneous extensions and inverse Weingarten forms.
//
// The inverse Weingarten form W = Hess u + u I of a support function u is
// computed as the tangential Euclidean Hessian of the 1-homogeneous extension
// U(p) = |p| u(p/|p|): in ambient form W(x) = D^2 U(x), which satisfies
// W(x) x = 0 and is independent of translations of the body.

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "mixcf/geodesic.hpp"
#include "mixcf/sphere.hpp"

namespace mixcf {

struct Ball {
  double r = 1.0;
};

struct TranslatedBall {
  double r = 1.0;
  Vec3 v = Vec3::Zero();
};

struct Ellipsoid {
  Vec3 semiaxes = Vec3::Ones();
};

/// Support function C + psi with psi band-limited and free of degrees 0 and 1.
struct HarmonicPerturbation {
  double C = 1.0;
  int degree = 0;
  std::vector<double> psi;  // packed by sh_index
};

struct MinkowskiTerm;
struct MinkowskiSum {
  std::vector<MinkowskiTerm> terms;
};

class BodySpec {
 public:
  using Variant = std::variant<Ball, TranslatedBall, Ellipsoid, HarmonicPerturbation, MinkowskiSum>;

  BodySpec(Variant v);  // NOLINT: implicit from any variant alternative
  BodySpec(Ball b) : BodySpec(Variant(std::move(b))) {}
  BodySpec(TranslatedBall b) : BodySpec(Variant(std::move(b))) {}
  BodySpec(Ellipsoid b) : BodySpec(Variant(std::move(b))) {}
  BodySpec(HarmonicPerturbation b) : BodySpec(Variant(std::move(b))) {}
  BodySpec(MinkowskiSum b) : BodySpec(Variant(std::move(b))) {}

  const Variant& variant() const { return v_; }
  std::string name() const;

 private:
  Variant v_;
};

struct MinkowskiTerm {
  BodySpec body;
  double weight = 1.0;
};

/// u(x) = sup_{z in body} <x, z>, closed form per variant.
double support(const BodySpec& body, const Vec3& x);
ScalarFn support_fn(const BodySpec& body);

/// Ambient inverse Weingarten form at the unit vector x.
Mat3 weingarten_ambient(const BodySpec& body, const Vec3& x);
TensorFn weingarten_fn(const BodySpec& body);

/// Coefficient tensor of the mixed equation on S^2 for the single given body,
/// christoffel_cofactor(W) = adj(W), in ambient form.
TensorFn coefficient_fn(const BodySpec& body);
SymTensorField coefficient_field(const BodySpec& body, const GridPtr& grid);

/// Largest harmonic degree that enters the support function (0 when the body
/// is not band-limited).
int harmonic_degree(const BodySpec& body);

/// Euclidean derivative tensors of the 1-homogeneous extension at p.
/// third[(i*3+j)*3+k], fourth[((i*3+j)*3+k)*3+l].
struct HomogeneousDerivatives {
  int order = 0;
  double value = 0.0;
  Vec3 gradient = Vec3::Zero();
  Mat3 hessian = Mat3::Zero();
  std::array<double, 27> third{};
  std::array<double, 81> fourth{};
};

/// Finite differences of G(p) = |p| g(p/|p|): h = 1e-3 |p| with one Richardson
/// level up to order 2, h = 1e-2 |p| with two levels for orders 3 and 4.
HomogeneousDerivatives homog_ext_derivs(const ScalarFn& g, const Vec3& p, int order);
/// Closed form up to order 2 for balls and ellipsoids, finite differences
/// otherwise.
HomogeneousDerivatives homog_ext_derivs(const BodySpec& body, const Vec3& p, int order);

/// W per node in the node frame.
SymTensorField weingarten_form(const BodySpec& body, const GridPtr& grid);
SymTensorField weingarten_form(const SphericalField& field);
/// General scalar function: Hessians along geodesics (Richardson-refined).
SymTensorField weingarten_form(const ScalarFn& g, const GridPtr& grid);

struct C2PlusCheck {
  bool ok = false;
  double min_eig = 0.0;
  std::size_t node = 0;
};
C2PlusCheck is_c2plus(const BodySpec& body, const GridPtr& grid, double tol = 0.0);

/// Estimate of the C^4 norm of a band-limited function: the largest |psi^(r)|,
/// r = 0..4, along great circles through every node in n_dirs directions. The
/// restriction to a great circle is a trigonometric polynomial of the same
/// degree, so the derivatives are computed exactly from 2L+1 samples.
double c4_norm_estimate(std::span<const double> coeffs, int degree, const FramedGrid& grid,
                        int n_dirs = 64);

/// Covariant derivative w_{ij,k} = grad[k](i, j) of a tensor field at x, taken
/// with the frame parallel transported along the differencing geodesics.
std::array<Mat2, 2> covariant_derivative(const TensorFn& w, const Vec3& x,
                                         const TangentFrame& frame);

/// max |w_{ij,k} - w_{ik,j}| / max |w_{ij,k}| over the grid.
double codazzi_residual(const BodySpec& body, const GridPtr& grid);

/// Vector v with <v, x> the degree-1 part of the given nodal values.
Vec3 linear_part(std::span<const double> values, const FramedGrid& grid);

}  // namespace mixcf
