#include "mixcf/kernels.hpp"

namespace mixcf::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double wdot_scalar(const double* w, const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void contract_sym2_scalar(const double* a11, const double* a12, const double* a22,
                          const double* w11, const double* w12, const double* w22, double* out,
                          std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = a11[i] * w11[i] + 2.0 * a12[i] * w12[i] + a22[i] * w22[i];
}

void ring_column_scalar(const double* a11, const double* a12, const double* a22, const double* t,
                        const double* tp, double c11, double c12, double c22, double scale,
                        double* out, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j)
    out[j] = scale * (t[j] * (c11 * a11[j] + c22 * a22[j]) + 2.0 * c12 * tp[j] * a12[j]);
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::Scalar,        dot_scalar,         wdot_scalar, axpy_scalar,
                                 contract_sym2_scalar, ring_column_scalar};
  return table;
}

}  // namespace mixcf::kernels
