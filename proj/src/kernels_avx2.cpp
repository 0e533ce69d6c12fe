// Compiled with -mavx2 -mfma. Must not include Eigen or any header with
// inline functions that other translation units also instantiate.
#include <immintrin.h>

#include "mixcf/kernels.hpp"

namespace mixcf::kernels {
namespace {

// Lane partial sums are combined in a fixed order, so results are
// reproducible for a given n.
inline double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double wdot_avx2(const double* w, const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d wa = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
    acc = _mm256_fmadd_pd(wa, _mm256_loadu_pd(b + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * a[i] * b[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void contract_sym2_avx2(const double* a11, const double* a12, const double* a22,
                        const double* w11, const double* w12, const double* w22, double* out,
                        std::size_t n) {
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_mul_pd(_mm256_loadu_pd(a11 + i), _mm256_loadu_pd(w11 + i));
    __m256d off = _mm256_mul_pd(two, _mm256_loadu_pd(a12 + i));
    r = _mm256_fmadd_pd(off, _mm256_loadu_pd(w12 + i), r);
    r = _mm256_fmadd_pd(_mm256_loadu_pd(a22 + i), _mm256_loadu_pd(w22 + i), r);
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = a11[i] * w11[i] + 2.0 * a12[i] * w12[i] + a22[i] * w22[i];
}

void ring_column_avx2(const double* a11, const double* a12, const double* a22, const double* t,
                      const double* tp, double c11, double c12, double c22, double scale,
                      double* out, std::size_t n) {
  const __m256d v11 = _mm256_set1_pd(c11);
  const __m256d v12 = _mm256_set1_pd(2.0 * c12);
  const __m256d v22 = _mm256_set1_pd(c22);
  const __m256d vs = _mm256_set1_pd(scale);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d diag = _mm256_fmadd_pd(v22, _mm256_loadu_pd(a22 + j),
                                   _mm256_mul_pd(v11, _mm256_loadu_pd(a11 + j)));
    __m256d r = _mm256_mul_pd(_mm256_loadu_pd(t + j), diag);
    __m256d off = _mm256_mul_pd(v12, _mm256_loadu_pd(tp + j));
    r = _mm256_fmadd_pd(off, _mm256_loadu_pd(a12 + j), r);
    _mm256_storeu_pd(out + j, _mm256_mul_pd(vs, r));
  }
  for (; j < n; ++j)
    out[j] = scale * (t[j] * (c11 * a11[j] + c22 * a22[j]) + 2.0 * c12 * tp[j] * a12[j]);
}

}  // namespace

const KernelTable* avx2_table_impl() {
  static const KernelTable table{Isa::Avx2,        dot_avx2,         wdot_avx2, axpy_avx2,
                                 contract_sym2_avx2, ring_column_avx2};
  return &table;
}

}  // namespace mixcf::kernels
