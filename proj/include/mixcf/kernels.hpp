#pragma once

// Data-parallel inner loops shared by the spectral transforms, quadrature and
// collocation assembly. Every kernel has a scalar reference implementation;
// an AVX2/FMA variant is selected at runtime when the CPU supports it.
//
// This header is deliberately free of Eigen so that the AVX2 translation unit
// can be compiled with wider ISA flags without ODR hazards.

#include <cstddef>
#include <string_view>

namespace mixcf::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  /// sum_i a[i] * b[i], fixed summation order for a given ISA.
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// sum_i w[i] * a[i] * b[i]
  double (*wdot)(const double* w, const double* a, const double* b, std::size_t n);
  /// y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// out[i] = a11[i]*w11[i] + 2*a12[i]*w12[i] + a22[i]*w22[i]
  void (*contract_sym2)(const double* a11, const double* a12, const double* a22, const double* w11,
                        const double* w12, const double* w22, double* out, std::size_t n);
  /// One ring of a collocation column for a separable harmonic:
  /// out[j] = scale * (t[j] * (c11*a11[j] + c22*a22[j]) + 2*c12*tp[j]*a12[j])
  void (*ring_column)(const double* a11, const double* a12, const double* a22, const double* t,
                      const double* tp, double c11, double c12, double c22, double scale,
                      double* out, std::size_t n);
};

const KernelTable& scalar_table();
/// Null when the AVX2 variant was not compiled in.
const KernelTable* avx2_table();

bool cpu_has_avx2();

/// Kernel table in use. Chosen once: AVX2 when compiled in and supported,
/// unless the environment variable MIXCF_ISA=scalar forces the reference path.
const KernelTable& active();

/// Overrides the active table (tests and benchmarks). Returns false when the
/// requested ISA is unavailable on this machine.
bool select(Isa isa);

std::string_view isa_name(Isa isa);

}  // namespace mixcf::kernels
