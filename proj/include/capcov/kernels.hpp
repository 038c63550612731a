#pragma once

// Dense double-precision kernels used by the simplex tableau.
//
// Every kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2 variant chosen at runtime. The element-wise kernels (axpy, scale)
// and the selection kernels (argmax_signed, first_above) produce results that
// are bit-identical to the scalar reference; only dot() may differ in the last
// bits because its reduction order differs.

#include <cstddef>
#include <span>
#include <string_view>

namespace capcov::kernels {

struct ArgmaxResult {
  std::ptrdiff_t index = -1;  // -1 for empty input
  double value = 0.0;
};

struct KernelTable {
  std::string_view name;
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y[i] *= a
  void (*scale)(double a, double* y, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  // First index maximizing d[i] * s[i].
  ArgmaxResult (*argmax_signed)(const double* d, const double* s, std::size_t n);
  // First index with d[i] * s[i] > tol, or -1.
  std::ptrdiff_t (*first_above)(const double* d, const double* s, double tol,
                                std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the binary was built without the AVX2 translation unit or the
// CPU lacks AVX2.
const KernelTable* avx2_table();

// The table used by the library. Picks AVX2 when available unless the
// environment variable CAPCOV_KERNELS=scalar is set.
const KernelTable& active();

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), y.size());
}
inline void scale(double a, std::span<double> y) {
  active().scale(a, y.data(), y.size());
}
inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}
inline ArgmaxResult argmax_signed(std::span<const double> d,
                                  std::span<const double> s) {
  return active().argmax_signed(d.data(), s.data(), d.size());
}
inline std::ptrdiff_t first_above(std::span<const double> d,
                                  std::span<const double> s, double tol) {
  return active().first_above(d.data(), s.data(), tol, d.size());
}

}  // namespace capcov::kernels
