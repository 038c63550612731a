#include "kernels_impl.hpp"

namespace capcov::kernels::detail {
namespace {

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void scale_scalar(double a, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] *= a;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

ArgmaxResult argmax_signed_scalar(const double* d, const double* s,
                                  std::size_t n) {
  ArgmaxResult best;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = d[i] * s[i];
    if (best.index < 0 || v > best.value) {
      best.index = static_cast<std::ptrdiff_t>(i);
      best.value = v;
    }
  }
  return best;
}

std::ptrdiff_t first_above_scalar(const double* d, const double* s, double tol,
                                  std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] * s[i] > tol) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

}  // namespace

const KernelTable kScalarTable{"scalar",          axpy_scalar,
                               scale_scalar,      dot_scalar,
                               argmax_signed_scalar, first_above_scalar};

}  // namespace capcov::kernels::detail
