#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "capcov/kernels.hpp"

namespace {

using capcov::kernels::KernelTable;

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

std::vector<double> random_signs(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) {
    const auto r = rng() % 3;
    x = r == 0 ? -1.0 : (r == 1 ? 0.0 : 1.0);
  }
  return v;
}

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

class KernelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    vec_ = capcov::kernels::avx2_table();
    if (vec_ == nullptr) GTEST_SKIP() << "no AVX2 on this machine";
  }
  const KernelTable& ref_ = capcov::kernels::scalar_table();
  const KernelTable* vec_ = nullptr;
};

TEST_F(KernelEquivalence, AxpyAndScaleBitIdentical) {
  std::mt19937_64 rng(11);
  for (std::size_t n = 0; n < 70; ++n) {
    const auto x = random_vector(rng, n);
    auto y1 = random_vector(rng, n);
    auto y2 = y1;
    const double a = std::uniform_real_distribution<double>(-2, 2)(rng);
    ref_.axpy(a, x.data(), y1.data(), n);
    vec_->axpy(a, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) ASSERT_TRUE(same_bits(y1[i], y2[i])) << n << " " << i;
    ref_.scale(a, y1.data(), n);
    vec_->scale(a, y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) ASSERT_TRUE(same_bits(y1[i], y2[i])) << n << " " << i;
  }
}

TEST_F(KernelEquivalence, ArgmaxFirstIndexOnTies) {
  std::mt19937_64 rng(12);
  for (std::size_t n = 0; n < 70; ++n) {
    for (int rep = 0; rep < 20; ++rep) {
      auto d = random_vector(rng, n);
      // Force ties by quantizing.
      for (auto& v : d) v = std::round(v);
      const auto s = random_signs(rng, n);
      const auto r1 = ref_.argmax_signed(d.data(), s.data(), n);
      const auto r2 = vec_->argmax_signed(d.data(), s.data(), n);
      ASSERT_EQ(r1.index, r2.index) << n;
      if (r1.index >= 0) { ASSERT_TRUE(same_bits(r1.value, r2.value)); }
    }
  }
}

TEST_F(KernelEquivalence, FirstAboveMatches) {
  std::mt19937_64 rng(13);
  for (std::size_t n = 0; n < 70; ++n) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto d = random_vector(rng, n);
      const auto s = random_signs(rng, n);
      const double tol = 2.5;
      ASSERT_EQ(ref_.first_above(d.data(), s.data(), tol, n),
                vec_->first_above(d.data(), s.data(), tol, n));
    }
  }
}

TEST_F(KernelEquivalence, DotAgreesToRounding) {
  std::mt19937_64 rng(14);
  for (std::size_t n = 0; n < 70; ++n) {
    const auto x = random_vector(rng, n);
    const auto y = random_vector(rng, n);
    double mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(x[i] * y[i]);
    EXPECT_NEAR(ref_.dot(x.data(), y.data(), n), vec_->dot(x.data(), y.data(), n),
                1e-14 * (mag + 1.0));
  }
}

TEST(Kernels, ScalarReferenceValues) {
  const auto& k = capcov::kernels::scalar_table();
  std::vector<double> x{1, 2, 3};
  std::vector<double> y{1, 1, 1};
  k.axpy(2.0, x.data(), y.data(), 3);
  EXPECT_EQ(y, (std::vector<double>{3, 5, 7}));
  k.scale(0.5, y.data(), 3);
  EXPECT_EQ(y, (std::vector<double>{1.5, 2.5, 3.5}));
  EXPECT_EQ(k.dot(x.data(), x.data(), 3), 14.0);
  std::vector<double> d{1, -4, 4, 2};
  std::vector<double> s{1, -1, 1, 1};
  const auto r = k.argmax_signed(d.data(), s.data(), 4);
  EXPECT_EQ(r.index, 1);  // -4 * -1 = 4 ties with index 2, first wins
  EXPECT_EQ(r.value, 4.0);
  EXPECT_EQ(k.first_above(d.data(), s.data(), 3.0, 4), 1);
  EXPECT_EQ(k.first_above(d.data(), s.data(), 10.0, 4), -1);
  EXPECT_EQ(k.argmax_signed(d.data(), s.data(), 0).index, -1);
}

TEST(Kernels, ActiveTableIsOneOfTheVariants) {
  const auto& a = capcov::kernels::active();
  const auto* v = capcov::kernels::avx2_table();
  EXPECT_TRUE(&a == &capcov::kernels::scalar_table() || (v != nullptr && &a == v));
}

}  // namespace
