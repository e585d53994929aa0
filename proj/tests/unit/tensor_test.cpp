#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "pixelhand/error.hpp"
#include "pixelhand/tensor.hpp"

namespace pixelhand {
namespace {

TEST(TensorTest, RejectsZeroSpatialSizeAndBadBuffers) {
  EXPECT_THROW(Tensor(1, 0, 3), ConfigurationError);
  EXPECT_THROW(Tensor(1, 2, 2, std::vector<double>(3)), ConfigurationError);
  EXPECT_NO_THROW(Tensor(0, 2, 2));
}

TEST(TensorTest, ChannelAccessIsChannelOutermost) {
  Tensor t(2, 2, 3);
  t.at(1, 0, 2) = 7.0;
  EXPECT_EQ(t.data()[1 * 6 + 0 * 3 + 2], 7.0);
  EXPECT_EQ(t.channel(1)[2], 7.0);
}

TEST(Conv2dTest, IdentityOneByOneKernelReturnsInput) {
  Rng rng(1);
  const Tensor x = oracle::random_tensor(rng, 3, 4, 5);
  ConvKernel k(3, 3, 1);
  for (std::size_t c = 0; c < 3; ++c) k.weight(c, c, 0, 0) = 1.0;
  EXPECT_EQ(conv2d(x, k), x);
}

TEST(Conv2dTest, ZeroThreeByThreeKernelGivesBias) {
  Rng rng(2);
  const Tensor x = oracle::random_tensor(rng, 2, 4, 4);
  ConvKernel k(2, 2, 3, std::vector<double>(2 * 2 * 9, 0.0), {0.25, -3.0});
  const Tensor y = conv2d(x, k);
  for (double v : y.channel(0)) EXPECT_EQ(v, 0.25);
  for (double v : y.channel(1)) EXPECT_EQ(v, -3.0);
}

TEST(Conv2dTest, MatchesNestedLoopReference) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor x = oracle::random_tensor(rng, 2, 5, 5);
    const std::size_t k = trial % 2 == 0 ? 3 : 1;
    const ConvKernel kernel = oracle::random_kernel(rng, 3, 2, k);
    const Tensor got = conv2d(x, kernel);
    const Tensor want = oracle::convolve(x, kernel);
    ASSERT_TRUE(got.same_shape(want));
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_LE(oracle::relative_error(got.data()[i], want.data()[i], 1e-300), 1e-12);
    }
  }
}

TEST(Conv2dTest, IsLinearUpToBias) {
  Rng rng(4);
  const Tensor a = oracle::random_tensor(rng, 3, 6, 7);
  const Tensor b = oracle::random_tensor(rng, 3, 6, 7);
  const ConvKernel kernel = oracle::random_kernel(rng, 2, 3, 3);
  const Tensor lhs = conv2d(elementwise(a, b, ElementwiseOp::add), kernel);
  const Tensor ca = conv2d(a, kernel);
  const Tensor cb = conv2d(b, kernel);
  for (std::size_t o = 0; o < 2; ++o) {
    for (std::size_t i = 0; i < lhs.plane_size(); ++i) {
      const double rhs = ca.channel(o)[i] + cb.channel(o)[i] - kernel.bias()[o];
      EXPECT_NEAR(lhs.channel(o)[i], rhs, 1e-10);
    }
  }
}

TEST(Conv2dTest, ChannelMismatchThrows) {
  EXPECT_THROW(conv2d(Tensor(2, 3, 3), ConvKernel(1, 3, 3)), ConfigurationError);
  EXPECT_THROW(ConvKernel(1, 1, 5), ConfigurationError);
}

TEST(Upsample2xTest, ConstantStaysConstant) {
  const Tensor c(2, 3, 4, 1.5);
  const Tensor once = upsample2x(c);
  EXPECT_EQ(once, Tensor(2, 6, 8, 1.5));
  EXPECT_EQ(upsample2x(once), Tensor(2, 12, 16, 1.5));
}

TEST(Upsample2xTest, SinglePixelFillsTwoByTwo) {
  EXPECT_EQ(upsample2x(Tensor(1, 1, 1, 4.0)), Tensor(1, 2, 2, 4.0));
}

TEST(Upsample2xTest, HandEvaluatedBilinearWeights) {
  const Tensor x(1, 2, 2, {1, 2, 3, 4});
  // Output centre u maps to source (u + 0.5) / 2 - 0.5, clamped to [0, 1].
  const Tensor want(1, 4, 4,
                    {1.0, 1.25, 1.75, 2.0,  //
                     1.5, 1.75, 2.25, 2.5,  //
                     2.5, 2.75, 3.25, 3.5,  //
                     3.0, 3.25, 3.75, 4.0});
  const Tensor got = upsample2x(x);
  ASSERT_TRUE(got.same_shape(want));
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_DOUBLE_EQ(got.data()[i], want.data()[i]);
}

TEST(Upsample2xTest, MatchesDirectBilinearFormula) {
  Rng rng(5);
  const Tensor x = oracle::random_tensor(rng, 2, 5, 3);
  const Tensor y = upsample2x(x);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t v = 0; v < y.height(); ++v) {
      for (std::size_t u = 0; u < y.width(); ++u) {
        const double sy = (static_cast<double>(v) + 0.5) / 2.0 - 0.5;
        const double sx = (static_cast<double>(u) + 0.5) / 2.0 - 0.5;
        EXPECT_NEAR(y.at(c, v, u), oracle::bilinear_sample(x, c, sy, sx), 1e-14);
      }
    }
  }
}

TEST(Upsample2xTest, NearestRepeatsPixels) {
  const Tensor x(1, 1, 2, {1, 2});
  EXPECT_EQ(upsample2x(x, UpsampleMode::nearest), Tensor(1, 2, 4, {1, 1, 2, 2, 1, 1, 2, 2}));
}

TEST(ConcatTest, StacksAndSlicesBackExactly) {
  Rng rng(6);
  const Tensor a = oracle::random_tensor(rng, 3, 4, 4);
  const Tensor b = oracle::random_tensor(rng, 5, 4, 4);
  const Tensor ab = concat_channels(a, b);
  EXPECT_EQ(ab.channels(), 8u);
  EXPECT_EQ(ab.slice_channels(0, 3), a);
  EXPECT_EQ(ab.slice_channels(3, 5), b);
  for (std::size_t c = 0; c < 5; ++c) {
    for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(ab.channel(3 + c)[i], b.channel(c)[i]);
  }
}

TEST(ConcatTest, ZeroChannelTensorIsIdentity) {
  Rng rng(7);
  const Tensor a = oracle::random_tensor(rng, 2, 3, 3);
  const Tensor none(0, 3, 3);
  EXPECT_EQ(concat_channels(a, none), a);
  EXPECT_EQ(concat_channels(none, a), a);
}

TEST(ConcatTest, SpatialMismatchThrows) {
  EXPECT_THROW(concat_channels(Tensor(1, 2, 2), Tensor(1, 2, 3)), ConfigurationError);
}

TEST(ElementwiseTest, TrivialCases) {
  Rng rng(8);
  const Tensor a = oracle::random_tensor(rng, 2, 3, 4);
  EXPECT_EQ(elementwise(a, Tensor(2, 3, 4, 1.0), ElementwiseOp::mul), a);
  EXPECT_EQ(elementwise(a, a, ElementwiseOp::sub), Tensor(2, 3, 4, 0.0));
}

TEST(ElementwiseTest, MatchesScalarLoop) {
  Rng rng(9);
  const Tensor a = oracle::random_tensor(rng, 2, 3, 4);
  const Tensor b = oracle::random_tensor(rng, 2, 3, 4);
  const Tensor mul = elementwise(a, b, ElementwiseOp::mul);
  const Tensor add = elementwise(a, b, ElementwiseOp::add);
  const Tensor sub = elementwise(a, b, ElementwiseOp::sub);
  const Tensor rsub = elementwise(1.0, a, ElementwiseOp::sub);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(mul.data()[i], a.data()[i] * b.data()[i]);
    EXPECT_EQ(add.data()[i], a.data()[i] + b.data()[i]);
    EXPECT_EQ(sub.data()[i], a.data()[i] - b.data()[i]);
    EXPECT_EQ(rsub.data()[i], 1.0 - a.data()[i]);
  }
}

TEST(ActivationTest, SigmoidAndSoftplus) {
  EXPECT_EQ(sigmoid(0.0), 0.5);
  EXPECT_LT(sigmoid(-800.0), 1e-300);
  EXPECT_EQ(sigmoid(800.0), 1.0);
  EXPECT_NEAR(softplus(0.0), std::log(2.0), 1e-15);
  EXPECT_EQ(softplus(800.0), 800.0);
  Rng rng(10);
  const Tensor x = oracle::random_tensor(rng, 1, 4, 4, -20.0, 20.0);
  const Tensor s = sigmoid(x);
  const Tensor p = softplus(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x.data()[i];
    EXPECT_NEAR(s.data()[i], 1.0 / (1.0 + std::exp(-v)), 1e-15);
    EXPECT_NEAR(p.data()[i], std::log1p(std::exp(v)), 1e-12);
  }
}

TEST(TensorOpsTest, InputsAreNotModified) {
  Rng rng(11);
  const Tensor a = oracle::random_tensor(rng, 2, 4, 4);
  const Tensor copy = a;
  (void)conv2d(a, oracle::random_kernel(rng, 1, 2, 3));
  (void)upsample2x(a);
  (void)concat_channels(a, a);
  (void)sigmoid(a);
  (void)average_pool2x(a);
  EXPECT_EQ(a, copy);
}

TEST(AveragePoolTest, MeansTwoByTwoBlocks) {
  const Tensor x(1, 2, 4, {1, 2, 3, 4, 5, 6, 7, 8});
  EXPECT_EQ(average_pool2x(x), Tensor(1, 1, 2, {3.5, 5.5}));
}

}  // namespace
}  // namespace pixelhand
