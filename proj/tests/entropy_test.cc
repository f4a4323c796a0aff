#include <gtest/gtest.h>

#include <random>

#include "srgc/entropy.h"
#include "srgc/error.h"

namespace srgc {
namespace {

TEST(EntropyTest, EmptySequence) {
  const auto bytes = EntropyEncode({}, ContextId::kGftLevels);
  EXPECT_EQ(bytes.size(), 2u);  // context byte + zero count
  EXPECT_TRUE(EntropyDecode(bytes, ContextId::kGftLevels).empty());
}

TEST(EntropyTest, RandomRoundTrip) {
  std::mt19937 rng(1);
  std::uniform_int_distribution<int64_t> dist(-255, 255);
  std::vector<int64_t> v(100000);
  for (auto& x : v) x = dist(rng);
  const auto bytes = EntropyEncode(v, ContextId::kResidual);
  EXPECT_EQ(EntropyDecode(bytes, ContextId::kResidual), v);
}

TEST(EntropyTest, ExtremeValues) {
  const std::vector<int64_t> v{0, 1, -1, 14, 15, -15, 16, 1000000, -1000000,
                               INT64_C(1) << 40, -(INT64_C(1) << 40),
                               INT64_C(9223372036854775807),
                               INT64_C(-9223372036854775807)};
  EXPECT_EQ(EntropyDecode(EntropyEncode(v, ContextId::kLabels), ContextId::kLabels), v);
}

TEST(EntropyTest, ZeroRunCompresses) {
  const std::vector<int64_t> zeros(10000, 0);
  const auto bytes = EntropyEncode(zeros, ContextId::kGftLevels);
  EXPECT_LT(bytes.size(), 200u);
  EXPECT_LT(double(bytes.size()), 0.02 * 4 * zeros.size());
}

TEST(EntropyTest, SkewedBeatsUniform) {
  std::mt19937 rng(2);
  std::geometric_distribution<int> geo(0.7);
  std::vector<int64_t> v(20000);
  for (auto& x : v) x = (rng() & 1) ? geo(rng) : -geo(rng);
  const auto bytes = EntropyEncode(v, ContextId::kGftLevels);
  EXPECT_LT(bytes.size(), v.size() / 2);
  EXPECT_EQ(EntropyDecode(bytes, ContextId::kGftLevels), v);
}

TEST(EntropyTest, WrongContextRejected) {
  const auto bytes = EntropyEncode(std::vector<int64_t>{1, 2, 3}, ContextId::kLabels);
  EXPECT_THROW(EntropyDecode(bytes, ContextId::kResidual), Error);
}

TEST(EntropyTest, TruncationDetected) {
  std::mt19937 rng(3);
  std::vector<int64_t> v(5000);
  for (auto& x : v) x = int64_t(rng() % 1000) - 500;
  auto bytes = EntropyEncode(v, ContextId::kResidual);
  bytes.resize(bytes.size() / 2);
  EXPECT_THROW(EntropyDecode(bytes, ContextId::kResidual), Error);
}

TEST(EntropyTest, BandsKeepSeparateStatistics) {
  ArithmeticEncoder enc;
  IntegerModel model(3);
  for (int i = 0; i < 300; ++i) model.Encode(enc, i % 3 == 0 ? 0 : (i % 3 == 1 ? 7 : -40), i % 3);
  enc.EncodeDirect(0x2D, 7);
  const auto bytes = enc.Finish();
  EXPECT_EQ(bytes[0], 0);
  ArithmeticDecoder dec(bytes);
  IntegerModel back(3);
  for (int i = 0; i < 300; ++i) {
    ASSERT_EQ(back.Decode(dec, i % 3), i % 3 == 0 ? 0 : (i % 3 == 1 ? 7 : -40));
  }
  EXPECT_EQ(dec.DecodeDirect(7), 0x2Du);
}

TEST(VarintTest, RoundTrip) {
  std::vector<uint8_t> buf;
  const std::vector<uint64_t> vals{0, 1, 127, 128, 300, 1ull << 35, ~0ull};
  for (uint64_t v : vals) PutVarint(buf, v);
  size_t pos = 0;
  for (uint64_t v : vals) EXPECT_EQ(GetVarint(buf, &pos), v);
  EXPECT_EQ(pos, buf.size());
  EXPECT_THROW(GetVarint(buf, &pos), Error);
}

}  // namespace
}  // namespace srgc
