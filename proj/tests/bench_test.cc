#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "srgc/bench.h"
#include "srgc/codec.h"
#include "srgc/error.h"
#include "test_util.h"

namespace srgc {
namespace {

TEST(PsnrTest, Examples) {
  const LightField a = testing::ConstantLightField(2, 2, 8, 8, 8, 100);
  EXPECT_TRUE(std::isinf(Psnr(a, a)));
  LightField b = a;
  for (size_t i = 0; i < b.views.size(); ++i)
    for (uint16_t& s : b.views[i].planes[0].samples) s = (i % 2) ? 101 : 99;
  EXPECT_NEAR(Psnr(a, b), 48.1308, 1e-3);
  EXPECT_EQ(Psnr(a, b), Psnr(b, a));

  const LightField c = testing::ConstantLightField(1, 2, 4, 4, 10, 500);
  const LightField d = testing::ConstantLightField(1, 2, 4, 4, 10, 502);
  EXPECT_NEAR(Psnr(c, d), 54.1769, 1e-3);  // 10 log10(1023^2 / 4)
  EXPECT_THROW(Psnr(a, c), Error);
}

TEST(BppTest, Examples) {
  const LightField lf(2, 2, 50, 40, 8, 1);
  EXPECT_DOUBLE_EQ(Bpp(1000, lf), 1.0);
  EXPECT_DOUBLE_EQ(Bpp(2000, lf), 2 * Bpp(1000, lf));
}

TEST(RatioTest, TableValues) {
  const GroupingRatios r = ComputeGroupingRatios(1026, 1252, 4390);
  EXPECT_NEAR(r.coarsened, 0.8195, 1e-4);
  EXPECT_EQ(std::round(r.coarsened * 100) / 100, 0.82);
  EXPECT_EQ(std::round(r.overall * 100) / 100, 0.23);
  const GroupingRatios s = ComputeGroupingRatios(418, 853, 853);
  EXPECT_EQ(std::round(s.coarsened * 100) / 100, 0.49);
  const GroupingRatios z = ComputeGroupingRatios(0, 10, 20);
  EXPECT_EQ(z.coarsened, 0.0);
  EXPECT_EQ(z.overall, 0.0);
  EXPECT_GE(r.coarsened, r.overall);
}

TEST(BppTest, ConstantCheaperThanNoise) {
  auto [noise, d] = SynthesizeLightField(ParseSceneSpec(
      "angular 2 2\nspatial 32 32\nbackground 0 noise 1 128 100\n"));
  const LightField flat = testing::ConstantLightField(2, 2, 32, 32, 8, 90);
  CodecConfig cfg;
  cfg.slic_k = 4;
  const uint64_t a = Serialize(Encode(flat, d, cfg).first).size();
  const uint64_t b = Serialize(Encode(noise, d, cfg).first).size();
  EXPECT_LT(Bpp(a, flat), Bpp(b, noise));
}

TEST(SweepTest, MonotoneAndCsv) {
  auto [lf, d] = SynthesizeLightField(ParseSceneSpec(testing::kTwoPatchScene));
  CodecConfig cfg;
  cfg.slic_k = 8;
  cfg.residual_mode = ResidualMode::kDct;
  // Keep every q on the same side of the mode switch so graphs match.
  cfg.q_switch = 1000;
  const auto pts = RdSweep(lf, d, {32, 16, 8, 4, 2}, cfg);
  ASSERT_EQ(pts.size(), 5u);
  for (size_t i = 1; i < pts.size(); ++i) {
    EXPECT_GE(pts[i].bpp, pts[i - 1].bpp);
    EXPECT_GE(pts[i].psnr_y, pts[i - 1].psnr_y - 1e-9);
  }
  const std::string csv = FormatRdCsv(pts);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kRdCsvHeader);
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 5);
  const std::string one = FormatRdCsv(RdSweep(lf, d, {8}, cfg));
  EXPECT_EQ(std::count(one.begin(), one.end(), '\n'), 2);
}

}  // namespace
}  // namespace srgc
