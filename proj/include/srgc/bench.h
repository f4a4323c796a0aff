#ifndef SRGC_BENCH_H_
#define SRGC_BENCH_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "srgc/codec.h"
#include "srgc/light_field.h"

namespace srgc {

// PSNR in dB over every sample of channel 0 (luma) of every view. Identical
// inputs return +infinity.
double Psnr(const LightField& a, const LightField& b);

// 8 * bytes / (views * width * height).
double Bpp(uint64_t stream_bytes, const LightField& lf);

struct GroupingRatios {
  double coarsened = 0;  // grouped / coarsened
  double overall = 0;    // grouped / all super-rays
};
GroupingRatios ComputeGroupingRatios(uint64_t grouped, uint64_t coarsened,
                                     uint64_t total);
GroupingRatios ComputeGroupingRatios(const EncodeReport& report);

struct RdPoint {
  double q_gft = 0;
  double q_dct = 0;
  double bpp = 0;
  double psnr_y = 0;
  uint64_t eig_enc = 0;
  uint64_t eig_dec = 0;
  uint64_t groups = 0;
  uint64_t grouped = 0;
  uint64_t coarsened = 0;
  uint64_t total_sr = 0;
  double ratio_c = 0;
  double ratio_o = 0;
  double t_enc_s = 0;
  double t_dec_s = 0;
};

// One encode + serialize + decode per q_gft value, in list order.
std::vector<RdPoint> RdSweep(const LightField& lf, const DisparityMap& dmap,
                             const std::vector<double>& q_list,
                             const CodecConfig& cfg);

inline constexpr const char* kRdCsvHeader =
    "q_gft,q_dct,bpp,psnr_y,eig_enc,eig_dec,groups,grouped,coarsened,total_sr,"
    "ratio_c,ratio_o,t_enc_s,t_dec_s";

// Infinite PSNR is written as "inf".
std::string FormatRdCsv(const std::vector<RdPoint>& points);

}  // namespace srgc

#endif  // SRGC_BENCH_H_
