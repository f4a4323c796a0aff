#include "srgc/bench.h"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "srgc/bitstream.h"
#include "srgc/error.h"

namespace srgc {

double Psnr(const LightField& a, const LightField& b) {
  if (a.rows != b.rows || a.cols != b.cols || a.width != b.width ||
      a.height != b.height || a.bit_depth != b.bit_depth) {
    throw InvalidArgument("psnr: light fields differ in dimensions or bit depth");
  }
  double sse = 0;
  size_t count = 0;
  for (size_t v = 0; v < a.views.size(); ++v) {
    const auto& pa = a.views[v].planes.at(0).samples;
    const auto& pb = b.views[v].planes.at(0).samples;
    for (size_t i = 0; i < pa.size(); ++i) {
      const double d = double(pa[i]) - double(pb[i]);
      sse += d * d;
    }
    count += pa.size();
  }
  if (sse == 0) return std::numeric_limits<double>::infinity();
  const double peak = double(a.max_value());
  return 10.0 * std::log10(peak * peak / (sse / double(count)));
}

double Bpp(uint64_t stream_bytes, const LightField& lf) {
  return 8.0 * double(stream_bytes) / double(lf.total_pixels());
}

GroupingRatios ComputeGroupingRatios(uint64_t grouped, uint64_t coarsened,
                                     uint64_t total) {
  GroupingRatios r;
  r.coarsened = coarsened == 0 ? 0.0 : double(grouped) / double(coarsened);
  r.overall = total == 0 ? 0.0 : double(grouped) / double(total);
  return r;
}

GroupingRatios ComputeGroupingRatios(const EncodeReport& report) {
  return ComputeGroupingRatios(report.grouping.grouped,
                               report.grouping.coarsened, report.total_units);
}

std::vector<RdPoint> RdSweep(const LightField& lf, const DisparityMap& dmap,
                             const std::vector<double>& q_list,
                             const CodecConfig& cfg) {
  if (q_list.empty()) throw InvalidArgument("rd sweep needs at least one q");
  const LightField target = CodingTarget(lf, cfg.channels);
  std::vector<RdPoint> points;
  for (double q : q_list) {
    CodecConfig run = cfg;
    run.q_gft = q;
    const auto t0 = std::chrono::steady_clock::now();
    auto [bs, enc] = Encode(lf, dmap, run);
    const std::vector<uint8_t> bytes = Serialize(bs);
    const auto t1 = std::chrono::steady_clock::now();
    auto [rec, dec] = Decode(Deserialize(bytes), run.threads);
    const auto t2 = std::chrono::steady_clock::now();
    RdPoint p;
    p.q_gft = q;
    p.q_dct = run.q_dct;
    p.bpp = Bpp(bytes.size(), target);
    p.psnr_y = Psnr(target, rec);
    p.eig_enc = enc.eig_count;
    p.eig_dec = dec.eig_count;
    p.groups = enc.grouping.groups;
    p.grouped = enc.grouping.grouped;
    p.coarsened = enc.grouping.coarsened;
    p.total_sr = enc.total_units;
    const GroupingRatios ratios = ComputeGroupingRatios(enc);
    p.ratio_c = ratios.coarsened;
    p.ratio_o = ratios.overall;
    p.t_enc_s = std::chrono::duration<double>(t1 - t0).count();
    p.t_dec_s = std::chrono::duration<double>(t2 - t1).count();
    points.push_back(p);
  }
  return points;
}

std::string FormatRdCsv(const std::vector<RdPoint>& points) {
  std::ostringstream out;
  out.precision(10);
  out << kRdCsvHeader << "\n";
  for (const RdPoint& p : points) {
    out << p.q_gft << "," << p.q_dct << "," << p.bpp << ",";
    if (std::isinf(p.psnr_y)) {
      out << "inf";
    } else {
      out << p.psnr_y;
    }
    out << "," << p.eig_enc << "," << p.eig_dec << "," << p.groups << ","
        << p.grouped << "," << p.coarsened << "," << p.total_sr << ","
        << p.ratio_c << "," << p.ratio_o << "," << p.t_enc_s << ","
        << p.t_dec_s << "\n";
  }
  return out.str();
}

}  // namespace srgc
