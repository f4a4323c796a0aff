#ifndef SRGC_CODEC_H_
#define SRGC_CODEC_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "srgc/bitstream.h"
#include "srgc/light_field.h"

namespace srgc {

enum class ResidualMode { kRaw, kDct };
enum class ChannelMode { kLuma, kAll };

struct CodecConfig {
  double q_gft = 8.0;   // GFT coefficient step
  double q_dct = 4.0;   // residual DCT step (dct residual mode)
  int n_target = 256;   // coarsened graph dimension
  int max_vertices = 512;
  int q_switch = 16;    // q_gft >= q_switch selects coarsening
  int slic_k = 64;
  double compactness = 10.0;
  double bin_width = 5.0;
  bool grouping = true;
  bool explicit_groups = false;
  ResidualMode residual_mode = ResidualMode::kRaw;
  ChannelMode channels = ChannelMode::kLuma;
  uint64_t seed = 0;  // recorded in the header; the pipeline is deterministic
  int threads = 1;    // worker pool size, never affects output bytes

  // Throws InvalidArgument on out-of-range values.
  void Validate() const;
};

// Sets one field from its key=value spelling (keys match the field names,
// plus "no_grouping"). Throws InvalidArgument for unknown keys or bad values.
void ApplyConfigEntry(CodecConfig& cfg, std::string_view key,
                      std::string_view value);
// key=value lines, '#' comments.
void ApplyConfigText(CodecConfig& cfg, std::string_view text);

// How one super-ray is turned into coded graphs.
enum class UnitMode : uint8_t {
  kDirect = 0,     // coded at native size
  kCoarsen = 1,    // reduced to exactly n_target supernodes
  kPartition = 2,  // split into parts of at most max_vertices
};

// Per coded-graph detail, filled when details are requested.
struct UnitDetail {
  int super_ray = 0;
  UnitMode mode = UnitMode::kDirect;
  int fine_dim = 0;
  int coded_dim = 0;
  bool grouped = false;
  bool is_main = false;
  int group = -1;  // index into the channel-0 group list
  std::vector<double> coded_signal;     // encoder: signal fed to the GFT
  std::vector<double> coefficients;     // dequantized GFT coefficients
  std::vector<int64_t> original;        // encoder: fine samples
  std::vector<int64_t> predicted;       // grouped non-main members
  std::vector<int64_t> residual;        // grouped non-main members
  std::vector<double> reconstructed;    // decoder: U * dequantized coeffs
  std::vector<int64_t> decoded;         // decoder: final fine samples
};

struct GroupingStats {
  uint64_t coarsened = 0;
  uint64_t pairs = 0;
  double threshold = 0;
  uint64_t pairs_under_threshold = 0;
  uint64_t one_level_groups = 0;
  uint64_t groups = 0;
  uint64_t grouped = 0;
};

struct EncodeReport {
  uint64_t super_rays = 0;   // segmentation labels
  uint64_t total_units = 0;  // coded graphs (partition parts counted)
  uint64_t coarsened = 0;
  uint64_t partitioned = 0;  // units produced by partitioning
  uint64_t direct = 0;
  uint64_t partition_bound_unmet = 0;
  GroupingStats grouping;     // channel 0
  double ratio_coarsened = 0;
  double ratio_overall = 0;
  uint64_t eig_count = 0;
  uint64_t stream_bytes = 0;
  std::map<std::string, double> stage_seconds;
  std::vector<UnitDetail> units;  // channel 0, when requested
};

struct DecodeReport {
  uint64_t total_units = 0;
  uint64_t coarsened = 0;
  uint64_t groups = 0;
  uint64_t grouped = 0;
  uint64_t ungrouped = 0;
  uint64_t eig_count = 0;
  std::map<std::string, double> stage_seconds;
  std::vector<UnitDetail> units;  // channel 0, when requested
};

std::pair<Bitstream, EncodeReport> Encode(const LightField& lf,
                                          const DisparityMap& dmap,
                                          const CodecConfig& cfg,
                                          bool collect_details = false);

std::pair<LightField, DecodeReport> Decode(const Bitstream& bs, int threads = 1,
                                           bool collect_details = false);

// The light field the codec actually compares against: luma-converted in
// luma mode, untouched otherwise.
LightField CodingTarget(const LightField& lf, ChannelMode mode);

// key=value lines.
std::string FormatReport(const EncodeReport& r);
std::string FormatReport(const DecodeReport& r);

}  // namespace srgc

#endif  // SRGC_CODEC_H_
