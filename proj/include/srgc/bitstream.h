#ifndef SRGC_BITSTREAM_H_
#define SRGC_BITSTREAM_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace srgc {

inline constexpr char kStreamMagic[4] = {'S', 'R', 'G', 'C'};
inline constexpr uint8_t kStreamVersion = 1;

enum class SectionId : uint8_t {
  kSegmentation = 1,
  kDisparity = 2,
  kStructure = 3,
  kCoefficients = 4,
  kGroups = 5,
  kResidual = 6,
};

std::string SectionName(SectionId id);

// Header flag bits.
inline constexpr uint8_t kFlagGrouping = 1 << 0;
inline constexpr uint8_t kFlagExplicitGroups = 1 << 1;
inline constexpr uint8_t kFlagResidualDct = 1 << 2;

struct StreamHeader {
  uint16_t rows = 0;
  uint16_t cols = 0;
  uint32_t width = 0;
  uint32_t height = 0;
  uint8_t bit_depth = 8;
  uint8_t channels = 1;  // coded channels
  uint8_t flags = 0;
  double q_gft = 1;
  double q_dct = 1;
  uint32_t n_target = 0;
  uint32_t max_vertices = 0;
  uint32_t q_switch = 0;
  double bin_width = 5;
  uint32_t label_count = 0;
  uint64_t seed = 0;

  bool operator==(const StreamHeader&) const = default;
};

struct Section {
  SectionId id = SectionId::kSegmentation;
  uint8_t channel = 0;
  std::vector<uint8_t> payload;

  bool operator==(const Section&) const = default;
};

struct Bitstream {
  StreamHeader header;
  std::vector<Section> sections;

  // Throws DataError("corrupt stream: missing ... section") when absent.
  const Section& Find(SectionId id, uint8_t channel = 0) const;

  bool operator==(const Bitstream&) const = default;
};

// Layout (little-endian): "SRGC", u8 version, fixed header fields in the
// order of StreamHeader, u8 section count, then per section: u8 id,
// u8 channel, u32 payload length, payload. See docs/bitstream.md.
std::vector<uint8_t> Serialize(const Bitstream& bs);
// Throws DataError("unsupported stream ...") on magic/version mismatch and
// DataError("corrupt stream ...") on truncation or trailing bytes.
Bitstream Deserialize(std::span<const uint8_t> bytes);

}  // namespace srgc

#endif  // SRGC_BITSTREAM_H_
