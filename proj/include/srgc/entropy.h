#ifndef SRGC_ENTROPY_H_
#define SRGC_ENTROPY_H_

#include <cstdint>
#include <span>
#include <vector>

namespace srgc {

// Adaptive binary range coder: 11-bit probabilities of a zero bit, updated by
// 1/32 of the error after every decision, 32-bit range with carry
// propagation through a one-byte cache. The first output byte is always 0.
class ArithmeticEncoder {
 public:
  static constexpr int kProbBits = 11;
  static constexpr uint16_t kProbInit = 1 << (kProbBits - 1);

  void EncodeBit(uint16_t& prob, int bit);
  // Equiprobable bits, most significant first.
  void EncodeDirect(uint64_t value, int bits);
  std::vector<uint8_t> Finish();

 private:
  void ShiftLow();

  uint64_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint8_t cache_ = 0;
  uint64_t cache_size_ = 1;
  std::vector<uint8_t> out_;
};

class ArithmeticDecoder {
 public:
  // Throws DataError("decode desync ...") when the stream is malformed.
  explicit ArithmeticDecoder(std::span<const uint8_t> data);

  int DecodeBit(uint16_t& prob);
  uint64_t DecodeDirect(int bits);

  // Bits consumed so far, for diagnostics.
  uint64_t bit_offset() const { return pos_ * 8; }

 private:
  uint8_t NextByte();
  void Normalize();

  std::span<const uint8_t> data_;
  size_t pos_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint32_t code_ = 0;
};

// Signed integer binarization: zero flag, sign, truncated unary prefix of
// |v| - 1 (kUnaryLimit context-coded bins), then an adaptive Exp-Golomb
// escape. Every bin has its own probability per band, so callers can split
// statistics (e.g. by coefficient frequency) without separate streams.
class IntegerModel {
 public:
  static constexpr int kUnaryLimit = 14;
  static constexpr int kMaxGolombPrefix = 63;

  explicit IntegerModel(int bands = 1);

  void Encode(ArithmeticEncoder& enc, int64_t value, int band = 0);
  int64_t Decode(ArithmeticDecoder& dec, int band = 0);

 private:
  struct Band {
    uint16_t zero = ArithmeticEncoder::kProbInit;
    uint16_t sign = ArithmeticEncoder::kProbInit;
    uint16_t unary[kUnaryLimit];
    uint16_t golomb[kMaxGolombPrefix + 1];
    Band();
  };
  std::vector<Band> bands_;
};

// Stream contexts: each section of a bitstream gets its own statistics.
enum class ContextId : uint8_t {
  kLabels = 0,
  kDisparity = 1,
  kStructure = 2,
  kGftLevels = 3,
  kDctLevels = 4,
  kResidual = 5,
  kGroups = 6,
};

// Self-contained integer stream: context id byte, LEB128 symbol count, then
// the range-coded payload (absent when the count is 0).
std::vector<uint8_t> EntropyEncode(std::span<const int64_t> symbols,
                                   ContextId ctx);
std::vector<int64_t> EntropyDecode(std::span<const uint8_t> bytes,
                                   ContextId ctx);

void PutVarint(std::vector<uint8_t>& out, uint64_t v);
// Advances *pos; throws DataError on truncation.
uint64_t GetVarint(std::span<const uint8_t> in, size_t* pos);

}  // namespace srgc

#endif  // SRGC_ENTROPY_H_
