#include "srgc/entropy.h"

#include <string>

#include "srgc/error.h"

namespace srgc {

namespace {

constexpr int kMoveBits = 5;
constexpr uint32_t kTopValue = 1u << 24;
// Bytes the decoder may read past the end before calling it a desync; the
// encoder flush leaves this many implied bytes.
constexpr size_t kOverrunSlack = 4;

}  // namespace

void ArithmeticEncoder::ShiftLow() {
  if (uint32_t(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    const uint8_t carry = uint8_t(low_ >> 32);
    uint8_t temp = cache_;
    do {
      out_.push_back(uint8_t(temp + carry));
      temp = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = uint8_t(low_ >> 24);
  }
  ++cache_size_;
  low_ = (low_ & 0x00FFFFFFu) << 8;
}

void ArithmeticEncoder::EncodeBit(uint16_t& prob, int bit) {
  const uint32_t bound = (range_ >> kProbBits) * prob;
  if (bit == 0) {
    range_ = bound;
    prob += ((1 << kProbBits) - prob) >> kMoveBits;
  } else {
    low_ += bound;
    range_ -= bound;
    prob -= prob >> kMoveBits;
  }
  while (range_ < kTopValue) {
    range_ <<= 8;
    ShiftLow();
  }
}

void ArithmeticEncoder::EncodeDirect(uint64_t value, int bits) {
  for (int i = bits - 1; i >= 0; --i) {
    range_ >>= 1;
    if ((value >> i) & 1) low_ += range_;
    while (range_ < kTopValue) {
      range_ <<= 8;
      ShiftLow();
    }
  }
}

std::vector<uint8_t> ArithmeticEncoder::Finish() {
  for (int i = 0; i < 5; ++i) ShiftLow();
  return std::move(out_);
}

ArithmeticDecoder::ArithmeticDecoder(std::span<const uint8_t> data)
    : data_(data) {
  if (data.empty() || data[0] != 0) {
    throw DataError("decode desync at bit 0: bad range coder preamble");
  }
  pos_ = 1;
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | NextByte();
}

uint8_t ArithmeticDecoder::NextByte() {
  if (pos_ < data_.size()) return data_[pos_++];
  if (pos_ >= data_.size() + kOverrunSlack) {
    throw DataError("decode desync at bit " + std::to_string(bit_offset()) +
                    ": read past end of payload");
  }
  ++pos_;
  return 0;
}

void ArithmeticDecoder::Normalize() {
  while (range_ < kTopValue) {
    range_ <<= 8;
    code_ = (code_ << 8) | NextByte();
  }
}

int ArithmeticDecoder::DecodeBit(uint16_t& prob) {
  const uint32_t bound = (range_ >> ArithmeticEncoder::kProbBits) * prob;
  int bit;
  if (code_ < bound) {
    range_ = bound;
    prob += ((1 << ArithmeticEncoder::kProbBits) - prob) >> kMoveBits;
    bit = 0;
  } else {
    code_ -= bound;
    range_ -= bound;
    prob -= prob >> kMoveBits;
    bit = 1;
  }
  Normalize();
  return bit;
}

uint64_t ArithmeticDecoder::DecodeDirect(int bits) {
  uint64_t v = 0;
  for (int i = 0; i < bits; ++i) {
    range_ >>= 1;
    int bit = 0;
    if (code_ >= range_) {
      code_ -= range_;
      bit = 1;
    }
    v = (v << 1) | uint64_t(bit);
    Normalize();
  }
  return v;
}

IntegerModel::Band::Band() {
  for (auto& p : unary) p = ArithmeticEncoder::kProbInit;
  for (auto& p : golomb) p = ArithmeticEncoder::kProbInit;
}

IntegerModel::IntegerModel(int bands) : bands_(size_t(bands < 1 ? 1 : bands)) {}

void IntegerModel::Encode(ArithmeticEncoder& enc, int64_t value, int band) {
  Band& b = bands_.at(size_t(band));
  enc.EncodeBit(b.zero, value == 0 ? 0 : 1);
  if (value == 0) return;
  enc.EncodeBit(b.sign, value < 0 ? 1 : 0);
  uint64_t rest = (value < 0 ? 0 - uint64_t(value) : uint64_t(value)) - 1;
  for (int i = 0; i < kUnaryLimit; ++i) {
    if (rest == 0) {
      enc.EncodeBit(b.unary[i], 0);
      return;
    }
    enc.EncodeBit(b.unary[i], 1);
    --rest;
  }
  // Exp-Golomb order 0 of `rest`: prefix length n, then n low bits of rest+1.
  const uint64_t v = rest + 1;
  int n = 0;
  while ((v >> (n + 1)) != 0) ++n;
  for (int i = 0; i < n; ++i) enc.EncodeBit(b.golomb[i], 1);
  enc.EncodeBit(b.golomb[n], 0);
  enc.EncodeDirect(v & ((uint64_t(1) << n) - 1), n);
}

int64_t IntegerModel::Decode(ArithmeticDecoder& dec, int band) {
  Band& b = bands_.at(size_t(band));
  if (dec.DecodeBit(b.zero) == 0) return 0;
  const bool negative = dec.DecodeBit(b.sign) == 1;
  uint64_t mag = 1;
  int i = 0;
  for (; i < kUnaryLimit; ++i) {
    if (dec.DecodeBit(b.unary[i]) == 0) break;
    ++mag;
  }
  if (i == kUnaryLimit) {
    int n = 0;
    while (dec.DecodeBit(b.golomb[n]) == 1) {
      if (++n > kMaxGolombPrefix) {
        throw DataError("decode desync at bit " +
                        std::to_string(dec.bit_offset()) +
                        ": Exp-Golomb prefix too long");
      }
    }
    const uint64_t v = (uint64_t(1) << n) | dec.DecodeDirect(n);
    mag += v - 1;
  }
  return negative ? -int64_t(mag) : int64_t(mag);
}

void PutVarint(std::vector<uint8_t>& out, uint64_t v) {
  while (v >= 0x80) {
    out.push_back(uint8_t(v | 0x80));
    v >>= 7;
  }
  out.push_back(uint8_t(v));
}

uint64_t GetVarint(std::span<const uint8_t> in, size_t* pos) {
  uint64_t v = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    if (*pos >= in.size()) throw DataError("truncated varint");
    const uint8_t byte = in[(*pos)++];
    v |= uint64_t(byte & 0x7f) << shift;
    if ((byte & 0x80) == 0) return v;
  }
  throw DataError("malformed varint");
}

std::vector<uint8_t> EntropyEncode(std::span<const int64_t> symbols,
                                   ContextId ctx) {
  std::vector<uint8_t> out;
  out.push_back(uint8_t(ctx));
  PutVarint(out, symbols.size());
  if (symbols.empty()) return out;
  ArithmeticEncoder enc;
  IntegerModel model;
  for (int64_t s : symbols) model.Encode(enc, s);
  const auto payload = enc.Finish();
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

std::vector<int64_t> EntropyDecode(std::span<const uint8_t> bytes,
                                   ContextId ctx) {
  if (bytes.empty() || bytes[0] != uint8_t(ctx)) {
    throw DataError("decode desync at bit 0: context id mismatch");
  }
  size_t pos = 1;
  const uint64_t count = GetVarint(bytes, &pos);
  std::vector<int64_t> out;
  if (count == 0) {
    if (pos != bytes.size()) {
      throw DataError("decode desync at bit " + std::to_string(pos * 8) +
                      ": trailing bytes after empty stream");
    }
    return out;
  }
  // Every symbol costs at least some fraction of a bit; bound absurd counts.
  if (count > (bytes.size() - pos + 16) * 8 * 2048) {
    throw DataError("decode desync: symbol count exceeds payload capacity");
  }
  ArithmeticDecoder dec(bytes.subspan(pos));
  IntegerModel model;
  out.reserve(count);
  for (uint64_t i = 0; i < count; ++i) out.push_back(model.Decode(dec));
  return out;
}

}  // namespace srgc
