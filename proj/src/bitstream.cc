#include "srgc/bitstream.h"

#include <cstring>

#include "srgc/error.h"

namespace srgc {

std::string SectionName(SectionId id) {
  switch (id) {
    case SectionId::kSegmentation:
      return "segmentation";
    case SectionId::kDisparity:
      return "disparity";
    case SectionId::kStructure:
      return "structure";
    case SectionId::kCoefficients:
      return "coefficient";
    case SectionId::kGroups:
      return "group";
    case SectionId::kResidual:
      return "residual";
  }
  return "unknown(" + std::to_string(int(id)) + ")";
}

const Section& Bitstream::Find(SectionId id, uint8_t channel) const {
  for (const Section& s : sections) {
    if (s.id == id && s.channel == channel) return s;
  }
  throw DataError("corrupt stream: missing " + SectionName(id) + " section");
}

namespace {

class Writer {
 public:
  template <typename T>
  void Put(T v) {
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    // Little-endian regardless of host order.
    uint64_t bits = 0;
    std::memcpy(&bits, raw, sizeof(T));
    for (size_t i = 0; i < sizeof(T); ++i) out.push_back(uint8_t(bits >> (8 * i)));
  }
  std::vector<uint8_t> out;
};

class Reader {
 public:
  explicit Reader(std::span<const uint8_t> in) : in_(in) {}

  template <typename T>
  T Get(const char* what) {
    if (pos_ + sizeof(T) > in_.size()) {
      throw DataError(std::string("corrupt stream: truncated ") + what);
    }
    uint64_t bits = 0;
    for (size_t i = 0; i < sizeof(T); ++i) bits |= uint64_t(in_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, &bits, sizeof(T));
    return v;
  }
  std::span<const uint8_t> Take(size_t n) {
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const uint8_t> in_;
  size_t pos_ = 0;
};

}  // namespace

std::vector<uint8_t> Serialize(const Bitstream& bs) {
  Writer w;
  for (char c : kStreamMagic) w.out.push_back(uint8_t(c));
  w.Put<uint8_t>(kStreamVersion);
  const StreamHeader& h = bs.header;
  w.Put(h.rows);
  w.Put(h.cols);
  w.Put(h.width);
  w.Put(h.height);
  w.Put(h.bit_depth);
  w.Put(h.channels);
  w.Put(h.flags);
  w.Put(h.q_gft);
  w.Put(h.q_dct);
  w.Put(h.n_target);
  w.Put(h.max_vertices);
  w.Put(h.q_switch);
  w.Put(h.bin_width);
  w.Put(h.label_count);
  w.Put(h.seed);
  w.Put<uint8_t>(uint8_t(bs.sections.size()));
  for (const Section& s : bs.sections) {
    w.Put<uint8_t>(uint8_t(s.id));
    w.Put<uint8_t>(s.channel);
    w.Put<uint32_t>(uint32_t(s.payload.size()));
    w.out.insert(w.out.end(), s.payload.begin(), s.payload.end());
  }
  return std::move(w.out);
}

Bitstream Deserialize(std::span<const uint8_t> bytes) {
  if (bytes.size() < 5 || std::memcmp(bytes.data(), kStreamMagic, 4) != 0) {
    throw DataError("unsupported stream: bad magic");
  }
  if (bytes[4] != kStreamVersion) {
    throw DataError("unsupported stream: version " + std::to_string(bytes[4]));
  }
  Reader r(bytes.subspan(5));
  Bitstream bs;
  StreamHeader& h = bs.header;
  const char* kHeader = "header";
  h.rows = r.Get<uint16_t>(kHeader);
  h.cols = r.Get<uint16_t>(kHeader);
  h.width = r.Get<uint32_t>(kHeader);
  h.height = r.Get<uint32_t>(kHeader);
  h.bit_depth = r.Get<uint8_t>(kHeader);
  h.channels = r.Get<uint8_t>(kHeader);
  h.flags = r.Get<uint8_t>(kHeader);
  h.q_gft = r.Get<double>(kHeader);
  h.q_dct = r.Get<double>(kHeader);
  h.n_target = r.Get<uint32_t>(kHeader);
  h.max_vertices = r.Get<uint32_t>(kHeader);
  h.q_switch = r.Get<uint32_t>(kHeader);
  h.bin_width = r.Get<double>(kHeader);
  h.label_count = r.Get<uint32_t>(kHeader);
  h.seed = r.Get<uint64_t>(kHeader);
  const uint8_t count = r.Get<uint8_t>(kHeader);
  for (int i = 0; i < count; ++i) {
    Section s;
    const uint8_t id = r.Get<uint8_t>("section table");
    if (id < 1 || id > 6) {
      throw DataError("corrupt stream: unknown section id " + std::to_string(id));
    }
    s.id = SectionId(id);
    const std::string name = SectionName(s.id) + " section";
    s.channel = r.Get<uint8_t>(name.c_str());
    const uint32_t len = r.Get<uint32_t>(name.c_str());
    if (len > r.remaining()) throw DataError("corrupt stream: truncated " + name);
    const auto payload = r.Take(len);
    s.payload.assign(payload.begin(), payload.end());
    bs.sections.push_back(std::move(s));
  }
  if (r.remaining() != 0) {
    throw DataError("corrupt stream: " + std::to_string(r.remaining()) +
                    " trailing bytes");
  }
  return bs;
}

}  // namespace srgc
