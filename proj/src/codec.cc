#include "srgc/codec.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>

#include "srgc/entropy.h"
#include "srgc/error.h"
#include "srgc/grouping.h"
#include "srgc/parallel.h"
#include "srgc/segmentation.h"
#include "srgc/spectral.h"
#include "srgc/transform.h"

namespace srgc {

// ---------------------------------------------------------------------------
// Configuration.

void CodecConfig::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidArgument(std::string("invalid config: ") + what);
  };
  require(q_gft > 0 && std::isfinite(q_gft), "q_gft must be > 0");
  require(q_dct > 0 && std::isfinite(q_dct), "q_dct must be > 0");
  require(n_target >= 1, "n_target must be >= 1");
  require(max_vertices >= 1, "max_vertices must be >= 1");
  require(q_switch >= 0, "q_switch must be >= 0");
  require(slic_k >= 1, "slic_k must be >= 1");
  require(compactness > 0, "compactness must be > 0");
  require(bin_width > 0 && std::isfinite(bin_width), "bin_width must be > 0");
  require(threads >= 1, "threads must be >= 1");
}

namespace {

template <typename T>
T ParseNumber(std::string_view key, std::string_view value) {
  T out{};
  if constexpr (std::is_floating_point_v<T>) {
    // std::from_chars for double is available, but stay tolerant of '+'.
    try {
      size_t used = 0;
      out = std::stod(std::string(value), &used);
      if (used == value.size()) return out;
    } catch (const std::exception&) {
    }
  } else {
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec == std::errc() && ptr == value.data() + value.size()) return out;
  }
  throw InvalidArgument("bad value '" + std::string(value) + "' for " +
                        std::string(key));
}

bool ParseBool(std::string_view key, std::string_view value) {
  if (value == "1" || value == "true" || value == "on" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "off" || value == "no") return false;
  throw InvalidArgument("bad boolean '" + std::string(value) + "' for " +
                        std::string(key));
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

void ApplyConfigEntry(CodecConfig& cfg, std::string_view key,
                      std::string_view value) {
  key = Trim(key);
  value = Trim(value);
  if (key == "q_gft") {
    cfg.q_gft = ParseNumber<double>(key, value);
  } else if (key == "q_dct") {
    cfg.q_dct = ParseNumber<double>(key, value);
  } else if (key == "n_target") {
    cfg.n_target = ParseNumber<int>(key, value);
  } else if (key == "max_vertices") {
    cfg.max_vertices = ParseNumber<int>(key, value);
  } else if (key == "q_switch") {
    cfg.q_switch = ParseNumber<int>(key, value);
  } else if (key == "slic_k") {
    cfg.slic_k = ParseNumber<int>(key, value);
  } else if (key == "compactness") {
    cfg.compactness = ParseNumber<double>(key, value);
  } else if (key == "bin_width") {
    cfg.bin_width = ParseNumber<double>(key, value);
  } else if (key == "grouping") {
    cfg.grouping = ParseBool(key, value);
  } else if (key == "no_grouping") {
    cfg.grouping = !ParseBool(key, value);
  } else if (key == "explicit_groups") {
    cfg.explicit_groups = ParseBool(key, value);
  } else if (key == "residual_mode") {
    if (value == "raw") {
      cfg.residual_mode = ResidualMode::kRaw;
    } else if (value == "dct") {
      cfg.residual_mode = ResidualMode::kDct;
    } else {
      throw InvalidArgument("residual_mode must be raw or dct");
    }
  } else if (key == "channels") {
    if (value == "luma") {
      cfg.channels = ChannelMode::kLuma;
    } else if (value == "all") {
      cfg.channels = ChannelMode::kAll;
    } else {
      throw InvalidArgument("channels must be luma or all");
    }
  } else if (key == "seed") {
    cfg.seed = ParseNumber<uint64_t>(key, value);
  } else if (key == "threads") {
    cfg.threads = ParseNumber<int>(key, value);
  } else {
    throw InvalidArgument("unknown config key '" + std::string(key) + "'");
  }
}

void ApplyConfigText(CodecConfig& cfg, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (Trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config line " + std::to_string(line_no) +
                            ": expected key=value");
    }
    ApplyConfigEntry(cfg, std::string_view(line).substr(0, eq),
                     std::string_view(line).substr(eq + 1));
  }
}

LightField CodingTarget(const LightField& lf, ChannelMode mode) {
  return mode == ChannelMode::kLuma ? ToLuma(lf) : lf;
}

// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

class StageTimer {
 public:
  explicit StageTimer(std::map<std::string, double>* sink) : sink_(sink) {}
  void Mark(const std::string& stage) {
    const auto now = Clock::now();
    (*sink_)[stage] += std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }

 private:
  std::map<std::string, double>* sink_;
  Clock::time_point last_ = Clock::now();
};

// One coded graph.
struct Unit {
  int super_ray = 0;
  UnitMode mode = UnitMode::kDirect;
  SuperRay pixels;
  LocalGraph fine;  // topology only
  LocalGraph coarse;
  CoarseningMap map;
  int components = 0;

  bool coarsened() const { return mode == UnitMode::kCoarsen; }
  const LocalGraph& coded() const { return coarsened() ? coarse : fine; }
  int coded_dim() const { return coded().vertex_count; }
};

struct Geometry {
  int rows, cols, width, height;
};

// Expands super-rays into units according to their modes. Pure function of
// its inputs; the parallel loop only fills per-super-ray slots.
std::vector<Unit> BuildUnits(const std::vector<SuperRay>& rays,
                             const std::vector<UnitMode>& modes,
                             const Geometry& geo, int n_target,
                             int max_vertices, int threads,
                             uint64_t* bound_unmet,
                             std::vector<int>* parts_per_ray) {
  std::vector<std::vector<Unit>> per_ray(rays.size());
  std::vector<char> unmet(rays.size(), 0);
  ParallelFor(rays.size(), threads, [&](size_t r) {
    std::vector<SuperRay> pieces;
    if (modes[r] == UnitMode::kPartition) {
      PartitionResult parts =
          PartitionSuperRay(rays[r], max_vertices, geo.cols, geo.width);
      unmet[r] = parts.bound_unmet;
      pieces = std::move(parts.parts);
    } else {
      pieces.push_back(rays[r]);
    }
    for (SuperRay& piece : pieces) {
      Unit u;
      u.super_ray = int(r);
      u.mode = modes[r];
      u.fine = BuildLocalGraphTopology(piece, geo.cols, geo.width, geo.height);
      u.pixels = std::move(piece);
      if (u.coarsened()) {
        auto [coarse, map] = Coarsen(u.fine, n_target);
        u.coarse = std::move(coarse);
        u.map = std::move(map);
      }
      u.components = CountComponents(u.coded());
      per_ray[r].push_back(std::move(u));
    }
  });
  std::vector<Unit> units;
  if (parts_per_ray) parts_per_ray->clear();
  for (size_t r = 0; r < rays.size(); ++r) {
    if (bound_unmet) *bound_unmet += unmet[r];
    if (parts_per_ray) parts_per_ray->push_back(int(per_ray[r].size()));
    for (Unit& u : per_ray[r]) units.push_back(std::move(u));
  }
  return units;
}

std::vector<int64_t> FineSamples(const Unit& u, const Plane* const* planes) {
  std::vector<int64_t> out;
  out.reserve(u.fine.vertices.size());
  for (const VertexId& v : u.fine.vertices) {
    out.push_back(planes[v.view]->samples[v.pixel]);
  }
  return out;
}

std::vector<double> CodedSignal(const Unit& u, const std::vector<int64_t>& fine) {
  if (!u.coarsened()) return {fine.begin(), fine.end()};
  std::vector<double> coarse(u.map.coarse_count(), 0.0);
  for (size_t v = 0; v < fine.size(); ++v) {
    coarse[u.map.fine_to_coarse[v]] += double(fine[v]);
  }
  for (int c = 0; c < u.map.coarse_count(); ++c) {
    coarse[c] /= u.map.supernode_sizes[c];
  }
  return coarse;
}

// Near-zero graph frequencies (one per connected component) keep a step of
// at most 1 so constant regions survive quantization exactly.
double CoefficientStep(int index, int components, double q) {
  return index < components ? std::min(q, 1.0) : q;
}

int FrequencyBand(int index, int components) {
  if (index < components) return 0;
  int bits = 0;
  while ((index >> bits) != 0) ++bits;
  return std::min(bits, 15);
}
constexpr int kFrequencyBands = 16;

std::vector<double> DequantizeCoefficients(const std::vector<int64_t>& levels,
                                           int components, double q) {
  std::vector<double> out(levels.size());
  for (size_t k = 0; k < levels.size(); ++k) {
    out[k] = double(levels[k]) * CoefficientStep(int(k), components, q);
  }
  return out;
}

// --- Segmentation labels --------------------------------------------------

struct LabelContexts {
  uint16_t same_left[3] = {ArithmeticEncoder::kProbInit,
                           ArithmeticEncoder::kProbInit,
                           ArithmeticEncoder::kProbInit};
  uint16_t same_up[2] = {ArithmeticEncoder::kProbInit,
                         ArithmeticEncoder::kProbInit};
  uint16_t is_new = ArithmeticEncoder::kProbInit;
  IntegerModel explicit_label;
};

std::vector<uint8_t> EncodeLabels(const std::vector<int32_t>& labels, int width,
                                  int height) {
  ArithmeticEncoder enc;
  LabelContexts ctx;
  int32_t next_new = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const size_t p = size_t(y) * width + x;
      const int32_t l = labels[p];
      const int32_t left = x > 0 ? labels[p - 1] : -1;
      const int32_t up = y > 0 ? labels[p - width] : -1;
      bool done = false;
      if (left >= 0) {
        const int c = up < 0 ? 0 : (up == left ? 1 : 2);
        enc.EncodeBit(ctx.same_left[c], l == left);
        done = l == left;
      }
      if (!done && up >= 0 && up != left) {
        enc.EncodeBit(ctx.same_up[left >= 0 ? 0 : 1], l == up);
        done = l == up;
      }
      if (!done) {
        enc.EncodeBit(ctx.is_new, l == next_new);
        if (l != next_new) ctx.explicit_label.Encode(enc, l);
      }
      next_new = std::max(next_new, l + 1);
    }
  }
  return enc.Finish();
}

std::vector<int32_t> DecodeLabels(std::span<const uint8_t> payload, int width,
                                  int height, int label_count) {
  ArithmeticDecoder dec(payload);
  LabelContexts ctx;
  std::vector<int32_t> labels(size_t(width) * height);
  int32_t next_new = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const size_t p = size_t(y) * width + x;
      const int32_t left = x > 0 ? labels[p - 1] : -1;
      const int32_t up = y > 0 ? labels[p - width] : -1;
      std::optional<int32_t> l;
      if (left >= 0) {
        const int c = up < 0 ? 0 : (up == left ? 1 : 2);
        if (dec.DecodeBit(ctx.same_left[c])) l = left;
      }
      if (!l && up >= 0 && up != left) {
        if (dec.DecodeBit(ctx.same_up[left >= 0 ? 0 : 1])) l = up;
      }
      if (!l) {
        if (dec.DecodeBit(ctx.is_new)) {
          l = next_new;
        } else {
          const int64_t v = ctx.explicit_label.Decode(dec);
          if (v < 0 || v >= label_count) {
            throw DataError("corrupt stream: label " + std::to_string(v) +
                            " out of range in segmentation section");
          }
          l = int32_t(v);
        }
      }
      if (*l >= label_count) {
        throw DataError("corrupt stream: label out of range in segmentation section");
      }
      labels[p] = *l;
      next_new = std::max(next_new, *l + 1);
    }
  }
  return labels;
}

// Runs a decoder over a section payload and rewrites desync errors so they
// name the section.
template <typename Fn>
auto WithSection(SectionId id, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kData) throw;
    throw DataError("corrupt stream: " + SectionName(id) + " section: " +
                    e.what());
  }
}

uint8_t HeaderFlags(const CodecConfig& cfg) {
  uint8_t flags = 0;
  if (cfg.grouping) flags |= kFlagGrouping;
  if (cfg.explicit_groups) flags |= kFlagExplicitGroups;
  if (cfg.residual_mode == ResidualMode::kDct) flags |= kFlagResidualDct;
  return flags;
}

// Per-channel coded state shared by the encoder and decoder paths.
struct ChannelState {
  std::vector<std::vector<int64_t>> levels;  // per unit
  std::vector<std::vector<double>> dequantized;
  GroupSet groups;                   // indices into `coarsened`
  std::vector<int> coarsened;        // unit ids of coarsened units
  std::vector<int> main_of;          // per unit: main unit id, or -1
};

void FillMainOf(ChannelState& ch, size_t unit_count) {
  ch.main_of.assign(unit_count, -1);
  for (const auto& g : ch.groups.groups) {
    const int main_unit = ch.coarsened[g.main];
    for (int m : g.members) {
      if (m != g.main) ch.main_of[ch.coarsened[m]] = main_unit;
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Encoder.

std::pair<Bitstream, EncodeReport> Encode(const LightField& input,
                                          const DisparityMap& dmap,
                                          const CodecConfig& cfg,
                                          bool collect_details) {
  cfg.Validate();
  input.Validate();
  if (input.rows > 0xFFFF || input.cols > 0xFFFF) {
    throw InvalidArgument("angular grid too large");
  }
  EncodeReport report;
  StageTimer timer(&report.stage_seconds);
  const LightField lf = CodingTarget(input, cfg.channels);
  const LightField luma = ToLuma(input);
  const Geometry geo{lf.rows, lf.cols, lf.width, lf.height};
  const int max_value = lf.max_value();

  SlicParams slic;
  slic.superpixels = cfg.slic_k;
  slic.compactness = cfg.compactness;
  SegmentationMap ref =
      SlicSegment(luma.view(0, 0).planes[0], luma.bit_depth, slic);
  const std::vector<int> disparities = LabelDisparities(ref, dmap);
  const SegmentationMap all_views =
      ProjectLabels(ref, disparities, lf.rows, lf.cols);
  const std::vector<SuperRay> rays = BuildSuperRays(all_views, disparities);
  timer.Mark("segmentation");

  std::vector<UnitMode> modes(rays.size());
  const bool coarsen_mode = cfg.q_gft >= cfg.q_switch;
  for (size_t r = 0; r < rays.size(); ++r) {
    const size_t n = rays[r].vertex_count();
    if (coarsen_mode) {
      modes[r] = n >= size_t(cfg.n_target) ? UnitMode::kCoarsen : UnitMode::kDirect;
    } else {
      modes[r] = n > size_t(cfg.max_vertices) ? UnitMode::kPartition
                                              : UnitMode::kDirect;
    }
  }
  std::vector<int> parts_per_ray;
  const std::vector<Unit> units =
      BuildUnits(rays, modes, geo, cfg.n_target, cfg.max_vertices, cfg.threads,
                 &report.partition_bound_unmet, &parts_per_ray);
  timer.Mark("graphs");

  std::vector<EigenBasis> bases(units.size());
  ParallelFor(units.size(), cfg.threads, [&](size_t i) {
    bases[i] = Eigendecompose(BuildLaplacian(units[i].coded()));
  });
  report.eig_count = units.size();
  timer.Mark("eigendecomposition");

  Bitstream bs;
  StreamHeader& h = bs.header;
  h.rows = uint16_t(lf.rows);
  h.cols = uint16_t(lf.cols);
  h.width = uint32_t(lf.width);
  h.height = uint32_t(lf.height);
  h.bit_depth = uint8_t(lf.bit_depth);
  h.channels = uint8_t(lf.channels);
  h.flags = HeaderFlags(cfg);
  h.q_gft = cfg.q_gft;
  h.q_dct = cfg.q_dct;
  h.n_target = uint32_t(cfg.n_target);
  h.max_vertices = uint32_t(cfg.max_vertices);
  h.q_switch = uint32_t(cfg.q_switch);
  h.bin_width = cfg.bin_width;
  h.label_count = uint32_t(ref.label_count);
  h.seed = cfg.seed;

  bs.sections.push_back({SectionId::kSegmentation, 0,
                         EncodeLabels(ref.views[0], lf.width, lf.height)});
  {
    ArithmeticEncoder enc;
    IntegerModel model;
    int prev = 0;
    for (int d : disparities) {
      model.Encode(enc, d - prev);
      prev = d;
    }
    bs.sections.push_back({SectionId::kDisparity, 0, enc.Finish()});
  }
  {
    ArithmeticEncoder enc;
    IntegerModel mode_model, parts_model;
    for (size_t r = 0; r < rays.size(); ++r) {
      mode_model.Encode(enc, int64_t(modes[r]));
      if (modes[r] == UnitMode::kPartition) parts_model.Encode(enc, parts_per_ray[r]);
    }
    bs.sections.push_back({SectionId::kStructure, 0, enc.Finish()});
  }

  report.super_rays = rays.size();
  report.total_units = units.size();
  for (const Unit& u : units) {
    report.coarsened += u.mode == UnitMode::kCoarsen;
    report.partitioned += u.mode == UnitMode::kPartition;
    report.direct += u.mode == UnitMode::kDirect;
  }

  for (int c = 0; c < lf.channels; ++c) {
    std::vector<const Plane*> planes;
    for (const View& v : lf.views) planes.push_back(&v.planes[c]);
    ChannelState ch;
    ch.levels.resize(units.size());
    ch.dequantized.resize(units.size());
    std::vector<std::vector<int64_t>> fine(units.size());
    std::vector<std::vector<double>> coded(units.size());
    ParallelFor(units.size(), cfg.threads, [&](size_t i) {
      const Unit& u = units[i];
      fine[i] = FineSamples(u, planes.data());
      coded[i] = CodedSignal(u, fine[i]);
      const std::vector<double> coeffs = Gft(bases[i], coded[i]);
      auto& levels = ch.levels[i];
      levels.resize(coeffs.size());
      for (size_t k = 0; k < coeffs.size(); ++k) {
        levels[k] = RoundHalfAway(
            coeffs[k] / CoefficientStep(int(k), u.components, cfg.q_gft));
      }
      ch.dequantized[i] = DequantizeCoefficients(levels, u.components, cfg.q_gft);
    });
    timer.Mark("transform");

    for (size_t i = 0; i < units.size(); ++i) {
      if (units[i].coarsened()) ch.coarsened.push_back(int(i));
    }
    if (cfg.grouping && ch.coarsened.size() >= 2) {
      std::vector<std::vector<double>> coeffs, signals;
      for (int i : ch.coarsened) {
        coeffs.push_back(ch.dequantized[i]);
        signals.push_back(coded[i]);
      }
      ch.groups = RunGrouping(coeffs, signals, cfg.bin_width, cfg.threads);
    } else {
      for (size_t k = 0; k < ch.coarsened.size(); ++k) {
        ch.groups.ungrouped.push_back(int(k));
      }
      ch.groups.pair_count = cfg.grouping ? PairCount(ch.coarsened.size()) : 0;
    }
    FillMainOf(ch, units.size());
    timer.Mark("grouping");

    // Prediction and residuals for non-main members, in group order.
    std::vector<Prediction> predictions(units.size());
    ParallelFor(units.size(), cfg.threads, [&](size_t i) {
      const int main_unit = ch.main_of[i];
      if (main_unit < 0) return;
      predictions[i] = PredictAndResidual(
          bases[main_unit], ch.dequantized[i],
          std::vector<double>(fine[i].begin(), fine[i].end()), max_value,
          units[i].coarsened() ? &units[i].map : nullptr);
    });
    timer.Mark("prediction");

    {
      ArithmeticEncoder enc;
      IntegerModel model(kFrequencyBands);
      for (size_t i = 0; i < units.size(); ++i) {
        const auto& levels = ch.levels[i];
        for (size_t k = 0; k < levels.size(); ++k) {
          model.Encode(enc, levels[k],
                       FrequencyBand(int(k), units[i].components));
        }
      }
      bs.sections.push_back({SectionId::kCoefficients, uint8_t(c), enc.Finish()});
    }
    {
      ArithmeticEncoder enc;
      IntegerModel counts, members, mains;
      counts.Encode(enc, int64_t(ch.groups.groups.size()));
      if (cfg.explicit_groups) {
        for (const auto& g : ch.groups.groups) {
          counts.Encode(enc, int64_t(g.members.size()));
          int prev = -1;
          for (int m : g.members) {
            members.Encode(enc, m - prev - 1);
            prev = m;
          }
        }
      } else {
        counts.Encode(enc, int64_t(ch.groups.grouped_count()));
      }
      for (const auto& g : ch.groups.groups) {
        const auto pos = std::find(g.members.begin(), g.members.end(), g.main) -
                         g.members.begin();
        mains.Encode(enc, pos);
      }
      bs.sections.push_back({SectionId::kGroups, uint8_t(c), enc.Finish()});
    }
    {
      ArithmeticEncoder enc;
      IntegerModel model(kFrequencyBands);
      for (const auto& g : ch.groups.groups) {
        for (int m : g.members) {
          if (m == g.main) continue;
          const auto& residual = predictions[ch.coarsened[m]].residual;
          if (cfg.residual_mode == ResidualMode::kRaw) {
            for (int64_t r : residual) model.Encode(enc, r);
          } else {
            const QuantizedVector q = Quantize(
                Dct1d(std::vector<double>(residual.begin(), residual.end())),
                cfg.q_dct);
            for (size_t k = 0; k < q.levels.size(); ++k) {
              model.Encode(enc, q.levels[k], FrequencyBand(int(k), 1));
            }
          }
        }
      }
      bs.sections.push_back({SectionId::kResidual, uint8_t(c), enc.Finish()});
    }
    timer.Mark("entropy_coding");

    if (c == 0) {
      GroupingStats& s = report.grouping;
      s.coarsened = ch.coarsened.size();
      s.pairs = ch.groups.pair_count;
      s.threshold = ch.groups.threshold;
      s.pairs_under_threshold = ch.groups.pairs_under_threshold;
      s.one_level_groups = ch.groups.one_level_groups;
      s.groups = ch.groups.groups.size();
      s.grouped = ch.groups.grouped_count();
      if (collect_details) {
        std::vector<char> is_main(units.size(), 0);
        std::vector<int> group_of(units.size(), -1);
        for (size_t g = 0; g < ch.groups.groups.size(); ++g) {
          const SuperRayGroup& grp = ch.groups.groups[g];
          is_main[ch.coarsened[grp.main]] = 1;
          for (int m : grp.members) group_of[ch.coarsened[m]] = int(g);
        }
        for (size_t i = 0; i < units.size(); ++i) {
          UnitDetail d;
          d.super_ray = units[i].super_ray;
          d.mode = units[i].mode;
          d.fine_dim = units[i].fine.vertex_count;
          d.coded_dim = units[i].coded_dim();
          d.is_main = is_main[i];
          d.group = group_of[i];
          d.grouped = is_main[i] || ch.main_of[i] >= 0;
          d.coded_signal = coded[i];
          d.coefficients = ch.dequantized[i];
          d.original = fine[i];
          d.predicted = predictions[i].predicted;
          d.residual = predictions[i].residual;
          report.units.push_back(std::move(d));
        }
      }
    }
  }

  report.ratio_coarsened =
      report.grouping.coarsened == 0
          ? 0.0
          : double(report.grouping.grouped) / double(report.grouping.coarsened);
  report.ratio_overall =
      report.total_units == 0
          ? 0.0
          : double(report.grouping.grouped) / double(report.total_units);
  report.stream_bytes = Serialize(bs).size();
  return {std::move(bs), std::move(report)};
}

// ---------------------------------------------------------------------------
// Decoder.

std::pair<LightField, DecodeReport> Decode(const Bitstream& bs, int threads,
                                           bool collect_details) {
  DecodeReport report;
  StageTimer timer(&report.stage_seconds);
  const StreamHeader& h = bs.header;
  if (h.rows == 0 || h.cols == 0 || h.width == 0 || h.height == 0 ||
      (h.bit_depth != 8 && h.bit_depth != 10 && h.bit_depth != 16) ||
      (h.channels != 1 && h.channels != 3) || h.label_count == 0 ||
      h.label_count > uint64_t(h.width) * h.height || h.n_target == 0 ||
      h.max_vertices == 0 || !(h.q_gft > 0) || !(h.q_dct > 0) ||
      !(h.bin_width > 0)) {
    throw DataError("corrupt stream: invalid header fields");
  }
  const Geometry geo{h.rows, h.cols, int(h.width), int(h.height)};
  const int label_count = int(h.label_count);
  const bool grouping = h.flags & kFlagGrouping;
  const bool explicit_groups = h.flags & kFlagExplicitGroups;
  const bool residual_dct = h.flags & kFlagResidualDct;

  SegmentationMap ref;
  ref.width = geo.width;
  ref.height = geo.height;
  ref.label_count = label_count;
  ref.views.push_back(WithSection(SectionId::kSegmentation, [&] {
    return DecodeLabels(bs.Find(SectionId::kSegmentation).payload, geo.width,
                        geo.height, label_count);
  }));
  const std::vector<int> disparities = WithSection(SectionId::kDisparity, [&] {
    ArithmeticDecoder dec(bs.Find(SectionId::kDisparity).payload);
    IntegerModel model;
    std::vector<int> out(label_count);
    int64_t prev = 0;
    for (int& d : out) {
      prev += model.Decode(dec);
      if (prev < INT32_MIN / 2 || prev > INT32_MAX / 2) {
        throw DataError("disparity out of range");
      }
      d = int(prev);
    }
    return out;
  });
  const SegmentationMap all_views =
      ProjectLabels(ref, disparities, geo.rows, geo.cols);
  const std::vector<SuperRay> rays = BuildSuperRays(all_views, disparities);
  timer.Mark("segmentation");

  std::vector<UnitMode> modes(rays.size());
  std::vector<int> declared_parts(rays.size(), 1);
  WithSection(SectionId::kStructure, [&] {
    ArithmeticDecoder dec(bs.Find(SectionId::kStructure).payload);
    IntegerModel mode_model, parts_model;
    for (size_t r = 0; r < rays.size(); ++r) {
      const int64_t m = mode_model.Decode(dec);
      if (m < 0 || m > 2) throw DataError("bad unit mode");
      modes[r] = UnitMode(m);
      if (modes[r] == UnitMode::kPartition) {
        declared_parts[r] = int(parts_model.Decode(dec));
      }
    }
    return 0;
  });
  std::vector<int> parts_per_ray;
  const std::vector<Unit> units =
      BuildUnits(rays, modes, geo, int(h.n_target), int(h.max_vertices),
                 threads, nullptr, &parts_per_ray);
  if (parts_per_ray != declared_parts) {
    throw DataError("corrupt stream: structure section disagrees with partition");
  }
  timer.Mark("graphs");

  const int max_value = (1 << h.bit_depth) - 1;
  std::vector<ChannelState> channels(h.channels);
  std::vector<char> needs_basis(units.size(), 0);
  for (int c = 0; c < h.channels; ++c) {
    ChannelState& ch = channels[c];
    ch.levels.resize(units.size());
    ch.dequantized.resize(units.size());
    WithSection(SectionId::kCoefficients, [&] {
      ArithmeticDecoder dec(bs.Find(SectionId::kCoefficients, uint8_t(c)).payload);
      IntegerModel model(kFrequencyBands);
      for (size_t i = 0; i < units.size(); ++i) {
        auto& levels = ch.levels[i];
        levels.resize(units[i].coded_dim());
        for (size_t k = 0; k < levels.size(); ++k) {
          levels[k] = model.Decode(dec, FrequencyBand(int(k), units[i].components));
        }
        ch.dequantized[i] =
            DequantizeCoefficients(levels, units[i].components, h.q_gft);
      }
      return 0;
    });
    for (size_t i = 0; i < units.size(); ++i) {
      if (units[i].coarsened()) ch.coarsened.push_back(int(i));
    }
    const int m = int(ch.coarsened.size());
    WithSection(SectionId::kGroups, [&] {
      ArithmeticDecoder dec(bs.Find(SectionId::kGroups, uint8_t(c)).payload);
      IntegerModel counts, members, mains;
      const int64_t group_count = counts.Decode(dec);
      if (group_count < 0 || group_count > m / 2 ||
          (!grouping && group_count != 0)) {
        throw DataError("bad group count");
      }
      if (explicit_groups) {
        std::vector<char> used(m, 0);
        for (int64_t g = 0; g < group_count; ++g) {
          const int64_t size = counts.Decode(dec);
          if (size < 2 || size > m) throw DataError("bad group size");
          SuperRayGroup group;
          int64_t prev = -1;
          for (int64_t k = 0; k < size; ++k) {
            prev += members.Decode(dec) + 1;
            if (prev < 0 || prev >= m || used[prev]) throw DataError("bad member");
            used[prev] = 1;
            group.members.push_back(int(prev));
          }
          ch.groups.groups.push_back(std::move(group));
        }
        for (int k = 0; k < m; ++k) {
          if (!used[k]) ch.groups.ungrouped.push_back(k);
        }
      } else if (grouping && m >= 2) {
        std::vector<std::vector<double>> coeffs;
        for (int i : ch.coarsened) coeffs.push_back(ch.dequantized[i]);
        ch.groups = FindGroups(coeffs, h.bin_width, threads);
        const int64_t grouped = counts.Decode(dec);
        if (int64_t(ch.groups.groups.size()) != group_count ||
            int64_t(ch.groups.grouped_count()) != grouped) {
          throw DataError("regrouping mismatch (" +
                          std::to_string(ch.groups.groups.size()) + " groups vs " +
                          std::to_string(group_count) + " signalled)");
        }
      } else {
        if (counts.Decode(dec) != 0) throw DataError("bad grouped count");
        for (int k = 0; k < m; ++k) ch.groups.ungrouped.push_back(k);
      }
      for (auto& g : ch.groups.groups) {
        const int64_t pos = mains.Decode(dec);
        if (pos < 0 || pos >= int64_t(g.members.size())) {
          throw DataError("bad main position");
        }
        g.main = g.members[pos];
      }
      return 0;
    });
    FillMainOf(ch, units.size());
    for (size_t i = 0; i < units.size(); ++i) {
      if (ch.main_of[i] < 0) needs_basis[i] = 1;
    }
  }
  timer.Mark("grouping");

  std::vector<std::unique_ptr<EigenBasis>> bases(units.size());
  ParallelFor(units.size(), threads, [&](size_t i) {
    if (!needs_basis[i]) return;
    bases[i] = std::make_unique<EigenBasis>(
        Eigendecompose(BuildLaplacian(units[i].coded())));
  });
  for (char n : needs_basis) report.eig_count += n;
  timer.Mark("eigendecomposition");

  LightField lf(geo.rows, geo.cols, geo.width, geo.height, h.bit_depth,
                h.channels);
  for (int c = 0; c < h.channels; ++c) {
    ChannelState& ch = channels[c];
    // Residuals, in the same order the encoder wrote them.
    std::vector<std::vector<int64_t>> residuals(units.size());
    WithSection(SectionId::kResidual, [&] {
      ArithmeticDecoder dec(bs.Find(SectionId::kResidual, uint8_t(c)).payload);
      IntegerModel model(kFrequencyBands);
      for (const auto& g : ch.groups.groups) {
        for (int m : g.members) {
          if (m == g.main) continue;
          const int unit = ch.coarsened[m];
          const size_t n = size_t(units[unit].fine.vertex_count);
          auto& r = residuals[unit];
          if (!residual_dct) {
            r.resize(n);
            for (auto& v : r) v = model.Decode(dec);
          } else {
            QuantizedVector q;
            q.step = h.q_dct;
            q.levels.resize(n);
            for (size_t k = 0; k < n; ++k) {
              q.levels[k] = model.Decode(dec, FrequencyBand(int(k), 1));
            }
            for (double v : Idct1d(Dequantize(q))) r.push_back(RoundHalfAway(v));
          }
        }
      }
      return 0;
    });

    std::vector<std::vector<double>> reconstructed(units.size());
    std::vector<std::vector<int64_t>> samples(units.size());
    ParallelFor(units.size(), threads, [&](size_t i) {
      const Unit& u = units[i];
      const CoarseningMap* lift = u.coarsened() ? &u.map : nullptr;
      if (ch.main_of[i] < 0) {
        reconstructed[i] = Igft(*bases[i], ch.dequantized[i]);
        const std::vector<double> fine =
            lift ? UncoarsenSignal(reconstructed[i], *lift) : reconstructed[i];
        samples[i].reserve(fine.size());
        for (double v : fine) {
          samples[i].push_back(std::clamp<int64_t>(RoundHalfAway(v), 0, max_value));
        }
      } else {
        samples[i] =
            PredictSamples(*bases[ch.main_of[i]], ch.dequantized[i], max_value, lift);
        for (size_t k = 0; k < samples[i].size(); ++k) {
          samples[i][k] =
              std::clamp<int64_t>(samples[i][k] + residuals[i][k], 0, max_value);
        }
      }
    });
    for (size_t i = 0; i < units.size(); ++i) {
      const auto& verts = units[i].fine.vertices;
      for (size_t k = 0; k < verts.size(); ++k) {
        lf.views[verts[k].view].planes[c].samples[verts[k].pixel] =
            uint16_t(samples[i][k]);
      }
    }
    if (c == 0) {
      report.total_units = units.size();
      report.coarsened = ch.coarsened.size();
      report.groups = ch.groups.groups.size();
      report.grouped = ch.groups.grouped_count();
      report.ungrouped = units.size() - report.grouped;
      if (collect_details) {
        std::vector<char> is_main(units.size(), 0);
        std::vector<int> group_of(units.size(), -1);
        for (size_t g = 0; g < ch.groups.groups.size(); ++g) {
          const SuperRayGroup& grp = ch.groups.groups[g];
          is_main[ch.coarsened[grp.main]] = 1;
          for (int m : grp.members) group_of[ch.coarsened[m]] = int(g);
        }
        for (size_t i = 0; i < units.size(); ++i) {
          UnitDetail d;
          d.super_ray = units[i].super_ray;
          d.mode = units[i].mode;
          d.fine_dim = units[i].fine.vertex_count;
          d.coded_dim = units[i].coded_dim();
          d.is_main = is_main[i];
          d.group = group_of[i];
          d.grouped = is_main[i] || ch.main_of[i] >= 0;
          d.residual = residuals[i];
          d.coefficients = ch.dequantized[i];
          d.reconstructed = std::move(reconstructed[i]);
          d.decoded = std::move(samples[i]);
          report.units.push_back(std::move(d));
        }
      }
    }
  }
  timer.Mark("reconstruction");
  return {std::move(lf), std::move(report)};
}

// ---------------------------------------------------------------------------

namespace {

void AppendTimes(std::ostringstream& out,
                 const std::map<std::string, double>& times) {
  double total = 0;
  for (const auto& [stage, s] : times) {
    out << "time_" << stage << "_s=" << s << "\n";
    total += s;
  }
  out << "time_total_s=" << total << "\n";
}

}  // namespace

std::string FormatReport(const EncodeReport& r) {
  std::ostringstream out;
  out.precision(10);
  out << "super_rays=" << r.super_rays << "\n"
      << "total_sr=" << r.total_units << "\n"
      << "coarsened=" << r.coarsened << "\n"
      << "partitioned=" << r.partitioned << "\n"
      << "direct=" << r.direct << "\n"
      << "partition_bound_unmet=" << r.partition_bound_unmet << "\n"
      << "pairs=" << r.grouping.pairs << "\n"
      << "mse_threshold=" << r.grouping.threshold << "\n"
      << "pairs_under_threshold=" << r.grouping.pairs_under_threshold << "\n"
      << "one_level_groups=" << r.grouping.one_level_groups << "\n"
      << "groups=" << r.grouping.groups << "\n"
      << "grouped=" << r.grouping.grouped << "\n"
      << "ratio_c=" << r.ratio_coarsened << "\n"
      << "ratio_o=" << r.ratio_overall << "\n"
      << "eig_enc=" << r.eig_count << "\n"
      << "stream_bytes=" << r.stream_bytes << "\n";
  AppendTimes(out, r.stage_seconds);
  return out.str();
}

std::string FormatReport(const DecodeReport& r) {
  std::ostringstream out;
  out.precision(10);
  out << "total_sr=" << r.total_units << "\n"
      << "coarsened=" << r.coarsened << "\n"
      << "groups=" << r.groups << "\n"
      << "grouped=" << r.grouped << "\n"
      << "ungrouped=" << r.ungrouped << "\n"
      << "eig_dec=" << r.eig_count << "\n";
  AppendTimes(out, r.stage_seconds);
  return out.str();
}

}  // namespace srgc
