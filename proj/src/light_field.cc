#include "srgc/light_field.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <random>
#include <regex>
#include <sstream>

#include "srgc/error.h"

namespace srgc {
namespace fs = std::filesystem;

namespace {

int BitDepthFromMaxval(int maxval) {
  switch (maxval) {
    case 255:
      return 8;
    case 1023:
      return 10;
    case 65535:
      return 16;
    default:
      return -1;
  }
}

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string NextPnmToken(std::istream& in) {
  std::string token;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  return token;
}

View ReadPnm(const fs::path& path, int* bit_depth) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  const std::string magic = NextPnmToken(in);
  int channels;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw DataError(path.string() + ": not a binary PGM/PPM file");
  }
  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(NextPnmToken(in));
    height = std::stoi(NextPnmToken(in));
    maxval = std::stoi(NextPnmToken(in));
  } catch (const std::exception&) {
    throw DataError(path.string() + ": malformed PNM header");
  }
  *bit_depth = BitDepthFromMaxval(maxval);
  if (width <= 0 || height <= 0 || *bit_depth < 0) {
    throw DataError(path.string() + ": unsupported dimensions or maxval");
  }
  const int bytes_per_sample = maxval > 255 ? 2 : 1;
  const size_t count = size_t(width) * height * channels;
  std::vector<unsigned char> raw(count * bytes_per_sample);
  in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size()));
  if (size_t(in.gcount()) != raw.size()) {
    throw DataError(path.string() + ": truncated pixel data");
  }
  View view;
  view.planes.assign(channels, Plane(width, height));
  for (size_t i = 0; i < count; ++i) {
    uint16_t v = bytes_per_sample == 2
                     ? static_cast<uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1])
                     : raw[i];
    if (v > maxval) throw DataError(path.string() + ": sample exceeds maxval");
    view.planes[i % channels].samples[i / channels] = v;
  }
  return view;
}

void WritePnm(const View& view, int bit_depth, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  const int channels = static_cast<int>(view.planes.size());
  const int maxval = (1 << bit_depth) - 1;
  out << (channels == 1 ? "P5" : "P6") << "\n"
      << view.width() << " " << view.height() << "\n"
      << maxval << "\n";
  const int bytes_per_sample = maxval > 255 ? 2 : 1;
  const size_t pixels = size_t(view.width()) * view.height();
  std::vector<unsigned char> raw(pixels * channels * bytes_per_sample);
  size_t k = 0;
  for (size_t i = 0; i < pixels; ++i) {
    for (int c = 0; c < channels; ++c) {
      const uint16_t v = view.planes[c].samples[i];
      if (bytes_per_sample == 2) raw[k++] = static_cast<unsigned char>(v >> 8);
      raw[k++] = static_cast<unsigned char>(v & 0xff);
    }
  }
  out.write(reinterpret_cast<const char*>(raw.data()),
            std::streamsize(raw.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

uint16_t ClampSample(double v, int max_value) {
  const long long r = std::llround(v);
  return static_cast<uint16_t>(std::clamp<long long>(r, 0, max_value));
}

}  // namespace

LightField::LightField(int rows, int cols, int width, int height,
                       int bit_depth, int channels)
    : rows(rows),
      cols(cols),
      width(width),
      height(height),
      bit_depth(bit_depth),
      channels(channels) {
  View blank;
  blank.planes.assign(channels, Plane(width, height));
  views.assign(size_t(rows) * cols, blank);
}

void LightField::Validate() const {
  if (rows <= 0 || cols <= 0) throw DataError("empty light field");
  if (width <= 0 || height <= 0) throw DataError("empty views");
  if (bit_depth != 8 && bit_depth != 10 && bit_depth != 16) {
    throw DataError("unsupported bit depth " + std::to_string(bit_depth));
  }
  if (channels != 1 && channels != 3) {
    throw DataError("unsupported channel count " + std::to_string(channels));
  }
  if (views.size() != size_t(rows) * cols) {
    throw DataError("view count does not match angular dimensions");
  }
  for (const View& v : views) {
    if (int(v.planes.size()) != channels) {
      throw DataError("inconsistent views: channel count");
    }
    for (const Plane& p : v.planes) {
      if (p.width != width || p.height != height ||
          p.samples.size() != pixels_per_view()) {
        throw DataError("inconsistent views: dimensions");
      }
      for (uint16_t s : p.samples) {
        if (s > max_value()) throw DataError("sample exceeds bit depth");
      }
    }
  }
}

std::string ViewFileName(int s, int t, int channels) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "view_%02d_%02d.%s", s, t,
                channels == 1 ? "pgm" : "ppm");
  return buf;
}

LightField LoadLightField(const fs::path& dir) {
  static const std::regex kName(R"(view_(\d{2})_(\d{2})\.(pgm|ppm))");
  std::map<std::pair<int, int>, fs::path> found;
  int max_s = -1, max_t = -1;
  std::error_code ec;
  if (fs::is_directory(dir, ec)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      std::smatch m;
      const std::string name = entry.path().filename().string();
      if (!std::regex_match(name, m, kName)) continue;
      const int s = std::stoi(m[1]), t = std::stoi(m[2]);
      found[{s, t}] = entry.path();
      max_s = std::max(max_s, s);
      max_t = std::max(max_t, t);
    }
  }
  if (found.empty()) {
    throw DataError("incomplete grid: missing view (0,0) in " + dir.string());
  }
  for (int s = 0; s <= max_s; ++s) {
    for (int t = 0; t <= max_t; ++t) {
      if (!found.count({s, t})) {
        throw DataError("incomplete grid: missing view (" + std::to_string(s) +
                        "," + std::to_string(t) + ") in " + dir.string());
      }
    }
  }
  LightField lf;
  lf.rows = max_s + 1;
  lf.cols = max_t + 1;
  for (int s = 0; s < lf.rows; ++s) {
    for (int t = 0; t < lf.cols; ++t) {
      int depth = 0;
      View v = ReadPnm(found[{s, t}], &depth);
      if (s == 0 && t == 0) {
        lf.width = v.width();
        lf.height = v.height();
        lf.bit_depth = depth;
        lf.channels = static_cast<int>(v.planes.size());
      } else if (v.width() != lf.width || v.height() != lf.height ||
                 depth != lf.bit_depth ||
                 int(v.planes.size()) != lf.channels) {
        throw DataError("inconsistent views: view (" + std::to_string(s) +
                        "," + std::to_string(t) + ") differs from view (0,0)");
      }
      lf.views.push_back(std::move(v));
    }
  }
  return lf;
}

void SaveLightField(const LightField& lf, const fs::path& dir) {
  lf.Validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
  for (int s = 0; s < lf.rows; ++s) {
    for (int t = 0; t < lf.cols; ++t) {
      WritePnm(lf.view(s, t), lf.bit_depth,
               dir / ViewFileName(s, t, lf.channels));
    }
  }
}

DisparityMap LoadDisparity(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open disparity file " + path.string());
  unsigned char header[16];
  in.read(reinterpret_cast<char*>(header), 16);
  if (in.gcount() != 16 || std::memcmp(header, "LFDM", 4) != 0) {
    throw DataError(path.string() + ": not an LFDM disparity file");
  }
  auto u32 = [&](int off) {
    return uint32_t(header[off]) | uint32_t(header[off + 1]) << 8 |
           uint32_t(header[off + 2]) << 16 | uint32_t(header[off + 3]) << 24;
  };
  const uint32_t w = u32(4), h = u32(8);
  if (w == 0 || h == 0 || w > 1u << 16 || h > 1u << 16) {
    throw DataError(path.string() + ": bad disparity dimensions");
  }
  DisparityMap dmap(static_cast<int>(w), static_cast<int>(h));
  std::vector<unsigned char> raw(size_t(w) * h * 4);
  in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size()));
  if (size_t(in.gcount()) != raw.size()) {
    throw DataError(path.string() + ": truncated disparity data");
  }
  for (size_t i = 0; i < dmap.values.size(); ++i) {
    const uint32_t bits = uint32_t(raw[4 * i]) | uint32_t(raw[4 * i + 1]) << 8 |
                          uint32_t(raw[4 * i + 2]) << 16 |
                          uint32_t(raw[4 * i + 3]) << 24;
    float f;
    std::memcpy(&f, &bits, 4);
    if (!std::isfinite(f)) throw DataError(path.string() + ": non-finite disparity");
    dmap.values[i] = f;
  }
  return dmap;
}

void SaveDisparity(const DisparityMap& dmap, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  std::vector<unsigned char> raw(16 + dmap.values.size() * 4, 0);
  std::memcpy(raw.data(), "LFDM", 4);
  auto put = [&](size_t off, uint32_t v) {
    for (int b = 0; b < 4; ++b) raw[off + b] = (v >> (8 * b)) & 0xff;
  };
  put(4, uint32_t(dmap.width));
  put(8, uint32_t(dmap.height));
  for (size_t i = 0; i < dmap.values.size(); ++i) {
    uint32_t bits;
    std::memcpy(&bits, &dmap.values[i], 4);
    put(16 + 4 * i, bits);
  }
  out.write(reinterpret_cast<const char*>(raw.data()),
            std::streamsize(raw.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

LightField ToLuma(const LightField& lf) {
  if (lf.channels == 1) return lf;
  LightField out(lf.rows, lf.cols, lf.width, lf.height, lf.bit_depth, 1);
  for (size_t v = 0; v < lf.views.size(); ++v) {
    const auto& p = lf.views[v].planes;
    auto& y = out.views[v].planes[0].samples;
    for (size_t i = 0; i < y.size(); ++i) {
      const double luma = 0.2126 * p[0].samples[i] + 0.7152 * p[1].samples[i] +
                          0.0722 * p[2].samples[i];
      y[i] = ClampSample(luma, lf.max_value());
    }
  }
  return out;
}

LightField ExtractChannel(const LightField& lf, int channel) {
  LightField out(lf.rows, lf.cols, lf.width, lf.height, lf.bit_depth, 1);
  for (size_t v = 0; v < lf.views.size(); ++v) {
    out.views[v].planes[0] = lf.views[v].planes.at(channel);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

Texture ParseTexture(std::istringstream& in, int line_no) {
  std::string kind;
  in >> kind;
  Texture tex;
  if (kind == "constant") {
    tex.kind = Texture::Kind::kConstant;
    in >> tex.v0;
  } else if (kind == "gradient") {
    tex.kind = Texture::Kind::kGradient;
    in >> tex.v0 >> tex.v1;
  } else if (kind == "noise") {
    tex.kind = Texture::Kind::kNoise;
    in >> tex.seed >> tex.v0 >> tex.v1;
  } else {
    throw DataError("scene line " + std::to_string(line_no) +
                    ": unknown texture '" + kind + "'");
  }
  if (in.fail()) {
    throw DataError("scene line " + std::to_string(line_no) +
                    ": malformed texture parameters");
  }
  return tex;
}

// Texture samples for a w x h region in its own local coordinates.
std::vector<double> RenderTexture(const Texture& tex, int w, int h) {
  std::vector<double> out(size_t(w) * h);
  switch (tex.kind) {
    case Texture::Kind::kConstant:
      std::fill(out.begin(), out.end(), tex.v0);
      break;
    case Texture::Kind::kGradient:
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          out[size_t(y) * w + x] =
              tex.v0 + (tex.v1 - tex.v0) * x / std::max(w - 1, 1);
        }
      }
      break;
    case Texture::Kind::kNoise: {
      // Raw mt19937 output keeps the sequence identical across standard
      // libraries (distributions are implementation-defined).
      std::mt19937 rng(tex.seed);
      const auto amp = static_cast<uint32_t>(std::max(0.0, std::round(tex.v1)));
      for (double& v : out) {
        v = tex.v0 + double(rng() % (2 * amp + 1)) - double(amp);
      }
      break;
    }
  }
  return out;
}

bool InsideShape(const Patch& p, int lx, int ly) {
  if (p.shape == Patch::Shape::kRect) return true;
  const double rx = p.w / 2.0, ry = p.h / 2.0;
  const double dx = (lx + 0.5 - rx) / rx, dy = (ly + 0.5 - ry) / ry;
  return dx * dx + dy * dy <= 1.0;
}

}  // namespace

SceneSpec ParseSceneSpec(std::string_view text) {
  SceneSpec spec;
  std::istringstream lines{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream in(line);
    std::string key;
    if (!(in >> key)) continue;
    if (key == "angular") {
      in >> spec.rows >> spec.cols;
    } else if (key == "spatial") {
      in >> spec.width >> spec.height;
    } else if (key == "bit_depth") {
      in >> spec.bit_depth;
    } else if (key == "background") {
      in >> spec.background_disparity;
      spec.background = ParseTexture(in, line_no);
    } else if (key == "patch") {
      Patch p;
      std::string shape;
      in >> shape >> p.x >> p.y >> p.w >> p.h >> p.disparity;
      if (shape == "rect") {
        p.shape = Patch::Shape::kRect;
      } else if (shape == "ellipse") {
        p.shape = Patch::Shape::kEllipse;
      } else {
        throw DataError("scene line " + std::to_string(line_no) +
                        ": unknown shape '" + shape + "'");
      }
      if (in.fail()) {
        throw DataError("scene line " + std::to_string(line_no) +
                        ": malformed patch");
      }
      p.texture = ParseTexture(in, line_no);
      spec.patches.push_back(p);
    } else {
      throw DataError("scene line " + std::to_string(line_no) +
                      ": unknown key '" + key + "'");
    }
    if (in.fail()) {
      throw DataError("scene line " + std::to_string(line_no) +
                      ": malformed '" + key + "'");
    }
  }
  return spec;
}

SceneSpec LoadSceneSpec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open scene spec " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseSceneSpec(ss.str());
}

std::pair<LightField, DisparityMap> SynthesizeLightField(const SceneSpec& spec) {
  if (spec.rows <= 0 || spec.cols <= 0) throw DataError("empty light field");
  if (spec.width <= 0 || spec.height <= 0) throw DataError("empty views");
  for (size_t i = 0; i < spec.patches.size(); ++i) {
    const Patch& p = spec.patches[i];
    if (p.w <= 0 || p.h <= 0 || p.x < 0 || p.y < 0 || p.x + p.w > spec.width ||
        p.y + p.h > spec.height) {
      throw DataError("patch out of bounds: patch " + std::to_string(i));
    }
  }
  LightField lf(spec.rows, spec.cols, spec.width, spec.height, spec.bit_depth,
                1);
  lf.Validate();
  DisparityMap dmap(spec.width, spec.height,
                    static_cast<float>(spec.background_disparity));
  const int max_value = lf.max_value();

  // Farther surfaces first; stable so listing order breaks ties.
  std::vector<size_t> order(spec.patches.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return spec.patches[a].disparity < spec.patches[b].disparity;
  });

  const std::vector<double> background =
      RenderTexture(spec.background, spec.width, spec.height);
  std::vector<std::vector<double>> textures;
  for (const Patch& p : spec.patches) {
    textures.push_back(RenderTexture(p.texture, p.w, p.h));
  }

  for (int s = 0; s < spec.rows; ++s) {
    for (int t = 0; t < spec.cols; ++t) {
      Plane& plane = lf.view(s, t).planes[0];
      const long long bx = std::llround(spec.background_disparity * t);
      const long long by = std::llround(spec.background_disparity * s);
      for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
          const int sx = int(std::clamp<long long>(x + bx, 0, spec.width - 1));
          const int sy = int(std::clamp<long long>(y + by, 0, spec.height - 1));
          plane.at(x, y) =
              ClampSample(background[size_t(sy) * spec.width + sx], max_value);
        }
      }
      for (size_t idx : order) {
        const Patch& p = spec.patches[idx];
        const long long dx = std::llround(p.disparity * t);
        const long long dy = std::llround(p.disparity * s);
        for (int ly = 0; ly < p.h; ++ly) {
          for (int lx = 0; lx < p.w; ++lx) {
            if (!InsideShape(p, lx, ly)) continue;
            const long long x = p.x + lx - dx, y = p.y + ly - dy;
            if (x < 0 || y < 0 || x >= spec.width || y >= spec.height) continue;
            plane.at(int(x), int(y)) =
                ClampSample(textures[idx][size_t(ly) * p.w + lx], max_value);
            if (s == 0 && t == 0) {
              dmap.at(int(x), int(y)) = static_cast<float>(p.disparity);
            }
          }
        }
      }
    }
  }
  return {std::move(lf), std::move(dmap)};
}

}  // namespace srgc
