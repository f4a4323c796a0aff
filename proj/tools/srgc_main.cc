// srgc: super-ray graph codec command-line front end.
//
//   srgc synth   --spec scene.txt --out lf/
//   srgc encode  lf/ --disparity lf/gt.lfdm --q-gft 8 --out a.srgc
//   srgc decode  a.srgc --out rec/
//   srgc analyze a.srgc
//   srgc sweep   lf/ --disparity lf/gt.lfdm --q-list 4,8,16,32 --out rd.csv
//
// Exit codes: 0 success, 1 usage error, 2 data/format error, 3 internal error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "srgc/bench.h"
#include "srgc/bitstream.h"
#include "srgc/codec.h"
#include "srgc/error.h"
#include "srgc/light_field.h"

namespace {

using srgc::CodecConfig;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

// Flag values that override the config file when given.
struct ConfigFlags {
  std::string config_path;
  std::optional<double> q_gft, q_dct, compactness, bin_width;
  std::optional<int> n_target, max_vertices, q_switch, slic_k, threads;
  std::optional<uint64_t> seed;
  std::optional<std::string> residual_mode, channels;
  bool no_grouping = false;
  bool explicit_groups = false;

  void Register(CLI::App* app) {
    const CodecConfig d;
    app->add_option("--config", config_path, "key=value config file");
    app->add_option("--q-gft", q_gft, "GFT quantizer step")->default_str(std::to_string(d.q_gft));
    app->add_option("--q-dct", q_dct, "residual DCT quantizer step")->default_str(std::to_string(d.q_dct));
    app->add_option("--n-target", n_target, "coarsened graph size")->default_str(std::to_string(d.n_target));
    app->add_option("--max-vertices", max_vertices, "partition bound")->default_str(std::to_string(d.max_vertices));
    app->add_option("--q-switch", q_switch, "q_gft at or above this coarsens")->default_str(std::to_string(d.q_switch));
    app->add_option("--slic-k", slic_k, "number of super-pixels")->default_str(std::to_string(d.slic_k));
    app->add_option("--compactness", compactness, "SLIC compactness")->default_str(std::to_string(d.compactness));
    app->add_option("--bin-width", bin_width, "MSE histogram bin width")->default_str(std::to_string(d.bin_width));
    app->add_option("--seed", seed, "seed recorded in the stream header")->default_str("0");
    app->add_option("--residual-mode", residual_mode, "raw or dct")->default_str("raw");
    app->add_option("--channels", channels, "luma or all")->default_str("luma");
    app->add_option("--threads", threads, "worker threads")->default_str("1");
    app->add_flag("--no-grouping", no_grouping, "disable super-ray grouping (baseline)");
    app->add_flag("--explicit-groups", explicit_groups, "transmit group membership");
  }

  CodecConfig Resolve() const {
    CodecConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw srgc::InvalidArgument("cannot open config " + config_path);
      std::stringstream ss;
      ss << in.rdbuf();
      srgc::ApplyConfigText(cfg, ss.str());
    }
    if (q_gft) cfg.q_gft = *q_gft;
    if (q_dct) cfg.q_dct = *q_dct;
    if (compactness) cfg.compactness = *compactness;
    if (bin_width) cfg.bin_width = *bin_width;
    if (n_target) cfg.n_target = *n_target;
    if (max_vertices) cfg.max_vertices = *max_vertices;
    if (q_switch) cfg.q_switch = *q_switch;
    if (slic_k) cfg.slic_k = *slic_k;
    if (threads) cfg.threads = *threads;
    if (seed) cfg.seed = *seed;
    if (residual_mode) srgc::ApplyConfigEntry(cfg, "residual_mode", *residual_mode);
    if (channels) srgc::ApplyConfigEntry(cfg, "channels", *channels);
    if (no_grouping) cfg.grouping = false;
    if (explicit_groups) cfg.explicit_groups = true;
    cfg.Validate();
    return cfg;
  }
};

std::vector<uint8_t> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw srgc::DataError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteFile(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            std::streamsize(bytes.size()));
  if (!out) throw srgc::DataError("cannot write " + path);
}

void Emit(const std::string& text, const std::string& report_path) {
  if (report_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(report_path);
  out << text;
  if (!out) throw srgc::DataError("cannot write " + report_path);
}

int Run(int argc, char** argv) {
  CLI::App app{"Super-ray graph light field codec"};
  app.require_subcommand(1);

  std::string spec_path, out_path, input, disparity_path, report_path;
  std::string q_list;

  CLI::App* synth = app.add_subcommand("synth", "render a synthetic light field");
  synth->add_option("--spec", spec_path, "scene description")->required();
  synth->add_option("--out", out_path, "output directory")->required();

  ConfigFlags enc_flags;
  CLI::App* encode = app.add_subcommand("encode", "encode a light field");
  encode->add_option("input", input, "directory of view_SS_TT.pgm files")->required();
  encode->add_option("--disparity", disparity_path, "LFDM disparity file")->required();
  encode->add_option("--out", out_path, "output .srgc stream")->required();
  encode->add_option("--report", report_path, "write the report here instead of stdout");
  enc_flags.Register(encode);

  int dec_threads = 1;
  CLI::App* decode = app.add_subcommand("decode", "decode a .srgc stream");
  decode->add_option("input", input, ".srgc stream")->required();
  decode->add_option("--out", out_path, "output directory")->required();
  decode->add_option("--report", report_path, "write the report here instead of stdout");
  decode->add_option("--threads", dec_threads, "worker threads")->default_str("1");

  CLI::App* analyze = app.add_subcommand("analyze", "describe a .srgc stream");
  analyze->add_option("input", input, ".srgc stream")->required();
  analyze->add_option("--report", report_path, "write the report here instead of stdout");

  ConfigFlags sweep_flags;
  CLI::App* sweep = app.add_subcommand("sweep", "rate-distortion sweep over q_gft");
  sweep->add_option("input", input, "directory of views")->required();
  sweep->add_option("--disparity", disparity_path, "LFDM disparity file")->required();
  sweep->add_option("--q-list", q_list, "comma-separated q_gft values")->required();
  sweep->add_option("--out", out_path, "CSV output (default stdout)");
  sweep_flags.Register(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (synth->parsed()) {
    const srgc::SceneSpec spec = srgc::LoadSceneSpec(spec_path);
    auto [lf, dmap] = srgc::SynthesizeLightField(spec);
    srgc::SaveLightField(lf, out_path);
    srgc::SaveDisparity(dmap, std::filesystem::path(out_path) / "gt.lfdm");
    return 0;
  }
  if (encode->parsed()) {
    const CodecConfig cfg = enc_flags.Resolve();
    const srgc::LightField lf = srgc::LoadLightField(input);
    const srgc::DisparityMap dmap = srgc::LoadDisparity(disparity_path);
    auto [bs, report] = srgc::Encode(lf, dmap, cfg);
    const std::vector<uint8_t> bytes = srgc::Serialize(bs);
    WriteFile(out_path, bytes);
    std::ostringstream extra;
    extra << "bpp=" << srgc::Bpp(bytes.size(), lf) << "\n";
    Emit(srgc::FormatReport(report) + extra.str(), report_path);
    return 0;
  }
  if (decode->parsed()) {
    if (dec_threads < 1) throw srgc::InvalidArgument("threads must be >= 1");
    const srgc::Bitstream bs = srgc::Deserialize(ReadFile(input));
    auto [lf, report] = srgc::Decode(bs, dec_threads);
    srgc::SaveLightField(lf, out_path);
    Emit(srgc::FormatReport(report), report_path);
    return 0;
  }
  if (analyze->parsed()) {
    const std::vector<uint8_t> bytes = ReadFile(input);
    const srgc::Bitstream bs = srgc::Deserialize(bytes);
    const srgc::StreamHeader& h = bs.header;
    std::ostringstream out;
    out << "version=" << int(srgc::kStreamVersion) << "\n"
        << "angular=" << h.rows << "x" << h.cols << "\n"
        << "spatial=" << h.width << "x" << h.height << "\n"
        << "bit_depth=" << int(h.bit_depth) << "\n"
        << "channels=" << int(h.channels) << "\n"
        << "q_gft=" << h.q_gft << "\n"
        << "q_dct=" << h.q_dct << "\n"
        << "n_target=" << h.n_target << "\n"
        << "max_vertices=" << h.max_vertices << "\n"
        << "q_switch=" << h.q_switch << "\n"
        << "bin_width=" << h.bin_width << "\n"
        << "grouping=" << ((h.flags & srgc::kFlagGrouping) ? 1 : 0) << "\n"
        << "explicit_groups=" << ((h.flags & srgc::kFlagExplicitGroups) ? 1 : 0) << "\n"
        << "residual_mode=" << ((h.flags & srgc::kFlagResidualDct) ? "dct" : "raw") << "\n"
        << "label_count=" << h.label_count << "\n"
        << "stream_bytes=" << bytes.size() << "\n"
        << "bpp=" << 8.0 * double(bytes.size()) / (double(h.rows) * h.cols * h.width * h.height) << "\n";
    for (const srgc::Section& s : bs.sections) {
      out << "section_" << srgc::SectionName(s.id) << "_c" << int(s.channel)
          << "_bytes=" << s.payload.size() << "\n";
    }
    auto [lf, report] = srgc::Decode(bs);
    out << srgc::FormatReport(report);
    Emit(out.str(), report_path);
    return 0;
  }
  if (sweep->parsed()) {
    // Sweeps default to DCT residuals unless the user chose otherwise.
    if (!sweep_flags.residual_mode && sweep_flags.config_path.empty()) {
      sweep_flags.residual_mode = "dct";
    }
    const CodecConfig cfg = sweep_flags.Resolve();
    std::vector<double> qs;
    std::stringstream ss(q_list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        qs.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw srgc::InvalidArgument("bad --q-list entry '" + item + "'");
      }
    }
    const srgc::LightField lf = srgc::LoadLightField(input);
    const srgc::DisparityMap dmap = srgc::LoadDisparity(disparity_path);
    Emit(srgc::FormatRdCsv(srgc::RdSweep(lf, dmap, qs, cfg)), out_path);
    return 0;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const srgc::Error& e) {
    std::cerr << "srgc: " << e.what() << "\n";
    switch (e.kind()) {
      case srgc::ErrorKind::kInvalidArgument:
        return kExitUsage;
      case srgc::ErrorKind::kData:
        return kExitData;
      case srgc::ErrorKind::kInternal:
        return kExitInternal;
    }
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "srgc: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
