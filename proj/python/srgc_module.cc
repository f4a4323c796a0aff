#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <vector>

#include "srgc/bench.h"
#include "srgc/bitstream.h"
#include "srgc/codec.h"
#include "srgc/entropy.h"
#include "srgc/error.h"
#include "srgc/grouping.h"
#include "srgc/light_field.h"
#include "srgc/spectral.h"
#include "srgc/transform.h"

namespace py = pybind11;

namespace {

// Shape (rows, cols, channels, height, width).
py::array_t<uint16_t> LightFieldToNumpy(const srgc::LightField& lf) {
  py::array_t<uint16_t> out({lf.rows, lf.cols, lf.channels, lf.height, lf.width});
  auto a = out.mutable_unchecked<5>();
  for (int s = 0; s < lf.rows; ++s)
    for (int t = 0; t < lf.cols; ++t)
      for (int c = 0; c < lf.channels; ++c) {
        const srgc::Plane& p = lf.view(s, t).planes[c];
        for (int y = 0; y < lf.height; ++y)
          for (int x = 0; x < lf.width; ++x) a(s, t, c, y, x) = p.at(x, y);
      }
  return out;
}

srgc::LightField LightFieldFromNumpy(
    py::array_t<uint16_t, py::array::c_style | py::array::forcecast> arr,
    int bit_depth) {
  if (arr.ndim() != 5) {
    throw srgc::InvalidArgument("expected (rows, cols, channels, height, width)");
  }
  auto a = arr.unchecked<5>();
  srgc::LightField lf(int(a.shape(0)), int(a.shape(1)), int(a.shape(4)),
                      int(a.shape(3)), bit_depth, int(a.shape(2)));
  for (int s = 0; s < lf.rows; ++s)
    for (int t = 0; t < lf.cols; ++t)
      for (int c = 0; c < lf.channels; ++c) {
        srgc::Plane& p = lf.view(s, t).planes[c];
        for (int y = 0; y < lf.height; ++y)
          for (int x = 0; x < lf.width; ++x) p.at(x, y) = a(s, t, c, y, x);
      }
  lf.Validate();
  return lf;
}

py::dict EncodeReportDict(const srgc::EncodeReport& r) {
  py::dict d;
  d["super_rays"] = r.super_rays;
  d["total_sr"] = r.total_units;
  d["coarsened"] = r.coarsened;
  d["partitioned"] = r.partitioned;
  d["direct"] = r.direct;
  d["pairs"] = r.grouping.pairs;
  d["mse_threshold"] = r.grouping.threshold;
  d["one_level_groups"] = r.grouping.one_level_groups;
  d["groups"] = r.grouping.groups;
  d["grouped"] = r.grouping.grouped;
  d["ratio_c"] = r.ratio_coarsened;
  d["ratio_o"] = r.ratio_overall;
  d["eig_enc"] = r.eig_count;
  d["stream_bytes"] = r.stream_bytes;
  d["stage_seconds"] = r.stage_seconds;
  return d;
}

py::dict DecodeReportDict(const srgc::DecodeReport& r) {
  py::dict d;
  d["total_sr"] = r.total_units;
  d["coarsened"] = r.coarsened;
  d["groups"] = r.groups;
  d["grouped"] = r.grouped;
  d["ungrouped"] = r.ungrouped;
  d["eig_dec"] = r.eig_count;
  d["stage_seconds"] = r.stage_seconds;
  return d;
}

py::bytes ToBytes(const std::vector<uint8_t>& v) {
  return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

std::vector<uint8_t> FromBytes(const py::bytes& b) {
  const std::string s = b;
  return {s.begin(), s.end()};
}

}  // namespace

PYBIND11_MODULE(srgc, m) {
  m.doc() = "Super-ray graph light field codec";

  py::register_exception<srgc::Error>(m, "SrgcError", PyExc_ValueError);

  py::class_<srgc::LightField>(m, "LightField")
      .def_readonly("rows", &srgc::LightField::rows)
      .def_readonly("cols", &srgc::LightField::cols)
      .def_readonly("width", &srgc::LightField::width)
      .def_readonly("height", &srgc::LightField::height)
      .def_readonly("bit_depth", &srgc::LightField::bit_depth)
      .def_readonly("channels", &srgc::LightField::channels)
      .def("to_numpy", &LightFieldToNumpy)
      .def_static("from_numpy", &LightFieldFromNumpy, py::arg("array"),
                  py::arg("bit_depth") = 8)
      .def("__eq__", [](const srgc::LightField& a, const srgc::LightField& b) {
        return a == b;
      });

  py::class_<srgc::DisparityMap>(m, "DisparityMap")
      .def_readonly("width", &srgc::DisparityMap::width)
      .def_readonly("height", &srgc::DisparityMap::height)
      .def("to_numpy", [](const srgc::DisparityMap& d) {
        py::array_t<float> out({d.height, d.width});
        std::copy(d.values.begin(), d.values.end(), out.mutable_data());
        return out;
      })
      .def_static("from_numpy",
                  [](py::array_t<float, py::array::c_style | py::array::forcecast> a) {
                    if (a.ndim() != 2) throw srgc::InvalidArgument("expected 2-D array");
                    srgc::DisparityMap d(int(a.shape(1)), int(a.shape(0)));
                    std::copy(a.data(), a.data() + a.size(), d.values.begin());
                    return d;
                  });

  py::class_<srgc::CodecConfig>(m, "CodecConfig")
      .def(py::init<>())
      .def_readwrite("q_gft", &srgc::CodecConfig::q_gft)
      .def_readwrite("q_dct", &srgc::CodecConfig::q_dct)
      .def_readwrite("n_target", &srgc::CodecConfig::n_target)
      .def_readwrite("max_vertices", &srgc::CodecConfig::max_vertices)
      .def_readwrite("q_switch", &srgc::CodecConfig::q_switch)
      .def_readwrite("slic_k", &srgc::CodecConfig::slic_k)
      .def_readwrite("compactness", &srgc::CodecConfig::compactness)
      .def_readwrite("bin_width", &srgc::CodecConfig::bin_width)
      .def_readwrite("grouping", &srgc::CodecConfig::grouping)
      .def_readwrite("explicit_groups", &srgc::CodecConfig::explicit_groups)
      .def_readwrite("seed", &srgc::CodecConfig::seed)
      .def_readwrite("threads", &srgc::CodecConfig::threads)
      .def("set", [](srgc::CodecConfig& c, const std::string& key,
                     const std::string& value) {
        srgc::ApplyConfigEntry(c, key, value);
      });

  m.def("synthesize", [](const std::string& spec_text) {
    return srgc::SynthesizeLightField(srgc::ParseSceneSpec(spec_text));
  }, py::arg("spec_text"));
  m.def("load_light_field", &srgc::LoadLightField);
  m.def("save_light_field", &srgc::SaveLightField);
  m.def("load_disparity", &srgc::LoadDisparity);
  m.def("save_disparity", &srgc::SaveDisparity);

  m.def("encode", [](const srgc::LightField& lf, const srgc::DisparityMap& d,
                     const srgc::CodecConfig& cfg) {
    auto [bs, report] = srgc::Encode(lf, d, cfg);
    return py::make_tuple(ToBytes(srgc::Serialize(bs)), EncodeReportDict(report));
  }, py::arg("lf"), py::arg("disparity"), py::arg("config") = srgc::CodecConfig());
  m.def("decode", [](const py::bytes& data, int threads) {
    auto [lf, report] = srgc::Decode(srgc::Deserialize(FromBytes(data)), threads);
    return py::make_tuple(std::move(lf), DecodeReportDict(report));
  }, py::arg("data"), py::arg("threads") = 1);

  m.def("psnr", &srgc::Psnr);
  m.def("bpp", [](uint64_t bytes, const srgc::LightField& lf) {
    return srgc::Bpp(bytes, lf);
  });
  m.def("grouping_ratios", [](uint64_t grouped, uint64_t coarsened, uint64_t total) {
    const auto r = srgc::ComputeGroupingRatios(grouped, coarsened, total);
    return py::make_tuple(r.coarsened, r.overall);
  });
  m.def("pair_count", [](uint64_t n) { return srgc::PairCount(n); });

  m.def("entropy_encode", [](const std::vector<int64_t>& symbols, int ctx) {
    return ToBytes(srgc::EntropyEncode(symbols, srgc::ContextId(ctx)));
  }, py::arg("symbols"), py::arg("ctx") = 0);
  m.def("entropy_decode", [](const py::bytes& data, int ctx) {
    return srgc::EntropyDecode(FromBytes(data), srgc::ContextId(ctx));
  }, py::arg("data"), py::arg("ctx") = 0);

  m.def("run_grouping", [](const std::vector<std::vector<double>>& coeffs,
                           const std::vector<std::vector<double>>& signals,
                           double bin_width) {
    const srgc::GroupSet gs = srgc::RunGrouping(coeffs, signals, bin_width);
    py::list groups;
    for (const auto& g : gs.groups) {
      py::dict d;
      d["members"] = g.members;
      d["main"] = g.main;
      groups.append(d);
    }
    py::dict out;
    out["groups"] = groups;
    out["ungrouped"] = gs.ungrouped;
    out["threshold"] = gs.threshold;
    out["pairs"] = gs.pair_count;
    return out;
  }, py::arg("coeffs"), py::arg("signals"), py::arg("bin_width") = 5.0);
  m.def("merge_groups", &srgc::MergeGroups);

  m.def("eigendecompose", [](py::array_t<double, py::array::c_style | py::array::forcecast> a) {
    if (a.ndim() != 2 || a.shape(0) != a.shape(1)) {
      throw srgc::InvalidArgument("expected a square matrix");
    }
    const int n = int(a.shape(0));
    Eigen::MatrixXd dense(n, n);
    auto r = a.unchecked<2>();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dense(i, j) = r(i, j);
    const srgc::EigenBasis b = srgc::Eigendecompose(dense.sparseView());
    py::array_t<double> vals(n), vecs({n, n});
    auto v = vecs.mutable_unchecked<2>();
    for (int i = 0; i < n; ++i) {
      vals.mutable_at(i) = b.eigenvalues[i];
      for (int j = 0; j < n; ++j) v(i, j) = b.vectors(i, j);
    }
    return py::make_tuple(vals, vecs);
  });
  m.def("dct1d", &srgc::Dct1d);
  m.def("idct1d", &srgc::Idct1d);
}
