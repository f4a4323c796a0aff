#include "srgc/transform.h"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "srgc/error.h"

namespace srgc {

std::vector<double> Gft(const EigenBasis& basis, const std::vector<double>& f) {
  if (int(f.size()) != basis.dim()) {
    throw InvalidArgument("gft: signal length " + std::to_string(f.size()) +
                          " != basis dimension " + std::to_string(basis.dim()));
  }
  const Eigen::VectorXd c =
      basis.vectors.transpose() *
      Eigen::Map<const Eigen::VectorXd>(f.data(), Eigen::Index(f.size()));
  return {c.data(), c.data() + c.size()};
}

std::vector<double> Igft(const EigenBasis& basis,
                         const std::vector<double>& coeffs) {
  if (int(coeffs.size()) != basis.dim()) {
    throw InvalidArgument("igft: coefficient count " +
                          std::to_string(coeffs.size()) +
                          " != basis dimension " + std::to_string(basis.dim()));
  }
  const Eigen::VectorXd f =
      basis.vectors * Eigen::Map<const Eigen::VectorXd>(
                          coeffs.data(), Eigen::Index(coeffs.size()));
  return {f.data(), f.data() + f.size()};
}

namespace {

// FFTW planning is not thread-safe; execution on fresh aligned buffers is.
// Plans are created once per (size, kind) and reused with fftw_execute_r2r.
class DctPlans {
 public:
  static DctPlans& Get() {
    static DctPlans* plans = new DctPlans;
    return *plans;
  }

  fftw_plan Plan(int n, fftw_r2r_kind kind) {
    std::lock_guard<std::mutex> lock(mu_);
    auto& slot = plans_[{n, kind}];
    if (!slot) {
      double* buf = fftw_alloc_real(size_t(n));
      slot = fftw_plan_r2r_1d(n, buf, buf, kind, FFTW_ESTIMATE);
      fftw_free(buf);
    }
    return slot;
  }

 private:
  std::mutex mu_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

struct FftwBuffer {
  explicit FftwBuffer(size_t n) : data(fftw_alloc_real(n)) {}
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  double* data;
};

}  // namespace

std::vector<double> Dct1d(const std::vector<double>& x) {
  const int n = int(x.size());
  if (n == 0) throw InvalidArgument("dct of an empty vector");
  FftwBuffer buf(x.size());
  std::copy(x.begin(), x.end(), buf.data);
  fftw_execute_r2r(DctPlans::Get().Plan(n, FFTW_REDFT10), buf.data, buf.data);
  // FFTW's REDFT10 is 2 * sum x_j cos(pi (j + 1/2) k / n).
  std::vector<double> out(buf.data, buf.data + n);
  const double s0 = std::sqrt(1.0 / (4.0 * n)), sk = std::sqrt(1.0 / (2.0 * n));
  out[0] *= s0;
  for (int k = 1; k < n; ++k) out[k] *= sk;
  return out;
}

std::vector<double> Idct1d(const std::vector<double>& x) {
  const int n = int(x.size());
  if (n == 0) throw InvalidArgument("idct of an empty vector");
  FftwBuffer buf(x.size());
  // REDFT01 computes x_0 + 2 sum_{k>=1} x_k cos(pi k (j + 1/2) / n).
  buf.data[0] = x[0] * std::sqrt(1.0 / n);
  const double sk = std::sqrt(1.0 / (2.0 * n));
  for (int k = 1; k < n; ++k) buf.data[k] = x[k] * sk;
  fftw_execute_r2r(DctPlans::Get().Plan(n, FFTW_REDFT01), buf.data, buf.data);
  return {buf.data, buf.data + n};
}

QuantizedVector Quantize(const std::vector<double>& x, double step) {
  if (!(step > 0)) throw InvalidArgument("quantizer step must be > 0");
  QuantizedVector q;
  q.step = step;
  q.levels.reserve(x.size());
  for (double v : x) q.levels.push_back(RoundHalfAway(v / step));
  return q;
}

std::vector<double> Dequantize(const QuantizedVector& q) {
  std::vector<double> out;
  out.reserve(q.levels.size());
  for (int64_t l : q.levels) out.push_back(double(l) * q.step);
  return out;
}

}  // namespace srgc
