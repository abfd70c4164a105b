#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace kdvlab::detail {
namespace {

std::mutex planner_mutex;

struct Plan {
  int n;
  double* real;
  fftw_complex* spec;
  fftw_plan forward;
  fftw_plan backward;

  explicit Plan(int n_) : n(n_) {
    real = fftw_alloc_real(n);
    spec = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard<std::mutex> lock(planner_mutex);
    forward = fftw_plan_dft_r2c_1d(n, real, spec, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(n, spec, real, FFTW_ESTIMATE);
  }
  ~Plan() {
    std::lock_guard<std::mutex> lock(planner_mutex);
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(real);
    fftw_free(spec);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
};

Plan& plan_for(int n) {
  thread_local std::map<int, std::unique_ptr<Plan>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Plan>(n);
  return *slot;
}

}  // namespace

std::vector<std::complex<double>> analyze(const std::vector<double>& samples) {
  const int n = static_cast<int>(samples.size());
  if (n < 1) throw std::invalid_argument("analyze: empty sample vector");
  Plan& p = plan_for(n);
  std::copy(samples.begin(), samples.end(), p.real);
  fftw_execute(p.forward);
  std::vector<std::complex<double>> out(n / 2 + 1);
  const double inv = 1.0 / n;
  for (int j = 0; j <= n / 2; ++j) out[j] = {p.spec[j][0] * inv, p.spec[j][1] * inv};
  return out;
}

std::vector<double> synthesize(const std::vector<std::complex<double>>& half, int n) {
  const int K = static_cast<int>(half.size()) - 1;
  if (2 * K + 1 > n) throw std::invalid_argument("synthesize: too few samples for mode count");
  Plan& p = plan_for(n);
  for (int j = 0; j <= n / 2; ++j) {
    const std::complex<double> c = j <= K ? half[j] : std::complex<double>{};
    p.spec[j][0] = c.real();
    p.spec[j][1] = j == 0 ? 0.0 : c.imag();
  }
  fftw_execute(p.backward);
  return std::vector<double>(p.real, p.real + n);
}

}  // namespace kdvlab::detail
