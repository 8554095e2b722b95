#include "decaylab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace decaylab::fft {
namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(int n) {
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(plan_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  const std::size_t count = static_cast<std::size_t>(n) * n * n;
  aligned_vector<cplx> scratch(count);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = (n >= 32 ? FFTW_MEASURE : FFTW_ESTIMATE);
  PlanPair p;
  p.forward = fftw_plan_dft_3d(n, n, n, buf, buf, FFTW_FORWARD, flags);
  p.backward = fftw_plan_dft_3d(n, n, n, buf, buf, FFTW_BACKWARD, flags);
  if (!p.forward || !p.backward) throw std::runtime_error("FFTW planning failed");
  return cache.emplace(n, p).first->second;
}

void check(std::span<cplx> buffer, int n) {
  if (buffer.size() != static_cast<std::size_t>(n) * n * n) {
    throw std::invalid_argument("fft buffer size does not match n^3");
  }
}

}  // namespace

void forward(std::span<cplx> buffer, int n) {
  check(buffer, n);
  const PlanPair& p = plans_for(n);
  auto* buf = reinterpret_cast<fftw_complex*>(buffer.data());
  fftw_execute_dft(p.forward, buf, buf);
}

void backward(std::span<cplx> buffer, int n) {
  check(buffer, n);
  const PlanPair& p = plans_for(n);
  auto* buf = reinterpret_cast<fftw_complex*>(buffer.data());
  fftw_execute_dft(p.backward, buf, buf);
}

}  // namespace decaylab::fft
