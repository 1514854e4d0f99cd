#include "ankh/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace ankh {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t half_complex_size(const std::vector<int>& dims) {
  std::size_t s = 1;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) s *= dims[i];
  return s * (dims.back() / 2 + 1);
}

}  // namespace

CirculantSpectrum::CirculantSpectrum(std::vector<int> block_dims, std::vector<double> generator)
    : block_(std::move(block_dims)) {
  embed_.reserve(block_.size());
  for (int b : block_) {
    if (b < 1) throw std::invalid_argument("CirculantSpectrum: block dim must be >= 1");
    embed_.push_back(2 * b - 1);
  }
  m_ = 1;
  for (int e : embed_) m_ *= e;
  if (generator.size() != m_) {
    throw std::invalid_argument("CirculantSpectrum: generator size mismatch");
  }
  spec_ = forward(generator);
}

std::size_t CirculantSpectrum::block_size() const {
  std::size_t s = 1;
  for (int b : block_) s *= b;
  return s;
}

std::vector<std::complex<double>> CirculantSpectrum::forward(std::vector<double>& padded) const {
  std::vector<std::complex<double>> out(half_complex_size(embed_));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_r2c(static_cast<int>(embed_.size()), embed_.data(), padded.data(),
                             reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  if (!plan) throw std::runtime_error("CirculantSpectrum: fftw r2c planning failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

double CirculantSpectrum::max_relative_imag() const {
  double max_im = 0.0, max_abs = 0.0;
  for (const auto& d : spec_) {
    max_im = std::max(max_im, std::abs(d.imag()));
    max_abs = std::max(max_abs, std::abs(d));
  }
  return max_abs > 0.0 ? max_im / max_abs : 0.0;
}

std::vector<double> CirculantSpectrum::pad(const std::vector<double>& v) const {
  if (v.size() != block_size()) throw std::invalid_argument("CirculantSpectrum: input size mismatch");
  std::vector<double> padded(m_, 0.0);
  const int rank = static_cast<int>(block_.size());
  std::vector<int> idx(rank, 0);
  std::size_t src = 0;
  while (true) {
    std::size_t dst = 0;
    for (int a = 0; a < rank; ++a) dst = dst * embed_[a] + idx[a];
    padded[dst] = v[src++];
    int a = rank - 1;
    while (a >= 0 && ++idx[a] == block_[a]) idx[a--] = 0;
    if (a < 0) break;
  }
  return padded;
}

double CirculantSpectrum::quadratic_form(const std::vector<double>& v) const {
  std::vector<double> padded = pad(v);
  const std::vector<std::complex<double>> w = forward(padded);

  // full-spectrum sum from the half-complex layout; the last axis is odd so
  // only the k_last = 0 entries are self-conjugate
  const int last = embed_.back();
  const int half = last / 2 + 1;
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double mult = (static_cast<int>(i % half) == 0) ? 1.0 : 2.0;
    acc += mult * spec_[i].real() * std::norm(w[i]);
  }
  return acc / static_cast<double>(m_);
}

std::vector<double> CirculantSpectrum::apply(const std::vector<double>& v) const {
  std::vector<double> padded = pad(v);
  std::vector<std::complex<double>> w = forward(padded);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] *= spec_[i];

  std::vector<double> full(m_);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_c2r(static_cast<int>(embed_.size()), embed_.data(),
                             reinterpret_cast<fftw_complex*>(w.data()), full.data(),
                             FFTW_ESTIMATE);
  }
  if (!plan) throw std::runtime_error("CirculantSpectrum: fftw c2r planning failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  const double inv_m = 1.0 / static_cast<double>(m_);
  std::vector<double> out(block_size());
  const int rank = static_cast<int>(block_.size());
  std::vector<int> idx(rank, 0);
  std::size_t dst = 0;
  while (true) {
    std::size_t src = 0;
    for (int a = 0; a < rank; ++a) src = src * embed_[a] + idx[a];
    out[dst++] = full[src] * inv_m;
    int a = rank - 1;
    while (a >= 0 && ++idx[a] == block_[a]) idx[a--] = 0;
    if (a < 0) break;
  }
  return out;
}

}  // namespace ankh
