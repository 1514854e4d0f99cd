#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace ankh {

/// Circulant embedding of a multilevel block-Toeplitz operator.
///
/// The operator entry depends only on per-axis index offsets within the block
/// dims b_i; the embedding is the circulant of extent 2 b_i - 1 per axis whose
/// generator stores the entry for offset o at position o (o >= 0) or
/// o + (2 b_i - 1) (o < 0), row-major across axes. Application and the
/// quadratic form run through real-to-complex FFTs of the padded input.
class CirculantSpectrum {
 public:
  CirculantSpectrum(std::vector<int> block_dims, std::vector<double> generator);

  const std::vector<int>& block_dims() const { return block_; }
  const std::vector<int>& embed_dims() const { return embed_; }
  std::size_t embed_size() const { return m_; }
  std::size_t block_size() const;

  /// Half-complex spectrum (FFTW r2c layout over the embedding dims).
  const std::vector<std::complex<double>>& spectrum() const { return spec_; }

  /// max |Im d_k| / max |d_k|; the spectrum of a symmetric real generator is
  /// real up to round-off.
  double max_relative_imag() const;

  /// v^T A v for a block vector v; needs a single forward transform.
  double quadratic_form(const std::vector<double>& v) const;

  /// A v for a block vector v.
  std::vector<double> apply(const std::vector<double>& v) const;

 private:
  std::vector<int> block_, embed_;
  std::size_t m_ = 1;
  std::vector<std::complex<double>> spec_;

  std::vector<double> pad(const std::vector<double>& v) const;
  std::vector<std::complex<double>> forward(std::vector<double>& padded) const;
};

}  // namespace ankh
