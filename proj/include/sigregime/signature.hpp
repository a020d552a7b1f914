#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sigregime/streams.hpp"

namespace sigregime {

// Row-major knot matrix of a stream, optionally with time as coordinate 0.
struct Knots {
  std::size_t n = 0;  // rows
  std::size_t p = 0;  // channels
  std::vector<double> x;
  const double* row(std::size_t i) const { return x.data() + i * p; }
};

Knots knots_of(const Stream& s, bool include_time, double scale = 1.0);

// Number of entries in levels 0..order over a d-letter alphabet.
std::size_t tensor_size(std::size_t d, std::size_t order);

// Element of the truncated tensor algebra, levels stored densely.
class TensorSeries {
 public:
  TensorSeries() = default;
  TensorSeries(std::size_t d, std::size_t order);  // zero series
  static TensorSeries unit(std::size_t d, std::size_t order);

  std::size_t dim() const { return d_; }
  std::size_t order() const { return m_; }
  std::span<double> level(std::size_t k) { return {data_.data() + off_[k], off_[k + 1] - off_[k]}; }
  std::span<const double> level(std::size_t k) const {
    return {data_.data() + off_[k], off_[k + 1] - off_[k]};
  }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }
  double level_norm(std::size_t k) const;
  double dot(const TensorSeries& o) const;

  // multiplies this series on the right by exp(v), in place
  void mul_exp(const double* v);

 private:
  std::size_t d_ = 0, m_ = 0;
  std::vector<std::size_t> off_;
  std::vector<double> data_;
};

TensorSeries tensor_exp(std::span<const double> v, std::size_t order);
TensorSeries chen_product(const TensorSeries& a, const TensorSeries& b);

TensorSeries signature_of_knots(const Knots& k, std::size_t order);
TensorSeries truncated_signature(const Stream& s, std::size_t order, bool include_time = false);
TensorSeries expected_signature(const std::vector<Stream>& paths, std::size_t order,
                                bool include_time = false);
TensorSeries mean_series(const std::vector<TensorSeries>& sigs);

// Expanding-window signatures: row i holds levels 1..order of the signature of
// knots 0..i (row 0 is zero). Knots are divided by `scale` first.
Knots signature_lift_knots(const Knots& k, std::size_t order);
Stream signature_lift(const Stream& s, std::size_t order, bool include_time = false,
                      double scale = 1.0);

}  // namespace sigregime
