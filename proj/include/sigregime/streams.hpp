#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sigregime {

// Discretely observed path: strictly increasing timestamps and one
// d-dimensional value per timestamp, stored row-major.
class Stream {
 public:
  Stream() = default;
  Stream(std::vector<double> times, std::vector<double> values, std::size_t dim);

  std::size_t size() const { return times_.size(); }
  std::size_t dim() const { return dim_; }
  double time(std::size_t i) const { return times_[i]; }
  std::span<const double> value(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
  double at(std::size_t i, std::size_t c) const { return values_[i * dim_ + c]; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }

  // rows [begin, end)
  Stream slice(std::size_t begin, std::size_t end) const;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
  std::size_t dim_ = 0;
};

std::vector<double> embed_linear(const Stream& s, double t);

// Sum of Euclidean segment lengths of the interpolant.
double one_variation(const Stream& s, bool include_time = false);

enum class TransformKind { TimeNorm, StateNorm, Increment, Scale, LeadLag };

struct Transform {
  TransformKind kind;
  std::vector<double> lambda;  // Scale only: one entry (broadcast) or one per channel

  static Transform time_norm() { return {TransformKind::TimeNorm, {}}; }
  static Transform state_norm() { return {TransformKind::StateNorm, {}}; }
  static Transform increment() { return {TransformKind::Increment, {}}; }
  static Transform lead_lag() { return {TransformKind::LeadLag, {}}; }
  static Transform scale(std::vector<double> l) { return {TransformKind::Scale, std::move(l)}; }
};

Transform parse_transform(const std::string& name, std::vector<double> lambda = {});
std::string transform_name(TransformKind kind);

Stream apply_transform(const Transform& t, const Stream& s);

// Phi = t_1 o ... o t_n as listed: t_n is applied first.
class StreamTransformer {
 public:
  StreamTransformer() = default;
  explicit StreamTransformer(std::vector<Transform> transforms);

  Stream operator()(const Stream& s) const;
  // Output channel count for a given input dimension; throws on incompatible
  // intermediate dimensions.
  std::size_t output_dim(std::size_t input_dim) const;
  const std::vector<Transform>& transforms() const { return transforms_; }
  bool empty() const { return transforms_.empty(); }

 private:
  std::vector<Transform> transforms_;
};

StreamTransformer compose(std::vector<Transform> transforms);
StreamTransformer compose(std::vector<Transform> transforms, std::size_t input_dim);

struct SubPathSet {
  std::size_t h1 = 0;
  std::vector<Stream> paths;
  std::size_t size() const { return paths.size(); }
};

SubPathSet extract_subpaths(const Stream& s, std::size_t h1);

// Ensemble k holds sub-paths k .. k+h2-1.
struct EnsembleSet {
  std::size_t h2 = 0;
  std::size_t count = 0;
  const SubPathSet* subpaths = nullptr;

  std::size_t first(std::size_t k) const { return k; }
  std::size_t last(std::size_t k) const { return k + h2 - 1; }
  std::vector<const Stream*> members(std::size_t k) const;
  // number of ensembles that contain sub-path i
  std::size_t coverage(std::size_t i) const;
};

EnsembleSet extract_ensembles(const SubPathSet& sp, std::size_t h2);

}  // namespace sigregime
