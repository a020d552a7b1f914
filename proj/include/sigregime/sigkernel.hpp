#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "sigregime/signature.hpp"
#include "sigregime/streams.hpp"

namespace sigregime {

enum class StaticLift { Linear, Rbf };

// Linear lift with bandwidth s uses <x, y> / s^2 (knots divided by s).
// RBF lift uses exp(-|x - y|^2 / (2 s^2)).
// Rank 2: knots are divided by sigma1 before the expanding-window signature
// lift of order inner_order; the outer rank-1 kernel uses `lift` with sigma2.
struct KernelSpec {
  int rank = 1;
  StaticLift lift = StaticLift::Linear;
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  int dyadic_order = 2;
  std::size_t inner_order = 3;
  bool truncated = false;
  std::size_t truncation = 4;
  bool include_time = true;
  std::size_t capacity = 2'000'000;  // max tensor entries for explicit signatures

  void validate() const;
};

std::string lift_name(StaticLift l);
StaticLift parse_lift(const std::string& s);

// Path data precomputed once per path for repeated kernel evaluation.
struct PreparedPath {
  Knots knots;
  TensorSeries sig;  // only for truncated mode with linear lift
  bool explicit_sig = false;
};

class SignatureKernel {
 public:
  explicit SignatureKernel(KernelSpec spec);

  const KernelSpec& spec() const { return spec_; }
  PreparedPath prepare(const Stream& s) const;
  std::vector<PreparedPath> prepare_all(const std::vector<Stream>& paths) const;

  double operator()(const PreparedPath& x, const PreparedPath& y) const;
  double operator()(const Stream& x, const Stream& y) const;

 private:
  KernelSpec spec_;
};

using PathRefs = std::vector<const PreparedPath*>;

PathRefs refs_of(const std::vector<PreparedPath>& v);

Eigen::MatrixXd gram(const SignatureKernel& k, const PathRefs& xs, const PathRefs& ys);
// xs against itself; each unordered pair evaluated once so the result is
// exactly symmetric
Eigen::MatrixXd gram_symmetric(const SignatureKernel& k, const PathRefs& xs);
Eigen::MatrixXd gram(const std::vector<Stream>& xs, const std::vector<Stream>& ys,
                     const KernelSpec& spec);

// Increment inner products <dx_i, dy_j> under the static lift, (nx-1) x (ny-1)
// row-major.
void static_increments(const Knots& x, const Knots& y, StaticLift lift, double sigma,
                       std::vector<double>& out);

// Explicit second-order scheme for f = 1 + int int f <dx, dy> on a grid
// refined 2^dyadic_order times per increment.
double goursat_from_increments(const std::vector<double>& inc, std::size_t m, std::size_t n,
                               int dyadic_order);

// Exact level-wise inner products of truncated signatures of the
// piecewise-linear lifted paths, from increment inner products only.
double truncated_from_increments(const std::vector<double>& inc, std::size_t m, std::size_t n,
                                 std::size_t order);

double solve_goursat(const Stream& x, const Stream& y, const KernelSpec& spec);
double sig_kernel(const Stream& x, const Stream& y, const KernelSpec& spec);
double truncated_kernel(const Stream& x, const Stream& y, std::size_t order, const KernelSpec& spec);
double rank2_kernel(const Stream& x, const Stream& y, const KernelSpec& spec);

}  // namespace sigregime
