#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "sigregime/sigkernel.hpp"

namespace sigregime {

enum class Estimator { Biased, Unbiased };

double mmd_biased(const Eigen::MatrixXd& kxx, const Eigen::MatrixXd& kxy, const Eigen::MatrixXd& kyy);
double mmd_unbiased(const Eigen::MatrixXd& kxx, const Eigen::MatrixXd& kxy, const Eigen::MatrixXd& kyy);
double mmd_from_gram(Estimator e, const Eigen::MatrixXd& kxx, const Eigen::MatrixXd& kxy,
                     const Eigen::MatrixXd& kyy);

// Squared MMD between two ensembles.
double ensemble_mmd(const SignatureKernel& k, const PathRefs& x, const PathRefs& y,
                    Estimator e = Estimator::Unbiased);
// sqrt of the clamped biased statistic
double mmd_distance(const SignatureKernel& k, const PathRefs& x, const PathRefs& y);

enum class NullSource { Bootstrap, Gamma, Rolling, Permutation };

struct NullDistribution {
  NullSource source = NullSource::Bootstrap;
  std::vector<double> samples;  // sorted ascending (empirical sources)
  double alpha = 0.05;
  double shape = 0.0, scale = 0.0;  // gamma
  std::size_t n = 0;                // gamma: sample-size factor N
  double critical = 0.0;

  // P(D <= x) under the null
  double cdf(double x) const;
};

std::string null_source_name(NullSource s);

// Order statistic at ceil(q * M), 1-based, of sorted samples.
double empirical_quantile(const std::vector<double>& sorted, double q);

NullDistribution empirical_null(std::vector<double> samples, double alpha,
                                NullSource source = NullSource::Bootstrap);

// M_pairs MMD values between disjoint h2-subsets of the bank; draw m uses an
// RNG stream derived from (seed, m).
NullDistribution bootstrap_null(const SignatureKernel& k, const std::vector<PreparedPath>& bank,
                                std::size_t h2, std::size_t m_pairs, std::uint64_t seed,
                                double alpha = 0.05, Estimator e = Estimator::Unbiased);

// N*D ~ Gamma(mean^2/var, N*var/mean); the critical value is reported on the
// scale of D (quantile divided by N).
NullDistribution gamma_threshold(double mean, double var, std::size_t n, double alpha);
NullDistribution gamma_threshold(const std::vector<double>& samples, std::size_t n, double alpha);

NullDistribution permutation_null(const SignatureKernel& k, const PathRefs& x, const PathRefs& y,
                                  std::size_t n_perm, std::uint64_t seed, double alpha = 0.05,
                                  Estimator e = Estimator::Unbiased);

struct Verdict {
  double statistic = 0.0;
  double critical = 0.0;
  bool reject = false;
};

Verdict two_sample_test(const SignatureKernel& k, const PathRefs& x, const PathRefs& y,
                        const NullDistribution& null, Estimator e = Estimator::Unbiased);

}  // namespace sigregime
