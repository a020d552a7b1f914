#include <catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <numeric>

#include "helpers.hpp"
#include "sigregime/cluster.hpp"
#include "sigregime/detect.hpp"
#include "sigregime/error.hpp"

using namespace sigregime;
using Catch::Approx;

namespace {

Eigen::MatrixXd hand4() {
  Eigen::MatrixXd d(4, 4);
  d << 0, 1, 4, 5, 1, 0, 3, 6, 4, 3, 0, 2, 5, 6, 2, 0;
  return d;
}

// same partition up to renaming
bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (ab.count(a[i]) && ab[a[i]] != b[i]) return false;
    if (ba.count(b[i]) && ba[b[i]] != a[i]) return false;
    ab[a[i]] = b[i];
    ba[b[i]] = a[i];
  }
  return true;
}

}  // namespace

TEST_CASE("distance matrix") {
  KernelSpec s;
  s.sigma1 = 0.5;
  SignatureKernel k(s);
  std::mt19937_64 g(4);

  SECTION("identical ensembles") {
    auto p = testing_util::random_stream(g, 6, 2);
    auto prep = k.prepare_all(std::vector<Stream>(8, p));
    auto d = distance_matrix(k, prep, 3);
    REQUIRE(d.rows() == 6);
    REQUIRE(d.cwiseAbs().maxCoeff() == 0.0);
  }
  std::vector<Stream> paths;
  for (int i = 0; i < 16; ++i) paths.push_back(testing_util::random_stream(g, 6, 2));
  auto prep = k.prepare_all(paths);
  auto d = distance_matrix(k, prep, 4);

  SECTION("symmetry, zero diagonal, agreement with the generic route") {
    std::vector<PathRefs> ens;
    for (std::size_t t = 0; t + 4 <= prep.size(); ++t) {
      PathRefs e;
      for (std::size_t i = t; i < t + 4; ++i) e.push_back(&prep[i]);
      ens.push_back(e);
    }
    auto generic = distance_matrix(k, ens);
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
      REQUIRE(d(i, i) == 0.0);
      for (Eigen::Index j = 0; j < d.cols(); ++j) {
        REQUIRE(d(i, j) == d(j, i));
        REQUIRE(generic(i, j) == Approx(d(i, j)).epsilon(1e-9).margin(1e-12));
      }
    }
  }
  SECTION("triangle inequality") {
    for (Eigen::Index i = 0; i < d.rows(); ++i)
      for (Eigen::Index j = 0; j < d.rows(); ++j)
        for (Eigen::Index l = 0; l < d.rows(); ++l) REQUIRE(d(i, j) <= d(i, l) + d(l, j) + 1e-12);
  }
  REQUIRE_THROWS_AS(distance_matrix(k, std::vector<PreparedPath>(prep.begin(), prep.begin() + 4), 4), Error);
}

TEST_CASE("agglomerative merging") {
  SECTION("singletons when k equals the item count") {
    auto a = agglomerate(hand4(), 4, Linkage::Average);
    REQUIRE(a.labels == std::vector<int>{0, 1, 2, 3});
    REQUIRE(a.merges.empty());
  }
  SECTION("hand-computed dendrograms") {
    auto avg = agglomerate(hand4(), 1, Linkage::Average);
    REQUIRE(avg.merges.size() == 3);
    REQUIRE(avg.merges[0].a == 0);
    REQUIRE(avg.merges[0].b == 1);
    REQUIRE(avg.merges[0].height == 1.0);
    REQUIRE(avg.merges[1].a == 2);
    REQUIRE(avg.merges[1].b == 3);
    REQUIRE(avg.merges[1].height == 2.0);
    REQUIRE(avg.merges[2].height == Approx(4.5));
    REQUIRE(agglomerate(hand4(), 1, Linkage::Max).merges[2].height == 6.0);
    REQUIRE(agglomerate(hand4(), 1, Linkage::Min).merges[2].height == 3.0);
    REQUIRE(agglomerate(hand4(), 2, Linkage::Average).labels == std::vector<int>{0, 0, 1, 1});
  }
  SECTION("ties go to the smallest pair") {
    Eigen::MatrixXd eq = Eigen::MatrixXd::Constant(4, 4, 1.0);
    eq.diagonal().setZero();
    auto a = agglomerate(eq, 3, Linkage::Max);
    REQUIRE(a.merges[0].a == 0);
    REQUIRE(a.merges[0].b == 1);
  }
  SECTION("block structure") {
    Eigen::MatrixXd b = Eigen::MatrixXd::Constant(10, 10, 10.0);
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j)
        if ((i < 4) == (j < 4)) b(i, j) = i == j ? 0.0 : 0.1;
    for (auto l : {Linkage::Max, Linkage::Min, Linkage::Average}) {
      auto a = agglomerate(b, 2, l);
      for (int i = 0; i < 10; ++i) REQUIRE(a.labels[i] == (i < 4 ? 0 : 1));
    }
  }
  SECTION("permutation equivariance and monotone heights") {
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::vector<Eigen::Vector2d> pts(12);
    for (auto& p : pts) p = {u(g), u(g)};
    Eigen::MatrixXd d(12, 12);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) d(i, j) = (pts[i] - pts[j]).norm();
    std::vector<int> perm(12);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), g);
    Eigen::MatrixXd pd(12, 12);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) pd(i, j) = d(perm[i], perm[j]);
    for (auto l : {Linkage::Max, Linkage::Min, Linkage::Average}) {
      auto a = agglomerate(d, 3, l), b = agglomerate(pd, 3, l);
      std::vector<int> back(12);
      for (int i = 0; i < 12; ++i) back[perm[i]] = b.labels[i];
      REQUIRE(same_partition(a.labels, back));
      if (l != Linkage::Min) {
        auto full = agglomerate(d, 1, l);
        for (std::size_t m = 1; m < full.merges.size(); ++m)
          REQUIRE(full.merges[m].height >= full.merges[m - 1].height);
      }
    }
  }
  REQUIRE_THROWS_AS(agglomerate(hand4(), 0, Linkage::Max), Error);
  REQUIRE_THROWS_AS(agglomerate(hand4(), 5, Linkage::Max), Error);
  REQUIRE(parse_linkage("average") == Linkage::Average);
  REQUIRE_THROWS_AS(parse_linkage("ward"), Error);
}

TEST_CASE("sub-path labels from ensembles") {
  auto all = assign_subpath_labels(std::vector<int>(5, 1), 7, 3);
  for (const auto& v : all) REQUIRE(*v == 1.0);
  auto two = assign_subpath_labels({0, 1}, 3, 2);
  REQUIRE(*two[0] == 0.0);
  REQUIRE(*two[1] == 0.5);
  REQUIRE(*two[2] == 1.0);
  REQUIRE(permutation_accuracy({0.0, 0.0, 1.0, 1.0}, {1, 1, 0, 0}, 2) == 1.0);
  REQUIRE(permutation_accuracy({0.0, std::nullopt, 1.0, 0.0}, {1, 0, 0, 0}, 2) == Approx(2.0 / 3.0));
}

TEST_CASE("toy regime clustering") {
  KernelSpec s;
  s.lift = StaticLift::Rbf;
  s.sigma1 = 0.025;
  s.dyadic_order = 0;
  SignatureKernel k(s);
  RegimeSwitchSpec rs;
  rs.models = {ModelPair{Family::Gbm, {0.0, 0.2}}, ModelPair{Family::Gbm, {0.0, 0.3}}};
  rs.horizon = 2.0;
  rs.mode = SwitchMode::FixedDuration;
  rs.entries = {1176};
  rs.duration = 1176;
  rs.seed = 12;
  auto rp = simulate_regime_switching(rs);
  auto sp = extract_subpaths(rp.path, 7);
  auto prep = prepare_subpaths(k, sp, compose({Transform::increment(), Transform::time_norm(), Transform::state_norm()}));
  auto a = agglomerate(distance_matrix(k, prep, 10), 2, Linkage::Average);
  auto per_sub = assign_subpath_labels(a.labels, sp.size(), 10);
  REQUIRE(permutation_accuracy(per_sub, subpath_labels(rp.labels, 7), 2) > 0.85);
}
