#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "sigregime/error.hpp"
#include "sigregime/models.hpp"

using namespace sigregime;
using Catch::Approx;

namespace {

std::vector<double> log_returns(const std::vector<Stream>& paths, std::size_t c = 0) {
  std::vector<double> r;
  for (const auto& p : paths)
    for (std::size_t i = 1; i < p.size(); ++i) r.push_back(std::log(p.at(i, c) / p.at(i - 1, c)));
  return r;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double variance(const std::vector<double>& v) {
  double m = mean(v), s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

double excess_kurtosis(const std::vector<double>& v) {
  double m = mean(v), s2 = 0.0, s4 = 0.0;
  for (double x : v) {
    s2 += std::pow(x - m, 2);
    s4 += std::pow(x - m, 4);
  }
  s2 /= v.size();
  s4 /= v.size();
  return s4 / (s2 * s2) - 3.0;
}

// 2H int_0^s (s-u)^a (t-u)^a du by composite Simpson after w = v^(a+1),
// which removes the endpoint singularity at v = 0
double volterra_cov_quadrature(double s, double t, double h) {
  double a = h - 0.5, delta = t - s, top = std::pow(s, a + 1);
  int n = 200000;
  double step = top / n, acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    double w = i * step;
    double v = std::pow(w, 1.0 / (a + 1));
    double f = std::pow(v + delta, a);
    acc += f * (i == 0 || i == n ? 1 : (i % 2 ? 4 : 2));
  }
  return 2 * h * acc * step / 3.0 / (a + 1);
}

}  // namespace

TEST_CASE("gbm degenerate cases") {
  Mesh mesh{0.01, 50};
  auto flat = simulate_gbm(0.0, 0.0, 2, mesh, 3, 2.5, 1);
  for (const auto& p : flat)
    for (double v : p.values()) REQUIRE(v == 2.5);
  auto drift = simulate_gbm(0.3, 0.0, 1, mesh, 1, 1.7, 1);
  for (std::size_t i = 0; i < drift[0].size(); ++i)
    REQUIRE(drift[0].at(i, 0) == Approx(1.7 * std::exp(0.3 * drift[0].time(i))).epsilon(1e-12));
}

TEST_CASE("gbm log-return variance") {
  Mesh mesh{1.0 / 252, 6};
  auto paths = simulate_gbm(0.05, 0.2, 1, mesh, 10000, 1.0, 42);
  auto r = log_returns(paths);
  REQUIRE(variance(r) == Approx(0.04 / 252).epsilon(0.05));
}

TEST_CASE("paths do not depend on how many are drawn") {
  Mesh mesh{0.01, 20};
  auto a = simulate_gbm(0.0, 0.3, 2, mesh, 3, 1.0, 9);
  auto b = simulate_gbm(0.0, 0.3, 2, mesh, 7, 1.0, 9);
  for (int i = 0; i < 3; ++i) REQUIRE(a[i].values() == b[i].values());
}

TEST_CASE("merton reduces to gbm") {
  Mesh mesh{1.0 / 252, 30};
  auto g = simulate_gbm(0.01, 0.2, 2, mesh, 4, 1.0, 5);
  auto m0 = simulate_merton({0.01, 0.2, 0.0, 0.1, 0.1}, 2, mesh, 4, 1.0, 5);
  auto m1 = simulate_merton({0.01, 0.2, 50.0, 0.0, 0.0}, 2, mesh, 4, 1.0, 5);
  for (int i = 0; i < 4; ++i) {
    REQUIRE(g[i].values() == m0[i].values());
    REQUIRE(g[i].values() == m1[i].values());
  }
}

TEST_CASE("merton returns are heavier tailed than gbm") {
  Mesh mesh{1.0 / 252, 101};
  auto g = log_returns(simulate_gbm(0.0, 0.2, 1, mesh, 100, 1.0, 3));
  auto m = log_returns(simulate_merton({0.0, 0.05, 100, 0.0, 0.025}, 1, mesh, 100, 1.0, 3));
  REQUIRE(excess_kurtosis(m) > excess_kurtosis(g) + 0.5);
}

TEST_CASE("Volterra covariance closed form") {
  for (double h : {0.1, 0.3, 0.4}) {
    REQUIRE(volterra_covariance(0.7, 0.7, h) == Approx(std::pow(0.7, 2 * h)));
    for (auto st : {std::pair{0.2, 0.5}, std::pair{0.45, 0.5}, std::pair{1.0, 1.001}}) {
      double ref = volterra_cov_quadrature(st.first, st.second, h);
      REQUIRE(volterra_covariance(st.first, st.second, h) == Approx(ref).epsilon(2e-4));
      REQUIRE(volterra_covariance(st.second, st.first, h) == volterra_covariance(st.first, st.second, h));
    }
  }
}

TEST_CASE("rbergomi moments") {
  Mesh mesh{1.0 / 100, 21};
  SECTION("eta = 0 is Black-Scholes") {
    auto r = simulate_rbergomi({0.04, 0.0, -0.7, 0.1}, 1, mesh, 200, 1);
    for (const auto& v : r.variance)
      for (double x : v.values()) REQUIRE(x == Approx(0.04));
    auto lr = log_returns(r.price);
    REQUIRE(variance(lr) == Approx(0.04 / 100).epsilon(0.1));
  }
  SECTION("Var Y_t = t^2H") {
    auto r = simulate_rbergomi({0.04, 1.5, -0.7, 0.1}, 1, mesh, 10000, 2);
    for (std::size_t i : {5u, 20u}) {
      std::vector<double> y;
      for (const auto& p : r.volterra) y.push_back(p.at(i, 0));
      double t = i * mesh.dt;
      REQUIRE(variance(y) == Approx(std::pow(t, 0.2)).epsilon(0.03));
    }
    // covariance between two times as well
    std::vector<double> a, b;
    for (const auto& p : r.volterra) {
      a.push_back(p.at(10, 0));
      b.push_back(p.at(20, 0));
    }
    double ma = mean(a), mb = mean(b), c = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) c += (a[k] - ma) * (b[k] - mb);
    c /= a.size() - 1;
    REQUIRE(c == Approx(volterra_covariance(0.1, 0.2, 0.1)).epsilon(0.05));
  }
  SECTION("negative leverage") {
    auto r = simulate_rbergomi({0.04, 1.5, -0.7, 0.1}, 1, mesh, 2000, 3);
    std::vector<double> dx, dy;
    for (std::size_t k = 0; k < r.price.size(); ++k)
      for (std::size_t i = 1; i + 1 < mesh.n_obs; ++i) {
        dx.push_back(std::log(r.price[k].at(i, 0) / r.price[k].at(i - 1, 0)));
        dy.push_back(r.volterra[k].at(i, 0) - r.volterra[k].at(i - 1, 0));
      }
    double mx = mean(dx), my = mean(dy), c = 0.0;
    for (std::size_t k = 0; k < dx.size(); ++k) c += (dx[k] - mx) * (dy[k] - my);
    REQUIRE(c < 0.0);
  }
  SECTION("longer grids reuse the leading block") {
    auto a = simulate_rbergomi({0.04, 1.5, -0.7, 0.1}, 1, Mesh{0.01, 11}, 2, 7);
    auto b = simulate_rbergomi({0.04, 1.5, -0.7, 0.1}, 1, Mesh{0.01, 31}, 2, 7);
    auto c = simulate_rbergomi({0.04, 1.5, -0.7, 0.1}, 1, Mesh{0.01, 11}, 2, 7);
    REQUIRE(a.price[1].values() == c.price[1].values());
    REQUIRE(b.price[1].size() == 31);
  }
}

TEST_CASE("unified simulate emits variance channels") {
  ModelPair rb{Family::RBergomi, {0.05, 0.5, -0.7, 0.3}, 2, true};
  auto p = simulate(rb, Mesh{0.01, 15}, 2, 3);
  REQUIRE(p[0].dim() == 4);
  REQUIRE(p[0].at(0, 2) == Approx(0.05));
  std::vector<double> start{2.0, 3.0, 0.09, 0.01};
  auto q = simulate(rb, Mesh{0.01, 15}, 2, 3, &start);
  REQUIRE(q[0].at(0, 0) == 2.0);
  REQUIRE(q[0].at(0, 1) == 3.0);
  REQUIRE(q[0].at(0, 2) == Approx(0.09));
  ModelPair g{Family::Gbm, {0.0, 0.25}, 1, true};
  auto r = simulate(g, Mesh{0.01, 5}, 1, 3);
  for (std::size_t i = 0; i < 5; ++i) REQUIRE(r[0].at(i, 1) == Approx(0.0625));
  ModelPair bad{Family::Gbm, {0.0}, 1, false};
  REQUIRE_THROWS_AS(simulate(bad, Mesh{0.01, 5}, 1, 3), Error);
}

TEST_CASE("regime switching schedule") {
  RegimeSwitchSpec spec;
  spec.models = {ModelPair{Family::Gbm, {0.0, 0.2}}, ModelPair{Family::Gbm, {0.0, 0.3}}};
  spec.h1 = 7;
  spec.horizon = 1.0;
  spec.dt = 1.0 / 700;
  spec.seed = 11;

  SECTION("no entries without intensity") {
    spec.lambda1 = 0.0;
    auto r = simulate_regime_switching(spec);
    REQUIRE(r.tau.empty());
    for (int l : r.labels) REQUIRE(l == 0);
    REQUIRE(r.path.size() == 701);
  }
  SECTION("entries on the lattice, deterministic, continuous") {
    spec.lambda1 = 0.5;
    spec.lambda2 = 0.3;
    auto r = simulate_regime_switching(spec);
    auto r2 = simulate_regime_switching(spec);
    REQUIRE(r.path.values() == r2.path.values());
    REQUIRE(r.tau == r2.tau);
    REQUIRE(r.labels == r2.labels);
    REQUIRE(r.tau.size() >= 2);
    for (std::size_t i = 0; i < r.tau.size(); i += 2) REQUIRE(r.tau[i] % spec.h1 == 0);
    for (std::size_t i = 1; i < r.tau.size(); i += 2) REQUIRE(r.tau[i] % spec.h1 == 1);
    REQUIRE(r.labels.size() == r.path.size());
    // labels switch right after each tau
    for (std::size_t i = 0; i < r.tau.size(); ++i) {
      REQUIRE(r.labels[r.tau[i] + 1] != r.labels[r.tau[i]]);
    }
  }
  SECTION("lattice-aligned variant gives pure sub-paths") {
    spec.lambda1 = 0.5;
    spec.lambda2 = 0.3;
    spec.lattice_aligned = true;
    auto r = simulate_regime_switching(spec);
    for (std::size_t t : r.tau) REQUIRE(t % spec.h1 == 0);
    for (std::size_t j = 0; j < r.path.size() / spec.h1; ++j)
      for (std::size_t i = j * spec.h1 + 2; i < (j + 1) * spec.h1; ++i) REQUIRE(r.labels[i] == r.labels[i - 1]);
  }
  SECTION("fixed duration") {
    spec.mode = SwitchMode::FixedDuration;
    spec.entries = {350};
    spec.duration = 1000;
    auto r = simulate_regime_switching(spec);
    REQUIRE(r.tau == std::vector<std::size_t>{350});
    REQUIRE(r.labels[350] == 0);
    REQUIRE(r.labels[351] == 1);
    REQUIRE(r.labels.back() == 1);
  }
  SECTION("bad horizon") {
    spec.h1 = 800;
    REQUIRE_THROWS_AS(simulate_regime_switching(spec), Error);
  }
}

TEST_CASE("sub-path labels") {
  std::vector<int> l{0, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0};
  // windows of 4: internal obs 1..3, 5..7, 9..11
  REQUIRE(subpath_labels(l, 4) == std::vector<int>{0, 1, 0});
}
