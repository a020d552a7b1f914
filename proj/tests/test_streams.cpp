#include <catch_amalgamated.hpp>

#include "helpers.hpp"
#include "sigregime/error.hpp"
#include "sigregime/streams.hpp"

using namespace sigregime;
using Catch::Approx;

namespace {
Stream make(std::vector<double> t, std::vector<double> v, std::size_t d) { return Stream(t, v, d); }
}  // namespace

TEST_CASE("stream construction validates input") {
  REQUIRE_THROWS_AS(make({0.0}, {1.0}, 1), Error);
  REQUIRE_THROWS_AS(make({0.0, 0.0}, {1.0, 2.0}, 1), Error);
  REQUIRE_THROWS_AS(make({0.0, 1.0}, {1.0}, 1), Error);
  REQUIRE_THROWS_AS(make({0.0, 1.0}, {1.0, std::nan("")}, 1), Error);
}

TEST_CASE("linear interpolation embedding") {
  auto s = make({0, 1}, {0, 2}, 1);
  REQUIRE(embed_linear(s, 0.5)[0] == Approx(1.0));
  auto s2 = make({0, 1, 2}, {0, 1, 0}, 1);
  REQUIRE(embed_linear(s2, 1.5)[0] == Approx(0.5));
  std::mt19937_64 g(3);
  auto r = testing_util::random_stream(g, 9, 3);
  for (std::size_t i = 0; i < r.size(); ++i) {
    auto v = embed_linear(r, r.time(i));
    for (std::size_t c = 0; c < 3; ++c) REQUIRE(v[c] == r.at(i, c));
  }
  try {
    embed_linear(s, 1.5);
    FAIL("expected range error");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::Range);
  }
}

TEST_CASE("one-variation equals the sum of segment lengths") {
  auto s = make({0, 1, 2}, {0, 0, 3, 4, 3, 4}, 2);
  REQUIRE(one_variation(s) == Approx(5.0));
}

TEST_CASE("state normalisation and increments") {
  std::mt19937_64 g(1);
  auto s = testing_util::positive_stream(g, 12, 3);
  auto n = apply_transform(Transform::state_norm(), s);
  for (std::size_t c = 0; c < 3; ++c) REQUIRE(n.at(0, c) == 1.0);
  REQUIRE(n.size() == s.size());
  REQUIRE(n.dim() == s.dim());

  auto mono = make({0, 1, 2, 3}, {1, 2, 1.5, 2.5, 2, 3, 4, 2.5}, 2);
  auto wrong = make({0, 1, 2, 3}, {1, 2, 1.5, 2.5, 2, 3, 4, 7}, 2);
  auto inc = apply_transform(Transform::increment(), wrong);
  REQUIRE(inc.values() == wrong.values());
  auto inc2 = apply_transform(Transform::increment(), mono);
  // |2.5 - 3| added instead of -0.5
  REQUIRE(inc2.at(3, 1) == Approx(3.5));

  auto z = make({0, 1}, {0, 1, 1, 1}, 2);
  try {
    apply_transform(Transform::state_norm(), z);
    FAIL("expected domain error");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::Domain);
  }
}

TEST_CASE("lead-lag rule and shape law") {
  auto s = make({0, 1}, {1, 2}, 1);
  auto ll = apply_transform(Transform::lead_lag(), s);
  REQUIRE(ll.size() == 3);
  REQUIRE(ll.dim() == 2);
  std::vector<double> expect{1, 1, 1, 2, 2, 2};
  REQUIRE(ll.values() == expect);
  std::mt19937_64 g(2);
  auto r = testing_util::random_stream(g, 10, 3);
  auto l2 = apply_transform(Transform::lead_lag(), r);
  REQUIRE(l2.size() == 19);
  REQUIRE(l2.dim() == 6);
}

TEST_CASE("scale transform") {
  auto s = make({0, 1}, {1, 2, 3, 4}, 2);
  auto a = apply_transform(Transform::scale({2.0}), s);
  REQUIRE(a.values() == std::vector<double>{2, 4, 6, 8});
  auto b = apply_transform(Transform::scale({1.0, 10.0}), s);
  REQUIRE(b.values() == std::vector<double>{1, 20, 3, 40});
  try {
    apply_transform(Transform::scale({1.0, 2.0, 3.0}), s);
    FAIL("expected shape error");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::Shape);
  }
}

TEST_CASE("composition order and identities") {
  std::mt19937_64 g(7);
  auto s = testing_util::positive_stream(g, 15, 2);
  auto id = compose({});
  REQUIRE(id(s).values() == s.values());
  REQUIRE(id(s).times() == s.times());

  auto t1 = compose({Transform::time_norm()});
  auto t2 = compose({Transform::time_norm(), Transform::time_norm()});
  REQUIRE(t1(s).times() == t2(s).times());
  REQUIRE(t1(s).time(0) == 0.0);
  REQUIRE(t1(s).time(s.size() - 1) == 1.0);

  auto a = compose({Transform::state_norm(), Transform::time_norm()})(s);
  auto b = compose({Transform::time_norm(), Transform::state_norm()})(s);
  REQUIRE(a.values() == b.values());
  REQUIRE(a.times() == b.times());

  // listed order applies right to left: scale then increment differs from
  // increment then scale only by where the scale acts; lead-lag then a
  // 2-vector scale on a 1-D stream is fine, the reverse is not
  auto one = make({0, 1, 2}, {1, 2, 3}, 1);
  REQUIRE(compose({Transform::scale({1.0, 2.0}), Transform::lead_lag()}, 1).output_dim(1) == 2);
  REQUIRE_THROWS_AS(compose({Transform::lead_lag(), Transform::scale({1.0, 2.0})}, 1), Error);
  auto phi = compose({Transform::increment(), Transform::scale({-1.0})});
  // scale first: values -1,-2,-3 -> increments 1 each -> -1, 0, 1
  REQUIRE(phi(one).values() == std::vector<double>{-1, 0, 1});
}

TEST_CASE("sub-path extraction") {
  auto mk = [](std::size_t n) {
    std::vector<double> t(n), v(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = v[i] = static_cast<double>(i);
    return Stream(t, v, 1);
  };
  auto sp = extract_subpaths(mk(21), 7);
  REQUIRE(sp.size() == 3);
  REQUIRE(sp.paths[2].at(0, 0) == 14.0);
  auto sp2 = extract_subpaths(mk(22), 7);
  REQUIRE(sp2.size() == 3);
  REQUIRE(sp2.paths[2].at(6, 0) == 20.0);
  auto sp3 = extract_subpaths(mk(7), 7);
  REQUIRE(sp3.size() == 1);
  REQUIRE(sp3.paths[0].values() == mk(7).values());
  REQUIRE_THROWS_AS(extract_subpaths(mk(7), 1), Error);
  REQUIRE_THROWS_AS(extract_subpaths(mk(5), 7), Error);

  // concatenation reproduces a prefix of the parent
  auto parent = mk(47);
  auto s4 = extract_subpaths(parent, 5);
  std::vector<double> cat;
  for (const auto& p : s4.paths) cat.insert(cat.end(), p.values().begin(), p.values().end());
  REQUIRE(std::equal(cat.begin(), cat.end(), parent.values().begin()));
  REQUIRE(cat.size() == 45);
}

TEST_CASE("ensemble extraction") {
  auto mk = [](std::size_t n) {
    std::vector<double> t(n), v(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = v[i] = static_cast<double>(i);
    return Stream(t, v, 1);
  };
  auto sp = extract_subpaths(mk(13 * 4), 4);
  auto es = extract_ensembles(sp, 10);
  REQUIRE(es.count == 3);
  auto sp3 = extract_subpaths(mk(6), 2);
  REQUIRE(extract_ensembles(sp3, 2).count == 1);
  REQUIRE_THROWS_AS(extract_ensembles(sp3, 3), Error);

  auto big = extract_subpaths(mk(40 * 3), 3);
  auto e = extract_ensembles(big, 6);
  std::vector<std::size_t> counts(big.size(), 0);
  for (std::size_t k = 0; k < e.count; ++k)
    for (auto* m : e.members(k)) counts[static_cast<std::size_t>(m - big.paths.data())]++;
  for (std::size_t i = 0; i < big.size(); ++i) {
    REQUIRE(counts[i] == e.coverage(i));
    if (i >= e.h2 - 1 && i <= e.count - 1) REQUIRE(counts[i] == e.h2);
  }
  // consecutive ensembles share h2-1 members
  auto a = e.members(4), b = e.members(5);
  REQUIRE(std::equal(a.begin() + 1, a.end(), b.begin()));
}
