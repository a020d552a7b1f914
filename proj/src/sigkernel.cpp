#include "sigregime/sigkernel.hpp"

#include <cmath>

#include "sigregime/error.hpp"
#include "sigregime/parallel.hpp"

namespace sigregime {

void KernelSpec::validate() const {
  require(rank == 1 || rank == 2, ErrorKind::Config, "kernel rank must be 1 or 2");
  require(sigma1 > 0 && std::isfinite(sigma1), ErrorKind::Config, "sigma1 must be > 0");
  require(sigma2 > 0 && std::isfinite(sigma2), ErrorKind::Config, "sigma2 must be > 0");
  require(dyadic_order >= 0 && dyadic_order <= 12, ErrorKind::Config, "dyadic order out of range");
  require(inner_order >= 1, ErrorKind::Config, "inner order must be >= 1");
  require(truncation >= 1, ErrorKind::Config, "truncation order must be >= 1");
  require(!(truncated && rank == 2), ErrorKind::Config, "truncated mode is rank 1 only");
}

std::string lift_name(StaticLift l) { return l == StaticLift::Linear ? "linear" : "rbf"; }

StaticLift parse_lift(const std::string& s) {
  if (s == "linear") return StaticLift::Linear;
  if (s == "rbf") return StaticLift::Rbf;
  fail(ErrorKind::Config, "unknown static kernel '" + s + "'");
}

void static_increments(const Knots& x, const Knots& y, StaticLift lift, double sigma,
                       std::vector<double>& out) {
  require(x.p == y.p, ErrorKind::Shape, "paths differ in channel count");
  const std::size_t m = x.n - 1, n = y.n - 1, p = x.p;
  out.resize(m * n);
  if (lift == StaticLift::Linear) {
    const double w = 1.0 / (sigma * sigma);
    thread_local std::vector<double> dx, dy;
    dx.resize(m * p);
    dy.resize(n * p);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t c = 0; c < p; ++c) dx[i * p + c] = x.row(i + 1)[c] - x.row(i)[c];
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t c = 0; c < p; ++c) dy[j * p + c] = y.row(j + 1)[c] - y.row(j)[c];
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < p; ++c) s += dx[i * p + c] * dy[j * p + c];
        out[i * n + j] = s * w;
      }
    return;
  }
  const double g = -0.5 / (sigma * sigma);
  thread_local std::vector<double> kv;
  kv.resize(x.n * y.n);
  for (std::size_t i = 0; i < x.n; ++i) {
    const double* a = x.row(i);
    for (std::size_t j = 0; j < y.n; ++j) {
      const double* b = y.row(j);
      double s = 0.0;
      for (std::size_t c = 0; c < p; ++c) {
        double t = a[c] - b[c];
        s += t * t;
      }
      kv[i * y.n + j] = std::exp(g * s);
    }
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out[i * n + j] = kv[(i + 1) * y.n + j + 1] - kv[(i + 1) * y.n + j] - kv[i * y.n + j + 1] +
                       kv[i * y.n + j];
}

double goursat_from_increments(const std::vector<double>& inc, std::size_t m, std::size_t n,
                               int dyadic_order) {
  const std::size_t r = std::size_t{1} << dyadic_order;
  const double cell = 1.0 / static_cast<double>(r * r);
  const std::size_t cols = n * r + 1;
  thread_local std::vector<double> prev, cur, ca, cb;
  prev.assign(cols, 1.0);
  cur.assign(cols, 1.0);
  ca.resize(n);
  cb.resize(n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double d = inc[i * n + j] * cell;
      ca[j] = 1.0 + 0.5 * d + d * d / 12.0;
      cb[j] = 1.0 - d * d / 12.0;
    }
    for (std::size_t ii = 0; ii < r; ++ii) {
      cur[0] = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double a = ca[j], b = cb[j];
        const std::size_t base = j * r;
        for (std::size_t jj = 0; jj < r; ++jj) {
          std::size_t c = base + jj;
          cur[c + 1] = (cur[c] + prev[c + 1]) * a - prev[c] * b;
        }
      }
      prev.swap(cur);
    }
  }
  double v = prev[cols - 1];
  require(std::isfinite(v), ErrorKind::Numeric, "non-finite signature kernel value");
  return v;
}

double truncated_from_increments(const std::vector<double>& inc, std::size_t m, std::size_t n,
                                 std::size_t order) {
  // State F[i][j][r][s]: weighted sum over pairs of nondecreasing index words
  // of the current length ending at segment (i, j), where the last letter has
  // been repeated r (resp. s) times. A run of length q carries weight 1/q!.
  const std::size_t q = order + 1;  // run lengths 1..order, slot 0 unused
  auto idx = [&](std::size_t i, std::size_t j, std::size_t a, std::size_t b) {
    return ((i * n + j) * q + a) * q + b;
  };
  std::vector<double> f(m * n * q * q, 0.0), g(f.size());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) f[idx(i, j, 1, 1)] = inc[i * n + j];
  double total = 1.0;
  for (std::size_t i = 0; i < m * n; ++i) total += inc[i];
  // row/column partial sums
  std::vector<double> rowsum(m * n * q), colsum(m * n * q), all(m * n);
  std::vector<double> pre((m + 1) * (n + 1));
  for (std::size_t len = 1; len < order; ++len) {
    std::fill(g.begin(), g.end(), 0.0);
    // rowsum[i][j][a] = sum_b F[i][j][a][b]; colsum[i][j][b] = sum_a F[i][j][a][b]
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double tot = 0.0;
        for (std::size_t a = 1; a <= len; ++a) {
          double rs = 0.0;
          for (std::size_t b = 1; b <= len; ++b) rs += f[idx(i, j, a, b)];
          rowsum[(i * n + j) * q + a] = rs;
          tot += rs;
        }
        for (std::size_t b = 1; b <= len; ++b) {
          double cs = 0.0;
          for (std::size_t a = 1; a <= len; ++a) cs += f[idx(i, j, a, b)];
          colsum[(i * n + j) * q + b] = cs;
        }
        all[i * n + j] = tot;
      }
    // 2-D exclusive prefix of totals: pre[i][j] = sum_{i'<i, j'<j} all
    for (std::size_t i = 0; i <= m; ++i)
      for (std::size_t j = 0; j <= n; ++j) {
        if (i == 0 || j == 0) {
          pre[i * (n + 1) + j] = 0.0;
          continue;
        }
        pre[i * (n + 1) + j] = all[(i - 1) * n + (j - 1)] + pre[(i - 1) * (n + 1) + j] +
                               pre[i * (n + 1) + j - 1] - pre[(i - 1) * (n + 1) + j - 1];
      }
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double d = inc[i * n + j];
        // repeat both letters
        for (std::size_t a = 1; a <= len; ++a)
          for (std::size_t b = 1; b <= len; ++b)
            g[idx(i, j, a + 1, b + 1)] += f[idx(i, j, a, b)] * d / double((a + 1) * (b + 1));
        // repeat i, new j: sum over j' < j of rowsum[i][j'][a]
        for (std::size_t a = 1; a <= len; ++a) {
          double s = 0.0;
          for (std::size_t jp = 0; jp < j; ++jp) s += rowsum[(i * n + jp) * q + a];
          g[idx(i, j, a + 1, 1)] += s * d / double(a + 1);
        }
        // new i, repeat j
        for (std::size_t b = 1; b <= len; ++b) {
          double s = 0.0;
          for (std::size_t ip = 0; ip < i; ++ip) s += colsum[(ip * n + j) * q + b];
          g[idx(i, j, 1, b + 1)] += s * d / double(b + 1);
        }
        g[idx(i, j, 1, 1)] += pre[i * (n + 1) + j] * d;
      }
    f.swap(g);
    double lvl = 0.0;
    for (double v : f) lvl += v;
    total += lvl;
  }
  require(std::isfinite(total), ErrorKind::Numeric, "non-finite truncated kernel value");
  return total;
}

SignatureKernel::SignatureKernel(KernelSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

PreparedPath SignatureKernel::prepare(const Stream& s) const {
  PreparedPath out;
  if (spec_.rank == 2) {
    std::size_t p = s.dim() + (spec_.include_time ? 1 : 0);
    require(tensor_size(p, spec_.inner_order) <= spec_.capacity, ErrorKind::Capacity,
            "rank-2 inner signature exceeds capacity");
    out.knots = signature_lift_knots(knots_of(s, spec_.include_time, spec_.sigma1), spec_.inner_order);
    if (spec_.lift == StaticLift::Linear)
      for (double& v : out.knots.x) v /= spec_.sigma2;
    return out;
  }
  const double scale = spec_.lift == StaticLift::Linear ? spec_.sigma1 : 1.0;
  out.knots = knots_of(s, spec_.include_time, scale);
  if (spec_.truncated && spec_.lift == StaticLift::Linear) {
    require(tensor_size(out.knots.p, spec_.truncation) <= spec_.capacity, ErrorKind::Capacity,
            "truncated signature of dimension " + std::to_string(out.knots.p) + " at order " +
                std::to_string(spec_.truncation) + " exceeds capacity");
    out.sig = signature_of_knots(out.knots, spec_.truncation);
    out.explicit_sig = true;
  }
  return out;
}

std::vector<PreparedPath> SignatureKernel::prepare_all(const std::vector<Stream>& paths) const {
  std::vector<PreparedPath> out(paths.size());
  parallel_for(paths.size(), [&](std::size_t i) { out[i] = prepare(paths[i]); });
  return out;
}

double SignatureKernel::operator()(const PreparedPath& x, const PreparedPath& y) const {
  if (x.explicit_sig && y.explicit_sig) return x.sig.dot(y.sig);
  thread_local std::vector<double> inc;
  const std::size_t m = x.knots.n - 1, n = y.knots.n - 1;
  if (spec_.rank == 2) {
    // linear outer lift was folded into prepare()
    static_increments(x.knots, y.knots, spec_.lift, spec_.lift == StaticLift::Rbf ? spec_.sigma2 : 1.0, inc);
    return goursat_from_increments(inc, m, n, spec_.dyadic_order);
  }
  static_increments(x.knots, y.knots, spec_.lift, spec_.lift == StaticLift::Rbf ? spec_.sigma1 : 1.0, inc);
  if (spec_.truncated) return truncated_from_increments(inc, m, n, spec_.truncation);
  return goursat_from_increments(inc, m, n, spec_.dyadic_order);
}

double SignatureKernel::operator()(const Stream& x, const Stream& y) const {
  return (*this)(prepare(x), prepare(y));
}

PathRefs refs_of(const std::vector<PreparedPath>& v) {
  PathRefs out;
  out.reserve(v.size());
  for (const auto& p : v) out.push_back(&p);
  return out;
}

Eigen::MatrixXd gram(const SignatureKernel& k, const PathRefs& xs, const PathRefs& ys) {
  require(!xs.empty() && !ys.empty(), ErrorKind::Argument, "gram needs nonempty path lists");
  Eigen::MatrixXd g(xs.size(), ys.size());
  parallel_for(xs.size() * ys.size(), [&](std::size_t t) {
    std::size_t i = t / ys.size(), j = t % ys.size();
    try {
      g(i, j) = k(*xs[i], *ys[j]);
    } catch (const Error& e) {
      fail(e.kind(), std::string(e.what()) + " at entry (" + std::to_string(i) + ", " +
                         std::to_string(j) + ")");
    }
  });
  return g;
}

Eigen::MatrixXd gram_symmetric(const SignatureKernel& k, const PathRefs& xs) {
  require(!xs.empty(), ErrorKind::Argument, "gram needs a nonempty path list");
  const std::size_t n = xs.size();
  Eigen::MatrixXd g(n, n);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i; j < n; ++j) g(i, j) = k(*xs[i], *xs[j]);
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

Eigen::MatrixXd gram(const std::vector<Stream>& xs, const std::vector<Stream>& ys,
                     const KernelSpec& spec) {
  SignatureKernel k(spec);
  auto px = k.prepare_all(xs);
  auto py = k.prepare_all(ys);
  return gram(k, refs_of(px), refs_of(py));
}

double solve_goursat(const Stream& x, const Stream& y, const KernelSpec& spec) {
  require(spec.rank == 1, ErrorKind::Argument, "solve_goursat is rank 1");
  KernelSpec s = spec;
  s.truncated = false;
  return SignatureKernel(s)(x, y);
}

double sig_kernel(const Stream& x, const Stream& y, const KernelSpec& spec) {
  return SignatureKernel(spec)(x, y);
}

double truncated_kernel(const Stream& x, const Stream& y, std::size_t order, const KernelSpec& spec) {
  KernelSpec s = spec;
  s.rank = 1;
  s.truncated = true;
  s.truncation = order;
  return SignatureKernel(s)(x, y);
}

double rank2_kernel(const Stream& x, const Stream& y, const KernelSpec& spec) {
  KernelSpec s = spec;
  s.rank = 2;
  s.truncated = false;
  return SignatureKernel(s)(x, y);
}

}  // namespace sigregime
