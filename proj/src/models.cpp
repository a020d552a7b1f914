#include "sigregime/models.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_hyperg.h>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>

#include "sigregime/error.hpp"
#include "sigregime/parallel.hpp"
#include "sigregime/rng.hpp"

namespace sigregime {

namespace {

// RNG sub-streams per asset
constexpr std::uint64_t kDiffusion = 0, kJump = 1, kOrthogonal = 2, kVolterra = 3;

std::uint64_t sub(std::size_t asset, std::uint64_t kind) { return asset * 8 + kind; }

std::vector<double> mesh_times(const Mesh& mesh) {
  require(mesh.dt > 0 && std::isfinite(mesh.dt), ErrorKind::Argument, "mesh step must be > 0");
  require(mesh.n_obs >= 2, ErrorKind::Argument, "mesh needs at least 2 observations");
  std::vector<double> t(mesh.n_obs);
  for (std::size_t i = 0; i < mesh.n_obs; ++i) t[i] = mesh.t0 + static_cast<double>(i) * mesh.dt;
  return t;
}

}  // namespace

Family parse_family(const std::string& s) {
  if (s == "gbm") return Family::Gbm;
  if (s == "merton") return Family::Merton;
  if (s == "rbergomi") return Family::RBergomi;
  fail(ErrorKind::Config, "unknown model family '" + s + "'");
}

std::string family_name(Family f) {
  switch (f) {
    case Family::Gbm: return "gbm";
    case Family::Merton: return "merton";
    case Family::RBergomi: return "rbergomi";
  }
  return "?";
}

void ModelPair::validate() const {
  require(dim >= 1, ErrorKind::Config, "model dimension must be >= 1");
  for (double v : theta) require(std::isfinite(v), ErrorKind::Config, "non-finite model parameter");
  switch (family) {
    case Family::Gbm:
      require(theta.size() == 2, ErrorKind::Config, "gbm needs (mu, sigma)");
      require(theta[1] >= 0, ErrorKind::Config, "gbm sigma must be >= 0");
      break;
    case Family::Merton:
      require(theta.size() == 5, ErrorKind::Config, "merton needs (mu, sigma, lambda, gamma, delta)");
      require(theta[1] >= 0 && theta[2] >= 0 && theta[4] >= 0, ErrorKind::Config,
              "merton sigma, lambda, delta must be >= 0");
      break;
    case Family::RBergomi:
      require(theta.size() == 4, ErrorKind::Config, "rbergomi needs (xi0, eta, rho, H)");
      require(theta[0] > 0, ErrorKind::Config, "rbergomi xi0 must be > 0");
      require(theta[2] >= -1 && theta[2] <= 1, ErrorKind::Config, "rbergomi rho must be in [-1, 1]");
      require(theta[3] > 0 && theta[3] < 1, ErrorKind::Config, "rbergomi H must be in (0, 1)");
      break;
  }
}

std::string ModelPair::describe() const {
  std::ostringstream os;
  os << family_name(family) << "(";
  for (std::size_t i = 0; i < theta.size(); ++i) os << (i ? "," : "") << theta[i];
  os << ")";
  return os.str();
}

std::vector<Stream> simulate_gbm(double mu, double sigma, std::size_t d, const Mesh& mesh,
                                 std::size_t n_paths, double x0, std::uint64_t seed) {
  MertonParams p;
  p.mu = mu;
  p.sigma = sigma;
  return simulate_merton(p, d, mesh, n_paths, x0, seed);
}

std::vector<Stream> simulate_merton(const MertonParams& p, std::size_t d, const Mesh& mesh,
                                    std::size_t n_paths, double x0, std::uint64_t seed) {
  require(x0 > 0, ErrorKind::Argument, "initial value must be > 0");
  require(p.sigma >= 0 && p.lambda >= 0 && p.delta >= 0, ErrorKind::Argument, "invalid jump-diffusion parameters");
  auto times = mesh_times(mesh);
  const double dt = mesh.dt;
  const double drift = (p.mu - 0.5 * p.sigma * p.sigma) * dt;
  const double vol = p.sigma * std::sqrt(dt);
  std::vector<Stream> out(n_paths);
  parallel_for(n_paths, [&](std::size_t path) {
    std::vector<double> v(mesh.n_obs * d);
    for (std::size_t c = 0; c < d; ++c) {
      CounterRng diff(seed, path, sub(c, kDiffusion));
      CounterRng jump(seed, path, sub(c, kJump));
      std::poisson_distribution<int> count(p.lambda > 0 ? p.lambda * dt : 1.0);
      double x = x0;
      v[c] = x;
      for (std::size_t i = 1; i < mesh.n_obs; ++i) {
        double z = normal(diff);
        double step = std::exp(drift + vol * z);
        if (p.lambda > 0) {
          int nj = count(jump);
          for (int j = 0; j < nj; ++j) step *= std::exp(p.gamma + p.delta * normal(jump));
        }
        x *= step;
        v[i * d + c] = x;
      }
    }
    out[path] = Stream(times, std::move(v), d);
  });
  return out;
}

double volterra_covariance(double s, double t, double hurst) {
  if (s > t) std::swap(s, t);
  if (s <= 0) return 0.0;
  const double a = hurst - 0.5;
  if (s == t) return std::pow(s, 2 * hurst);
  // 2H s^(a+1) t^a / (a+1) 2F1(-a, 1; a+2; s/t)
  gsl_sf_result r;
  int status = gsl_sf_hyperg_2F1_e(-a, 1.0, a + 2.0, s / t, &r);
  require(status == GSL_SUCCESS && std::isfinite(r.val), ErrorKind::Numeric,
          "hypergeometric evaluation failed in Volterra covariance");
  return 2 * hurst * std::pow(s, a + 1) * std::pow(t, a) / (a + 1) * r.val;
}

namespace {

// Y on t_1..t_n given Brownian increments dB_1..dB_n is Gaussian with mean
// (1/dt) G dB, G lower-triangular Toeplitz, and covariance C - G G^T / dt.
struct VolterraFactor {
  std::size_t n = 0;
  std::vector<double> g;  // g[lag] = Cov(Y_{t_i}, dB_{i-lag})
  Eigen::MatrixXd chol;   // lower Cholesky factor of the conditional covariance
};

std::shared_ptr<const VolterraFactor> build_factor(double hurst, double dt, std::size_t n) {
  auto f = std::make_shared<VolterraFactor>();
  f->n = n;
  const double h5 = hurst + 0.5;
  f->g.resize(n);
  const double c = std::sqrt(2 * hurst) / h5 * std::pow(dt, h5);
  for (std::size_t j = 0; j < n; ++j)
    f->g[j] = c * (std::pow(static_cast<double>(j + 1), h5) - std::pow(static_cast<double>(j), h5));
  Eigen::MatrixXd cov(n, n);
  gsl_set_error_handler_off();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l <= i; ++l) {
      double v = volterra_covariance(static_cast<double>(l + 1) * dt, static_cast<double>(i + 1) * dt, hurst);
      // subtract (G G^T)_{il} / dt, sum over k <= l
      double gg = 0.0;
      for (std::size_t k = 0; k <= l; ++k) gg += f->g[i - k] * f->g[l - k];
      cov(i, l) = v - gg / dt;
    }
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale += cov(i, i);
  scale /= static_cast<double>(n);
  for (double jitter : {0.0, 1e-12, 1e-10, 1e-8}) {
    Eigen::MatrixXd m = cov;
    for (std::size_t i = 0; i < n; ++i) m(i, i) += jitter * scale;
    Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(m);
    if (llt.info() == Eigen::Success) {
      f->chol = llt.matrixL();
      return f;
    }
  }
  fail(ErrorKind::Numeric, "Cholesky of the Volterra covariance failed (n=" + std::to_string(n) +
                               "); increase jitter or shorten the grid");
}

// One factor serves every grid length up to its own: leading blocks of a
// Cholesky factor are the factors of the leading blocks.
std::shared_ptr<const VolterraFactor> volterra_factor(double hurst, double dt, std::size_t n) {
  static std::mutex mu;
  static std::map<std::pair<double, double>, std::shared_ptr<const VolterraFactor>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{hurst, dt}];
  if (!slot || slot->n < n) slot = build_factor(hurst, dt, n);
  return slot;
}

}  // namespace

RBergomiPaths simulate_rbergomi(const RBergomiParams& p, std::size_t d, const Mesh& mesh,
                                std::size_t n_paths, std::uint64_t seed, double x0,
                                const std::vector<double>& xi0_per_asset) {
  require(xi0_per_asset.empty() || xi0_per_asset.size() == d, ErrorKind::Shape,
          "one forward variance per asset expected");
  require(p.hurst > 0 && p.hurst < 1, ErrorKind::Argument, "H must be in (0, 1)");
  require(p.xi0 > 0, ErrorKind::Argument, "xi0 must be > 0");
  require(p.rho >= -1 && p.rho <= 1, ErrorKind::Argument, "rho must be in [-1, 1]");
  auto times = mesh_times(mesh);
  const std::size_t n = mesh.n_obs - 1;
  const double dt = mesh.dt;
  auto factor = volterra_factor(p.hurst, dt, n);
  const double rho_perp = std::sqrt(std::max(0.0, 1.0 - p.rho * p.rho));
  RBergomiPaths out;
  out.price.resize(n_paths);
  out.variance.resize(n_paths);
  out.volterra.resize(n_paths);
  parallel_for(n_paths, [&](std::size_t path) {
    std::vector<double> px(mesh.n_obs * d), vv(mesh.n_obs * d), yy(mesh.n_obs * d);
    Eigen::VectorXd db(n), z(n), y(n);
    for (std::size_t c = 0; c < d; ++c) {
      CounterRng rb(seed, path, sub(c, kDiffusion));
      CounterRng rp(seed, path, sub(c, kOrthogonal));
      CounterRng rz(seed, path, sub(c, kVolterra));
      const double sdt = std::sqrt(dt);
      for (std::size_t i = 0; i < n; ++i) db[i] = sdt * normal(rb);
      for (std::size_t i = 0; i < n; ++i) z[i] = normal(rz);
      y = factor->chol.topLeftCorner(n, n).triangularView<Eigen::Lower>() * z;
      for (std::size_t i = 0; i < n; ++i) {
        double m = 0.0;
        for (std::size_t k = 0; k <= i; ++k) m += factor->g[i - k] * db[k];
        y[i] += m / dt;
      }
      const double xi0 = xi0_per_asset.empty() ? p.xi0 : xi0_per_asset[c];
      double x = x0;
      double v = xi0;
      px[c] = x;
      vv[c] = v;
      yy[c] = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double dw = p.rho * db[i] + rho_perp * sdt * normal(rp);
        x *= std::exp(-0.5 * v * dt + std::sqrt(v) * dw);
        double t = static_cast<double>(i + 1) * dt;
        v = xi0 * std::exp(p.eta * y[i] - 0.5 * p.eta * p.eta * std::pow(t, 2 * p.hurst));
        px[(i + 1) * d + c] = x;
        vv[(i + 1) * d + c] = v;
        yy[(i + 1) * d + c] = y[i];
      }
    }
    out.price[path] = Stream(times, std::move(px), d);
    out.variance[path] = Stream(times, std::move(vv), d);
    out.volterra[path] = Stream(times, std::move(yy), d);
  });
  return out;
}

std::vector<Stream> simulate(const ModelPair& m, const Mesh& mesh, std::size_t n_paths,
                             std::uint64_t seed, const std::vector<double>* start) {
  m.validate();
  const std::size_t d = m.dim;
  if (start) require(start->size() == m.channels(), ErrorKind::Shape, "start state has wrong size");
  // per-asset initial prices; simulate with x0 = 1 and rescale
  std::vector<Stream> prices;
  std::vector<Stream> vars;
  switch (m.family) {
    case Family::Gbm:
      prices = simulate_gbm(m.theta[0], m.theta[1], d, mesh, n_paths, 1.0, seed);
      break;
    case Family::Merton:
      prices = simulate_merton({m.theta[0], m.theta[1], m.theta[2], m.theta[3], m.theta[4]}, d, mesh,
                               n_paths, 1.0, seed);
      break;
    case Family::RBergomi: {
      RBergomiParams p{m.theta[0], m.theta[1], m.theta[2], m.theta[3]};
      std::vector<double> xi0s;
      if (start && m.emit_vol)
        for (std::size_t c = 0; c < d; ++c) xi0s.push_back(std::max((*start)[d + c], 1e-12));
      auto r = simulate_rbergomi(p, d, mesh, n_paths, seed, 1.0, xi0s);
      prices = std::move(r.price);
      vars = std::move(r.variance);
      break;
    }
  }
  std::vector<Stream> out(n_paths);
  const std::size_t ch = m.channels();
  for (std::size_t k = 0; k < n_paths; ++k) {
    std::vector<double> v(mesh.n_obs * ch);
    for (std::size_t i = 0; i < mesh.n_obs; ++i) {
      for (std::size_t c = 0; c < d; ++c) {
        double s0 = start ? (*start)[c] : 1.0;
        v[i * ch + c] = s0 * prices[k].at(i, c);
      }
      if (m.emit_vol)
        for (std::size_t c = 0; c < d; ++c)
          v[i * ch + d + c] = m.family == Family::RBergomi ? vars[k].at(i, c) : m.theta[1] * m.theta[1];
    }
    out[k] = Stream(prices[k].times(), std::move(v), ch);
  }
  return out;
}

RegimePath simulate_regime_switching(const RegimeSwitchSpec& spec) {
  require(!spec.models.empty(), ErrorKind::Argument, "regime switching needs at least one model");
  for (const auto& m : spec.models) m.validate();
  const std::size_t ch = spec.models[0].channels();
  for (const auto& m : spec.models)
    require(m.channels() == ch, ErrorKind::Argument, "models emit different channel counts");
  require(spec.dt > 0 && spec.horizon > 0, ErrorKind::Argument, "horizon and step must be > 0");
  const std::size_t n_obs = static_cast<std::size_t>(std::llround(spec.horizon / spec.dt)) + 1;
  require(spec.h1 >= 2 && spec.h1 < n_obs - 1, ErrorKind::Argument, "h1 must be in [2, horizon)");
  require(spec.lambda1 >= 0 && spec.lambda2 >= 0, ErrorKind::Argument, "intensities must be >= 0");

  // schedule of switch indices
  std::vector<std::size_t> tau;
  CounterRng rng(spec.seed, 0, 0x73776974);
  const std::size_t h1 = spec.h1;
  if (spec.mode == SwitchMode::Poisson) {
    auto draw = [&](double lam) {
      if (lam <= 0) return 0;
      std::poisson_distribution<int> po(lam);
      return po(rng);
    };
    bool change = false;
    std::size_t k = h1;
    while (k < n_obs - 1) {
      if (!change) {
        if (draw(spec.lambda1) > 0) {
          tau.push_back(k);
          change = true;
        }
        k += h1;
      } else {
        if (draw(spec.lambda2) > 0) {
          std::size_t exit = k + h1 + (spec.lattice_aligned ? 0 : 1);
          if (exit >= n_obs - 1) break;
          tau.push_back(exit);
          change = false;
          k += 2 * h1;
        } else {
          k += h1;
        }
      }
    }
  } else {
    require(spec.duration >= 1, ErrorKind::Argument, "fixed-duration mode needs duration >= 1");
    std::vector<std::size_t> entries = spec.entries;
    if (entries.empty()) {
      // non-overlapping uniformly drawn lattice entry points
      std::size_t slots = (n_obs - 1) / h1;
      std::size_t span = (spec.duration + h1 - 1) / h1 + 1;
      for (int attempt = 0; attempt < 1000 && entries.size() < spec.n_changes; ++attempt) {
        std::size_t e = (1 + rng() % (slots - 1)) * h1;
        bool ok = e + spec.duration < n_obs;
        for (std::size_t o : entries)
          if ((e > o ? e - o : o - e) < span * h1) ok = false;
        if (ok) entries.push_back(e);
      }
      std::sort(entries.begin(), entries.end());
    }
    for (std::size_t e : entries) {
      require(e % h1 == 0 && e > 0 && e < n_obs - 1, ErrorKind::Argument, "entry index off the h1 lattice");
      require(tau.empty() || e > tau.back(), ErrorKind::Argument, "overlapping changes");
      tau.push_back(e);
      if (e + spec.duration < n_obs - 1) tau.push_back(e + spec.duration);
    }
  }

  RegimePath out;
  out.tau = tau;
  out.labels.assign(n_obs, 0);
  out.model_index.assign(n_obs, 0);
  std::vector<double> times(n_obs), vals(n_obs * ch);
  for (std::size_t i = 0; i < n_obs; ++i) times[i] = static_cast<double>(i) * spec.dt;
  std::vector<double> state(ch, spec.x0);
  const auto& m0 = spec.models[0];
  if (m0.emit_vol)
    for (std::size_t c = 0; c < m0.dim; ++c)
      state[m0.dim + c] = m0.family == Family::RBergomi ? m0.theta[0] : m0.theta[1] * m0.theta[1];
  for (std::size_t c = 0; c < ch; ++c) vals[c] = state[c];

  std::size_t seg_start = 0;
  for (std::size_t s = 0; s <= tau.size(); ++s) {
    std::size_t seg_end = s < tau.size() ? tau[s] : n_obs - 1;
    const std::size_t mi = s % spec.models.size();
    const auto& model = spec.models[mi];
    Mesh mesh{spec.dt, seg_end - seg_start + 1, times[seg_start]};
    // prices continue from the previous value; rBergomi restarts its own
    // forward variance
    std::vector<double> start(ch);
    for (std::size_t c = 0; c < ch; ++c) start[c] = vals[seg_start * ch + c];
    if (model.emit_vol && model.family == Family::RBergomi)
      for (std::size_t c = 0; c < model.dim; ++c) start[model.dim + c] = model.theta[0];
    auto seg = simulate(model, mesh, 1, derive_seed(spec.seed, s + 1, 0x736567), &start)[0];
    for (std::size_t i = 1; i < mesh.n_obs; ++i) {
      std::size_t gi = seg_start + i;
      for (std::size_t c = 0; c < ch; ++c) vals[gi * ch + c] = seg.at(i, c);
      out.labels[gi] = static_cast<int>(s % 2);
      out.model_index[gi] = static_cast<int>(mi);
    }
    seg_start = seg_end;
  }
  out.path = Stream(std::move(times), std::move(vals), ch);
  return out;
}

std::vector<int> subpath_labels(const std::vector<int>& labels, std::size_t h1) {
  require(h1 >= 2, ErrorKind::Argument, "h1 must be >= 2");
  std::size_t n1 = labels.size() / h1;
  std::vector<int> out(n1);
  for (std::size_t j = 0; j < n1; ++j) {
    int ones = 0, total = 0;
    for (std::size_t i = j * h1 + 1; i < (j + 1) * h1; ++i) {
      ones += labels[i] != 0;
      ++total;
    }
    if (2 * ones == total)
      out[j] = labels[(j + 1) * h1 - 1] != 0;
    else
      out[j] = 2 * ones > total;
  }
  return out;
}

}  // namespace sigregime
