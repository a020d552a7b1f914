#include "sigregime/error.hpp"
#include "sigregime/parallel.hpp"
#include "sigregime/rng.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>
#include <vector>

namespace sigregime {

const char* kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Argument: return "argument";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Range: return "range";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::Config: return "config";
    case ErrorKind::Ingestion: return "ingestion";
    case ErrorKind::Format: return "format";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Argument: return 2;
    case ErrorKind::Ingestion:
    case ErrorKind::Format:
    case ErrorKind::Domain:
    case ErrorKind::Shape:
    case ErrorKind::Range: return 3;
    case ErrorKind::Numeric:
    case ErrorKind::Degenerate:
    case ErrorKind::Capacity: return 4;
  }
  return 1;
}

void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(kind_name(kind)) + " error: " + what);
}

double normal(CounterRng& rng) {
  double u1 = rng.uniform();
  double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

int default_threads() {
  if (const char* env = std::getenv("SIGREGIME_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

std::atomic<int> g_threads{default_threads()};

}  // namespace

int num_threads() { return g_threads.load(); }

void set_num_threads(int n) {
  require(n >= 1, ErrorKind::Argument, "thread count must be >= 1");
  g_threads.store(n);
}

namespace {
// nested loops run inline on the worker that reached them
thread_local bool in_worker = false;
}  // namespace

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(num_threads()), n);
  if (workers <= 1 || in_worker) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t err_index = n;
  std::exception_ptr err;
  auto run = [&] {
    bool outer = in_worker;
    in_worker = true;
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
    in_worker = outer;
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace sigregime

#include <unordered_set>

namespace sigregime {

std::vector<std::size_t> draw_without_replacement(CounterRng& rng, std::size_t n, std::size_t k) {
  require(k <= n, ErrorKind::Argument, "cannot draw more indices than available");
  // Floyd's algorithm
  std::vector<std::size_t> out;
  out.reserve(k);
  std::unordered_set<std::size_t> seen;
  for (std::size_t j = n - k; j < n; ++j) {
    std::size_t t = static_cast<std::size_t>(rng() % (j + 1));
    if (seen.insert(t).second) {
      out.push_back(t);
    } else {
      seen.insert(j);
      out.push_back(j);
    }
  }
  return out;
}

}  // namespace sigregime
