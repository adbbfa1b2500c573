#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

namespace rdfront {

template <class T>
struct JobResult {
  std::optional<T> value;
  std::string error;  ///< empty on success

  bool ok() const { return value.has_value(); }
};

/// Worker count from FRONT_WORKERS, else the hardware concurrency.
inline int default_workers() {
  if (const char* env = std::getenv("FRONT_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Results come back
/// in index order whatever the schedule; exceptions are captured per job.
template <class F>
auto parallel_map(std::size_t n, int workers, F&& fn)
    -> std::vector<JobResult<std::invoke_result_t<F&, std::size_t>>> {
  using T = std::invoke_result_t<F&, std::size_t>;
  std::vector<JobResult<T>> out(n);
  auto run_one = [&](std::size_t i) {
    try {
      out[i].value.emplace(fn(i));
    } catch (const std::exception& e) {
      out[i].error = e.what();
    } catch (...) {
      out[i].error = "unknown error";
    }
  };
  const auto nw = static_cast<std::size_t>(std::max(1, workers));
  if (nw == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) run_one(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(nw, n); ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) run_one(i);
    });
  for (auto& t : pool) t.join();
  return out;
}

/// parallel_map that rethrows the first failure (by index).
template <class F>
auto parallel_map_strict(std::size_t n, int workers, F&& fn) {
  auto res = parallel_map(n, workers, std::forward<F>(fn));
  using T = typename decltype(res)::value_type;
  std::vector<std::decay_t<decltype(*std::declval<T>().value)>> out;
  out.reserve(n);
  for (auto& r : res) {
    if (!r.ok()) throw std::runtime_error(r.error);
    out.push_back(std::move(*r.value));
  }
  return out;
}

}  // namespace rdfront
