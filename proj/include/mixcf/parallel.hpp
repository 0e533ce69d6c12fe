#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace mixcf {

/// Runs fn(i) for i in [0, n) on `threads` workers with a fixed strided
/// assignment. Each index is handled exactly once, so results written per
/// index do not depend on the thread count.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const std::size_t t = threads < 1 ? 1 : std::min<std::size_t>(threads, n == 0 ? 1 : n);
  auto work = [&](std::size_t start) {
    for (std::size_t i = start; i < n; i += t) fn(i);
  };
  if (t == 1) {
    work(0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (std::size_t s = 0; s < t; ++s) pool.emplace_back(work, s);
  for (auto& th : pool) th.join();
}

}  // namespace mixcf
