#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

namespace fraglab::detail {

// 1 - (1 - u)^n for u in [0, 1], accurate for small u.
inline double one_minus_pow_complement(double u, double n) {
  if (u >= 1.0) return 1.0;
  if (u <= 0.0) return 0.0;
  return -std::expm1(n * std::log1p(-u));
}

// Bisection for a sign change of f on [lo, hi]. f(lo) and f(hi) must have
// opposite signs (zero counts as either). Returns the midpoint of the final
// bracket.
template <class F>
double bisect(F&& f, double lo, double hi, double xtol = 0.0, int max_iter = 200) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  for (int i = 0; i < max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= xtol) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Golden-section search for the maximum of a unimodal f on [lo, hi].
template <class F>
double golden_max(F&& f, double lo, double hi, double xtol) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > xtol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Runs fn(chunk, begin, end) over `chunks` contiguous pieces of [0, n) on up
// to `threads` threads. Chunk boundaries depend only on n and chunks.
template <class F>
void parallel_chunks(long n, int chunks, int threads, F&& fn) {
  chunks = static_cast<int>(std::max(1L, std::min<long>(chunks, n)));
  auto bounds = [&](int c) { return n * c / chunks; };
  threads = std::max(1, std::min(threads, chunks));
  if (threads == 1) {
    for (int c = 0; c < chunks; ++c) fn(c, bounds(c), bounds(c + 1));
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int c = t; c < chunks; c += threads) fn(c, bounds(c), bounds(c + 1));
    });
  for (auto& th : pool) th.join();
}

}  // namespace fraglab::detail
