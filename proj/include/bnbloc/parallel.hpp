#ifndef BNBLOC_PARALLEL_HPP
#define BNBLOC_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace bnbloc {

/// Runs fn(begin, end) over contiguous chunks of [0, n) on `workers`
/// threads. Chunk boundaries depend only on (n, workers), and each index is
/// processed exactly once, so any fn that writes only to its own indices
/// produces results identical to a sequential run.
template <typename Fn>
void parallel_chunks(std::size_t n, int workers, Fn&& fn) {
  if (n == 0) return;
  if (workers <= 1 || n == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  const std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  const std::size_t chunk = (n + nw - 1) / nw;
  std::vector<std::thread> threads;
  threads.reserve(nw);
  std::vector<std::exception_ptr> errors(nw);
  for (std::size_t w = 0; w < nw; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&fn, &errors, w, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace bnbloc

#endif  // BNBLOC_PARALLEL_HPP
