#pragma once

#include <cstddef>
#include <functional>
#include <utility>

namespace dirac {

// Parallel map over an index range. Every index writes only its own output
// slot, so results do not depend on the thread count.
class Executor {
 public:
  explicit Executor(unsigned threads = 1) : threads_(threads == 0 ? hardware_threads() : threads) {}

  static unsigned hardware_threads();
  static const Executor& serial();

  unsigned threads() const { return threads_; }

  template <class F>
  void for_each(std::size_t n, F&& f) const {
    run(n, std::function<void(std::size_t)>(std::forward<F>(f)));
  }

 private:
  void run(std::size_t n, const std::function<void(std::size_t)>& f) const;

  unsigned threads_;
};

}  // namespace dirac
