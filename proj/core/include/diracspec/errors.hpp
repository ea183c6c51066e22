#pragma once

#include <stdexcept>
#include <string>

namespace dirac {

// Every library failure carries the module that raised it, a short condition
// name (e.g. "RootNotBracketed") and, where meaningful, an index.
class Error : public std::runtime_error {
 public:
  static constexpr long kNoIndex = -(1L << 62);

  Error(std::string module, std::string condition, const std::string& message,
        long index = kNoIndex)
      : std::runtime_error(message),
        module_(std::move(module)),
        condition_(std::move(condition)),
        index_(index) {}

  const std::string& module() const noexcept { return module_; }
  const std::string& condition() const noexcept { return condition_; }
  long index() const noexcept { return index_; }
  bool has_index() const noexcept { return index_ != kNoIndex; }

 private:
  std::string module_;
  std::string condition_;
  long index_;
};

}  // namespace dirac
