#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace invsamp {

// Root finding failed to reach its residual tolerance.
class convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A scan found no (or more than one) sign change where a root was expected.
class root_not_bracketed_error : public convergence_error {
 public:
  using convergence_error::convergence_error;
};

// The stopping rule consumed `cap` samples without reaching the threshold.
class cap_exceeded_error : public std::runtime_error {
 public:
  explicit cap_exceeded_error(std::uint64_t cap,
                              std::optional<std::uint64_t> trial = std::nullopt)
      : std::runtime_error(make_message(cap, trial)), cap_(cap), trial_(trial) {}

  std::uint64_t cap() const noexcept { return cap_; }
  std::optional<std::uint64_t> trial_index() const noexcept { return trial_; }

 private:
  static std::string make_message(std::uint64_t cap,
                                  std::optional<std::uint64_t> trial) {
    std::string msg = "sample cap of " + std::to_string(cap) +
                      " exceeded before the sum reached the threshold";
    if (trial) msg += " (trial " + std::to_string(*trial) + ")";
    return msg;
  }

  std::uint64_t cap_;
  std::optional<std::uint64_t> trial_;
};

}  // namespace invsamp
