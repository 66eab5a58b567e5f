#pragma once

#include <chrono>
#include <optional>

namespace smh {

using Clock = std::chrono::steady_clock;

/// Optional wall-clock limit shared by long-running phases.
class Deadline {
 public:
  Deadline() = default;
  explicit Deadline(Clock::time_point at) : at_(at) {}

  static Deadline after(double seconds) {
    return Deadline(Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                       std::chrono::duration<double>(seconds)));
  }

  bool expired() const { return at_ && Clock::now() >= *at_; }
  bool bounded() const { return at_.has_value(); }

 private:
  std::optional<Clock::time_point> at_;
};

/// Seconds elapsed since construction.
class Stopwatch {
 public:
  Stopwatch() : start_(Clock::now()) {}
  double seconds() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

 private:
  Clock::time_point start_;
};

}  // namespace smh
