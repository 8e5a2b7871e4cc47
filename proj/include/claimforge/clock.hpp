#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <thread>

namespace claimforge {

// Injectable time source so retry backoff and rate limiting are testable
// without real waiting.
class Clock {
 public:
  virtual ~Clock() = default;
  // Milliseconds on a monotonic axis.
  virtual int64_t now_ms() = 0;
  virtual void sleep_ms(int64_t ms) = 0;
};

class SystemClock : public Clock {
 public:
  int64_t now_ms() override {
    using namespace std::chrono;
    return duration_cast<milliseconds>(steady_clock::now().time_since_epoch())
        .count();
  }
  void sleep_ms(int64_t ms) override {
    if (ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(ms));
  }
};

// Time advances only through sleep_ms / advance. Thread-safe.
class ManualClock : public Clock {
 public:
  explicit ManualClock(int64_t start_ms = 0) : now_(start_ms) {}
  int64_t now_ms() override {
    std::lock_guard<std::mutex> lock(mu_);
    return now_;
  }
  void sleep_ms(int64_t ms) override { advance(ms); }
  void advance(int64_t ms) {
    std::lock_guard<std::mutex> lock(mu_);
    if (ms > 0) now_ += ms;
  }

 private:
  std::mutex mu_;
  int64_t now_;
};

}  // namespace claimforge
