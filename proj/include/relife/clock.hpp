#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace relife {

/// Source of ISO-8601 UTC timestamps ("YYYY-MM-DDTHH:MM:SSZ"). Timestamps
/// of one clock sort lexicographically in time order.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::string now() = 0;
};

/// Deterministic clock: starts at `epoch_seconds` and advances one second per
/// reading. Used wherever byte-reproducible output matters.
class LogicalClock final : public Clock {
 public:
  explicit LogicalClock(std::int64_t epoch_seconds = 946684800 /* 2000-01-01 */)
      : next_(epoch_seconds) {}
  std::string now() override;

 private:
  std::int64_t next_;
};

class SystemClock final : public Clock {
 public:
  std::string now() override;
};

std::string format_utc(std::int64_t unix_seconds);
/// Inverse of format_utc; nullopt when `text` is not in that form.
std::optional<std::int64_t> parse_utc(std::string_view text);

}  // namespace relife
