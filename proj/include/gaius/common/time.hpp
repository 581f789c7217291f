#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace gaius {

using Timestamp = std::chrono::sys_seconds;

// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_utc(Timestamp t);

// Accepts the format above plus RFC 822 dates as found in RSS pubDate and
// RFC 3339 offsets/fractions as found in Atom. Throws Error(parse_failure).
Timestamp parse_utc(std::string_view text);

class Clock {
public:
    virtual ~Clock() = default;
    virtual Timestamp now() const = 0;
};

class SystemClock final : public Clock {
public:
    Timestamp now() const override;
};

class ManualClock final : public Clock {
public:
    explicit ManualClock(Timestamp start) : now_(start) {}
    Timestamp now() const override { return now_; }
    void set(Timestamp t) { now_ = t; }
    void advance(std::chrono::seconds d) { now_ += d; }

private:
    Timestamp now_;
};

}  // namespace gaius
