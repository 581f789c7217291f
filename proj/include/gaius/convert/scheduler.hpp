#pragma once

#include "gaius/common/time.hpp"
#include "gaius/convert/rss.hpp"
#include "gaius/maml/types.hpp"

#include <chrono>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace gaius::convert {

inline constexpr std::chrono::minutes kDefaultRefreshInterval{30};

struct FeedScheduleEntry {
    std::string feed_url;
    std::chrono::seconds refresh_interval = kDefaultRefreshInterval;
    std::string target_page_id;
    std::optional<Timestamp> last_run;  // unset means "due now"
    std::optional<std::string> last_error;
    RssLayoutParams layout;
};

struct RefreshResult {
    std::size_t entry = 0;
    Timestamp at{};
    bool ok = false;
    std::string error;
    std::size_t item_count = 0;
};

// Returns the feed document for a url; throws on failure.
using FeedFetcher = std::function<std::string(const std::string& url)>;
// Receives each successfully translated page.
using PageSink = std::function<void(const maml::Page& page)>;

// Re-translates each feed once `refresh_interval` has elapsed since its last
// run. A failed fetch records last_error and leaves the published page alone.
class FeedScheduler {
public:
    // Throws Error(invalid_argument) for an interval under one minute.
    FeedScheduler(std::vector<FeedScheduleEntry> entries, const Clock& clock, FeedFetcher fetcher, PageSink sink);

    // Refreshes every entry due at clock.now().
    std::vector<RefreshResult> run_due();

    // Earliest instant at which some entry becomes due.
    std::optional<Timestamp> next_due() const;

    // Drives a ManualClock from its current time to `until`, stopping at every
    // due instant. Returns the refreshes in the order they happened.
    static std::vector<RefreshResult> run_until(FeedScheduler& scheduler, ManualClock& clock, Timestamp until);

    std::vector<FeedScheduleEntry> entries() const;

private:
    RefreshResult refresh(std::size_t index, Timestamp now);

    mutable std::mutex mu_;
    std::vector<FeedScheduleEntry> entries_;
    const Clock& clock_;
    FeedFetcher fetcher_;
    PageSink sink_;
};

}  // namespace gaius::convert
