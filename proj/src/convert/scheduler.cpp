#include "gaius/convert/scheduler.hpp"

#include "gaius/common/error.hpp"

namespace gaius::convert {

FeedScheduler::FeedScheduler(std::vector<FeedScheduleEntry> entries, const Clock& clock, FeedFetcher fetcher,
                             PageSink sink)
    : entries_(std::move(entries)), clock_(clock), fetcher_(std::move(fetcher)), sink_(std::move(sink)) {
    for (const auto& e : entries_) {
        if (e.refresh_interval < std::chrono::minutes{1}) {
            throw Error(Errc::invalid_argument, "refresh interval for " + e.feed_url + " is under one minute");
        }
    }
}

std::vector<RefreshResult> FeedScheduler::run_due() {
    std::lock_guard lock(mu_);
    const Timestamp now = clock_.now();
    std::vector<RefreshResult> results;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (!e.last_run || now - *e.last_run >= e.refresh_interval) results.push_back(refresh(i, now));
    }
    return results;
}

std::optional<Timestamp> FeedScheduler::next_due() const {
    std::lock_guard lock(mu_);
    std::optional<Timestamp> next;
    for (const auto& e : entries_) {
        const Timestamp due = e.last_run ? *e.last_run + e.refresh_interval : clock_.now();
        if (!next || due < *next) next = due;
    }
    return next;
}

std::vector<FeedScheduleEntry> FeedScheduler::entries() const {
    std::lock_guard lock(mu_);
    return entries_;
}

RefreshResult FeedScheduler::refresh(std::size_t index, Timestamp now) {
    auto& e = entries_[index];
    RefreshResult r;
    r.entry = index;
    r.at = now;
    e.last_run = now;
    try {
        const std::string doc = fetcher_(e.feed_url);
        const RssFeed feed = parse_feed(doc, e.feed_url, now);
        RssLayoutParams layout = e.layout;
        layout.page_id = e.target_page_id;
        maml::Page page = translate_rss(feed, layout);
        sink_(page);
        e.last_error.reset();
        r.ok = true;
        r.item_count = feed.items.size();
    } catch (const std::exception& ex) {
        e.last_error = ex.what();
        r.error = ex.what();
    }
    return r;
}

std::vector<RefreshResult> FeedScheduler::run_until(FeedScheduler& scheduler, ManualClock& clock, Timestamp until) {
    std::vector<RefreshResult> all;
    while (true) {
        auto due = scheduler.next_due();
        if (!due || *due > until) break;
        if (*due > clock.now()) clock.set(*due);
        auto batch = scheduler.run_due();
        if (batch.empty()) break;
        all.insert(all.end(), batch.begin(), batch.end());
    }
    clock.set(until);
    return all;
}

}  // namespace gaius::convert
