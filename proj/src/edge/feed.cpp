#include "gaius/edge/feed.hpp"

#include "gaius/common/error.hpp"

#include <algorithm>

namespace gaius::edge {

double proximity(const UserProfile& user, const ContentItem& item) noexcept {
    if (!user.location || !item.location) return 0.0;
    return 1.0 / (1.0 + haversine_km(*user.location, *item.location));
}

std::vector<ContentItem> rank_feed(std::vector<ContentItem> items, const UserProfile& user, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(Errc::invalid_argument, "alpha must be in [0, 1]");
    std::uint64_t max_views = 0;
    for (const auto& i : items) max_views = std::max(max_views, i.views);
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(items.size());
    for (std::size_t n = 0; n < items.size(); ++n) {
        const double pop = max_views == 0 ? 0.0 : static_cast<double>(items[n].views) / static_cast<double>(max_views);
        scored.emplace_back(alpha * proximity(user, items[n]) + (1.0 - alpha) * pop, n);
    }
    std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        const auto& x = items[a.second];
        const auto& y = items[b.second];
        if (x.created_at != y.created_at) return x.created_at > y.created_at;
        return x.content_id < y.content_id;
    });
    std::vector<ContentItem> out;
    out.reserve(items.size());
    for (const auto& [score, n] : scored) out.push_back(std::move(items[n]));
    return out;
}

}  // namespace gaius::edge
