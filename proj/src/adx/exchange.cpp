#include "gaius/adx/exchange.hpp"

#include "gaius/common/error.hpp"

#include <algorithm>
#include <mutex>
#include <set>
#include <tuple>

namespace gaius::adx {

bool eligible(const AdCampaign& c, const AdContext& ctx, const policy::FidelityProfile& profile) {
    if (!(c.active_start <= ctx.now && ctx.now < c.active_end)) return false;
    if (c.served_impressions >= c.target_impressions) return false;
    if (!creative_for(c, profile.at(ctx.fidelity).ad_format)) return false;
    if (c.visibility != Visibility::global && c.home_community_id != ctx.community_id) return false;
    if (c.geo_target) {
        if (!ctx.user_location) return false;
        if (haversine_km(*ctx.user_location, c.geo_target->center) > c.geo_target->radius_km) return false;
    }
    return true;
}

std::size_t relevance(const AdCampaign& c, const AdContext& ctx) {
    std::size_t n = 0;
    for (const auto& t : c.interest_tags) n += ctx.interest_tags.count(t);
    return n;
}

std::vector<AdCampaign> select_ads(const AdContext& ctx, std::size_t k, const std::vector<AdCampaign>& inventory,
                                   const policy::FidelityProfile& profile) {
    std::vector<std::pair<std::size_t, const AdCampaign*>> ranked;
    for (const auto& c : inventory) {
        if (eligible(c, ctx, profile)) ranked.emplace_back(relevance(c, ctx), &c);
    }
    const auto better = [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return std::tie(a.second->served_impressions, a.second->ad_id) <
               std::tie(b.second->served_impressions, b.second->ad_id);
    };
    const auto n = std::min(k, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n), ranked.end(), better);
    std::vector<AdCampaign> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(*ranked[i].second);
    return out;
}

PricingQuote quote_price(const AdCampaign& c, const ExchangeState& state, double base_cpi, Timestamp now) {
    if (state.active_advertiser_count < 1) throw Error(Errc::invalid_argument, "active_advertiser_count must be at least 1");
    if (base_cpi < 0 || state.weekly_infra_cost < 0) throw Error(Errc::invalid_argument, "prices must be non-negative");
    PricingQuote q;
    q.base_component = static_cast<double>(c.target_impressions) * base_cpi;
    q.infra_component = state.weekly_infra_cost / static_cast<double>(state.active_advertiser_count);
    q.weekly_charge = q.base_component + q.infra_component;
    q.quoted_at = now;
    return q;
}

AdExchange::AdExchange(policy::FidelityProfile profile) : profile_(profile) {}

std::string AdExchange::submit(AdCampaign c) {
    c.interest_tags = normalize_tags(c.interest_tags);
    c.served_impressions = 0;
    check_campaign(c);
    auto entry = std::make_unique<Entry>();
    entry->campaign = std::move(c);
    std::unique_lock lock(mu_);
    auto& slot = entries_[entry->campaign.ad_id];
    if (slot) {
        entry->served.store(std::min(slot->served.load(), entry->campaign.target_impressions));
    }
    slot = std::move(entry);
    return slot->campaign.ad_id;
}

void AdExchange::restore(std::vector<AdCampaign> campaigns) {
    std::unique_lock lock(mu_);
    for (auto& c : campaigns) {
        c.interest_tags = normalize_tags(c.interest_tags);
        check_campaign(c);
        auto entry = std::make_unique<Entry>();
        entry->served.store(c.served_impressions);
        entry->campaign = std::move(c);
        entries_[entry->campaign.ad_id] = std::move(entry);
    }
}

AdCampaign AdExchange::materialize(const Entry& e) const {
    AdCampaign c = e.campaign;
    c.served_impressions = e.served.load();
    return c;
}

std::vector<AdCampaign> AdExchange::select(const AdContext& ctx, std::size_t k) const {
    return select_ads(ctx, k, snapshot(), profile_);
}

std::uint64_t AdExchange::record_impression(std::string_view ad_id) {
    std::shared_lock lock(mu_);
    auto it = entries_.find(ad_id);
    if (it == entries_.end()) throw Error(Errc::unknown_ad, "unknown ad " + std::string(ad_id));
    auto& entry = *it->second;
    auto current = entry.served.load();
    do {
        if (current >= entry.campaign.target_impressions) {
            throw Error(Errc::target_reached, "ad " + std::string(ad_id) + " reached its impression target");
        }
    } while (!entry.served.compare_exchange_weak(current, current + 1));
    return current + 1;
}

std::optional<AdCampaign> AdExchange::get(std::string_view ad_id) const {
    std::shared_lock lock(mu_);
    auto it = entries_.find(ad_id);
    if (it == entries_.end()) return std::nullopt;
    return materialize(*it->second);
}

std::vector<AdCampaign> AdExchange::snapshot() const {
    std::shared_lock lock(mu_);
    std::vector<AdCampaign> out;
    out.reserve(entries_.size());
    for (const auto& [id, e] : entries_) out.push_back(materialize(*e));
    return out;
}

std::uint64_t AdExchange::active_advertiser_count(Timestamp now) const {
    std::shared_lock lock(mu_);
    std::set<std::string> advertisers;
    for (const auto& [id, e] : entries_) {
        if (now < e->campaign.active_end) advertisers.insert(e->campaign.advertiser_id);
    }
    return advertisers.size();
}

}  // namespace gaius::adx
