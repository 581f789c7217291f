#pragma once

#include "gaius/adx/campaign.hpp"

#include <atomic>
#include <map>
#include <memory>
#include <shared_mutex>
#include <vector>

namespace gaius::adx {

bool eligible(const AdCampaign& c, const AdContext& ctx, const policy::FidelityProfile& profile = {});

// |campaign tags ∩ user tags|
std::size_t relevance(const AdCampaign& c, const AdContext& ctx);

// Eligible campaigns ranked by relevance (descending), then fewer served
// impressions, then ad_id; at most k.
std::vector<AdCampaign> select_ads(const AdContext& ctx, std::size_t k, const std::vector<AdCampaign>& inventory,
                                   const policy::FidelityProfile& profile = {});

struct ExchangeState {
    double weekly_infra_cost = 0;
    std::uint64_t active_advertiser_count = 1;
};

struct PricingQuote {
    double base_component = 0;
    double infra_component = 0;
    double weekly_charge = 0;
    Timestamp quoted_at{};
};

// Throws Error(invalid_argument) for no active advertisers or negative prices.
PricingQuote quote_price(const AdCampaign& c, const ExchangeState& state, double base_cpi, Timestamp now = {});

// Thread-safe campaign inventory with atomic impression counters.
class AdExchange {
public:
    explicit AdExchange(policy::FidelityProfile profile = {});

    // Validates and stores the campaign; a resubmission of an existing ad_id
    // replaces it but keeps its served counter. Returns the ad_id.
    std::string submit(AdCampaign c);

    // Loads campaigns as persisted, served counters included.
    void restore(std::vector<AdCampaign> campaigns);

    std::vector<AdCampaign> select(const AdContext& ctx, std::size_t k) const;

    // Throws Error(unknown_ad) or Error(target_reached); the counter is left
    // unchanged on failure.
    std::uint64_t record_impression(std::string_view ad_id);

    std::optional<AdCampaign> get(std::string_view ad_id) const;
    std::vector<AdCampaign> snapshot() const;  // ordered by ad_id

    // Distinct advertisers with a campaign not yet ended at `now`.
    std::uint64_t active_advertiser_count(Timestamp now) const;

private:
    struct Entry {
        AdCampaign campaign;  // served_impressions is kept in `served`
        std::atomic<std::uint64_t> served{0};
    };

    AdCampaign materialize(const Entry& e) const;

    policy::FidelityProfile profile_;
    mutable std::shared_mutex mu_;
    std::map<std::string, std::unique_ptr<Entry>, std::less<>> entries_;
};

}  // namespace gaius::adx
