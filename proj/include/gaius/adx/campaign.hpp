#pragma once

#include "gaius/common/geo.hpp"
#include "gaius/common/time.hpp"
#include "gaius/policy/assemble.hpp"
#include "gaius/policy/fidelity.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>

namespace gaius::adx {

enum class Visibility { local_only, global };

std::string_view visibility_name(Visibility v) noexcept;
Visibility parse_visibility(std::string_view name);

struct GeoTarget {
    GeoPoint center;
    double radius_km = 0;

    friend bool operator==(const GeoTarget&, const GeoTarget&) = default;
};

struct Creatives {
    std::optional<std::string> video_url;
    std::optional<std::string> image_url;
    std::optional<std::string> text_body;

    bool empty() const noexcept { return !video_url && !image_url && !text_body; }
    friend bool operator==(const Creatives&, const Creatives&) = default;
};

struct AdCampaign {
    std::string ad_id;
    std::string advertiser_id;
    Creatives creatives;
    std::string click_href;
    std::string home_community_id;
    Visibility visibility = Visibility::local_only;
    std::optional<GeoTarget> geo_target;
    std::set<std::string> interest_tags;
    std::uint64_t target_impressions = 0;  // per week
    Timestamp active_start{};
    Timestamp active_end{};  // exclusive
    std::uint64_t served_impressions = 0;

    friend bool operator==(const AdCampaign&, const AdCampaign&) = default;
};

// Lowercases and trims interest tags, dropping empty ones.
std::set<std::string> normalize_tags(const std::set<std::string>& tags);

// Throws Error(no_creative), Error(invalid_window) or Error(invalid_argument)
// for a zero impression target, a non-positive radius or an invalid center.
void check_campaign(const AdCampaign& c);

struct AdContext {
    std::optional<GeoPoint> user_location;
    std::string community_id;
    std::set<std::string> interest_tags;
    policy::Fidelity fidelity = policy::Fidelity::medium;
    Timestamp now{};
};

std::optional<std::string> creative_for(const AdCampaign& c, policy::AdFormat format);

// The creative matching the fidelity's ad format; nullopt when the campaign
// has none.
std::optional<policy::AdCreative> creative_for(const AdCampaign& c, policy::Fidelity fidelity,
                                               const policy::FidelityProfile& profile = {});

}  // namespace gaius::adx
