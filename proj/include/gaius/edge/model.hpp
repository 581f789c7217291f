#pragma once

#include "gaius/adx/campaign.hpp"
#include "gaius/common/geo.hpp"
#include "gaius/common/time.hpp"
#include "gaius/policy/fidelity.hpp"
#include "gaius/policy/variants.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gaius::edge {

using json = nlohmann::ordered_json;

enum class CommunityVisibility { public_, private_ };

struct Community {
    std::string community_id;
    std::string name;
    std::string owner_id;
    std::string description;
    std::set<std::string> tags;
    CommunityVisibility visibility = CommunityVisibility::public_;
    std::set<std::string> members;  // always contains owner_id
    std::vector<std::string> content_ids;

    bool is_private() const noexcept { return visibility == CommunityVisibility::private_; }
    bool is_member(std::string_view user_id) const { return members.contains(std::string(user_id)); }
    friend bool operator==(const Community&, const Community&) = default;
};

enum class ContentKind { page, post, media };

struct ContentItem {
    std::string content_id;
    ContentKind kind = ContentKind::page;
    std::string page_id;
    std::string author;
    std::string community_id;
    std::optional<GeoPoint> location;
    std::string language;
    Timestamp created_at{};
    std::uint64_t views = 0;

    friend bool operator==(const ContentItem&, const ContentItem&) = default;
};

struct UserProfile {
    std::string user_id;
    std::string name;
    std::optional<policy::Fidelity> preferred_fidelity;
    std::string language;
    std::optional<GeoPoint> location;
    std::set<std::string> interests;
    std::set<std::string> communities;

    friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

struct RequestLog {
    Timestamp timestamp{};
    std::string page_id;
    policy::Fidelity fidelity = policy::Fidelity::medium;
    std::uint64_t page_size = 0;
    std::optional<double> plt_ms;
    std::optional<GeoPoint> geo;  // rounded to two decimals
    std::string network_type;
    std::string device_model;

    friend bool operator==(const RequestLog&, const RequestLog&) = default;
};

// Two decimal places, about 1 km.
GeoPoint coarse(GeoPoint p) noexcept;

json to_json(const Community& c);
json to_json(const ContentItem& c);
json to_json(const UserProfile& u);
json to_json(const RequestLog& r);
json to_json(const adx::AdCampaign& c);
json to_json(const policy::MediaVariantSet& s);

// Readers throw Error(invalid_argument) naming the offending field.
Community community_from_json(const json& j);
ContentItem content_from_json(const json& j);
UserProfile user_from_json(const json& j);
RequestLog request_log_from_json(const json& j);
adx::AdCampaign campaign_from_json(const json& j);
policy::MediaVariantSet variants_from_json(const json& j);

}  // namespace gaius::edge
