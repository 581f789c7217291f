#include "gaius/adx/campaign.hpp"

#include "gaius/common/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace gaius::adx {

std::string_view visibility_name(Visibility v) noexcept { return v == Visibility::global ? "global" : "local_only"; }

Visibility parse_visibility(std::string_view name) {
    if (name == "global") return Visibility::global;
    if (name == "local_only" || name == "local") return Visibility::local_only;
    throw Error(Errc::invalid_argument, "unknown visibility '" + std::string(name) + "'");
}

std::set<std::string> normalize_tags(const std::set<std::string>& tags) {
    std::set<std::string> out;
    for (const auto& t : tags) {
        const auto first = t.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        std::string s = t.substr(first, t.find_last_not_of(" \t") - first + 1);
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
        out.insert(std::move(s));
    }
    return out;
}

void check_campaign(const AdCampaign& c) {
    if (c.ad_id.empty()) throw Error(Errc::invalid_argument, "ad_id must not be empty");
    auto non_empty = [](const std::optional<std::string>& s) { return s && !s->empty(); };
    if (!non_empty(c.creatives.video_url) && !non_empty(c.creatives.image_url) && !non_empty(c.creatives.text_body)) {
        throw Error(Errc::no_creative, "campaign " + c.ad_id + " has no creative");
    }
    if (c.active_end <= c.active_start) {
        throw Error(Errc::invalid_window, "campaign " + c.ad_id + " ends before it starts");
    }
    if (c.target_impressions == 0) throw Error(Errc::invalid_argument, "target_impressions must be positive");
    if (c.served_impressions > c.target_impressions) {
        throw Error(Errc::invalid_argument, "served_impressions exceeds target_impressions");
    }
    if (c.geo_target) {
        if (!(c.geo_target->radius_km > 0) || !std::isfinite(c.geo_target->radius_km)) {
            throw Error(Errc::invalid_argument, "geo_target radius_km must be positive");
        }
        if (!c.geo_target->center.valid()) throw Error(Errc::invalid_argument, "geo_target center is out of range");
    }
}

std::optional<std::string> creative_for(const AdCampaign& c, policy::AdFormat format) {
    const std::optional<std::string>* src = nullptr;
    switch (format) {
        case policy::AdFormat::video: src = &c.creatives.video_url; break;
        case policy::AdFormat::image: src = &c.creatives.image_url; break;
        case policy::AdFormat::text: src = &c.creatives.text_body; break;
    }
    if (src == nullptr || !*src || (*src)->empty()) return std::nullopt;
    return **src;
}

std::optional<policy::AdCreative> creative_for(const AdCampaign& c, policy::Fidelity fidelity,
                                               const policy::FidelityProfile& profile) {
    const auto format = profile.at(fidelity).ad_format;
    auto content = creative_for(c, format);
    if (!content) return std::nullopt;
    return policy::AdCreative{c.ad_id, format, std::move(*content), c.click_href};
}

}  // namespace gaius::adx
