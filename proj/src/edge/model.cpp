#include "gaius/edge/model.hpp"

#include "gaius/common/error.hpp"

#include <cmath>

namespace gaius::edge {

namespace {

[[noreturn]] void bad(std::string_view what, std::string_view field) {
    throw Error(Errc::invalid_argument, std::string(what) + ": invalid or missing field '" + std::string(field) + "'");
}

std::string str(const json& j, std::string_view what, const char* key, bool required = true) {
    if (!j.contains(key) || j[key].is_null()) {
        if (required) bad(what, key);
        return {};
    }
    if (!j[key].is_string()) bad(what, key);
    return j[key].get<std::string>();
}

std::set<std::string> str_set(const json& j, std::string_view what, const char* key) {
    std::set<std::string> out;
    if (!j.contains(key) || j[key].is_null()) return out;
    if (!j[key].is_array()) bad(what, key);
    for (const auto& v : j[key]) {
        if (!v.is_string()) bad(what, key);
        out.insert(v.get<std::string>());
    }
    return out;
}

std::uint64_t u64(const json& j, std::string_view what, const char* key, bool required = true) {
    if (!j.contains(key) || j[key].is_null()) {
        if (required) bad(what, key);
        return 0;
    }
    if (!j[key].is_number_unsigned() && !(j[key].is_number_integer() && j[key].get<std::int64_t>() >= 0)) bad(what, key);
    return j[key].get<std::uint64_t>();
}

double num(const json& j, std::string_view what, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) bad(what, key);
    return j[key].get<double>();
}

json geo_json(const std::optional<GeoPoint>& p) {
    if (!p) return nullptr;
    return json{{"lat", p->lat}, {"lon", p->lon}};
}

std::optional<GeoPoint> geo(const json& j, std::string_view what, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    const auto& g = j[key];
    if (!g.is_object()) bad(what, key);
    GeoPoint p{num(g, what, "lat"), num(g, what, "lon")};
    if (!p.valid()) bad(what, key);
    return p;
}

Timestamp time_field(const json& j, std::string_view what, const char* key, bool required = true) {
    const auto s = str(j, what, key, required);
    if (s.empty()) return Timestamp{};
    try {
        return parse_utc(s);
    } catch (const Error&) {
        bad(what, key);
    }
}

json opt_str(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

std::optional<std::string> opt_str(const json& j, std::string_view what, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_string()) bad(what, key);
    return j[key].get<std::string>();
}

}  // namespace

GeoPoint coarse(GeoPoint p) noexcept { return GeoPoint{std::round(p.lat * 100) / 100, std::round(p.lon * 100) / 100}; }

json to_json(const Community& c) {
    return json{{"id", c.community_id},
                {"name", c.name},
                {"owner", c.owner_id},
                {"description", c.description},
                {"tags", c.tags},
                {"visibility", c.is_private() ? "private" : "public"},
                {"members", c.members},
                {"content", c.content_ids}};
}

Community community_from_json(const json& j) {
    constexpr std::string_view what = "community";
    if (!j.is_object()) bad(what, "(document)");
    Community c;
    c.community_id = str(j, what, "id", false);
    c.name = str(j, what, "name");
    c.owner_id = str(j, what, "owner", false);
    c.description = str(j, what, "description", false);
    c.tags = str_set(j, what, "tags");
    const auto vis = str(j, what, "visibility", false);
    if (vis == "private") {
        c.visibility = CommunityVisibility::private_;
    } else if (vis.empty() || vis == "public") {
        c.visibility = CommunityVisibility::public_;
    } else {
        bad(what, "visibility");
    }
    c.members = str_set(j, what, "members");
    if (j.contains("content") && j["content"].is_array()) {
        for (const auto& v : j["content"]) c.content_ids.push_back(v.get<std::string>());
    }
    return c;
}

namespace {

std::string_view kind_name(ContentKind k) {
    switch (k) {
        case ContentKind::page: return "page";
        case ContentKind::post: return "post";
        case ContentKind::media: return "media";
    }
    return "page";
}

}  // namespace

json to_json(const ContentItem& c) {
    return json{{"id", c.content_id},  {"kind", kind_name(c.kind)},        {"page_id", c.page_id},
                {"author", c.author},  {"community", c.community_id},      {"location", geo_json(c.location)},
                {"language", c.language}, {"created_at", format_utc(c.created_at)}, {"views", c.views}};
}

ContentItem content_from_json(const json& j) {
    constexpr std::string_view what = "content";
    if (!j.is_object()) bad(what, "(document)");
    ContentItem c;
    c.content_id = str(j, what, "id");
    const auto kind = str(j, what, "kind");
    if (kind == "page") {
        c.kind = ContentKind::page;
    } else if (kind == "post") {
        c.kind = ContentKind::post;
    } else if (kind == "media") {
        c.kind = ContentKind::media;
    } else {
        bad(what, "kind");
    }
    c.page_id = str(j, what, "page_id", false);
    c.author = str(j, what, "author");
    c.community_id = str(j, what, "community", false);
    c.location = geo(j, what, "location");
    c.language = str(j, what, "language", false);
    c.created_at = time_field(j, what, "created_at");
    c.views = u64(j, what, "views", false);
    return c;
}

json to_json(const UserProfile& u) {
    return json{{"id", u.user_id},
                {"name", u.name},
                {"fidelity", u.preferred_fidelity ? json(policy::fidelity_name(*u.preferred_fidelity)) : json(nullptr)},
                {"language", u.language},
                {"location", geo_json(u.location)},
                {"interests", u.interests},
                {"communities", u.communities}};
}

UserProfile user_from_json(const json& j) {
    constexpr std::string_view what = "user";
    if (!j.is_object()) bad(what, "(document)");
    UserProfile u;
    u.user_id = str(j, what, "id", false);
    u.name = str(j, what, "name", false);
    if (const auto f = str(j, what, "fidelity", false); !f.empty()) {
        try {
            u.preferred_fidelity = policy::parse_fidelity(f);
        } catch (const Error&) {
            bad(what, "fidelity");
        }
    }
    u.language = str(j, what, "language", false);
    u.location = geo(j, what, "location");
    u.interests = adx::normalize_tags(str_set(j, what, "interests"));
    u.communities = str_set(j, what, "communities");
    return u;
}

json to_json(const RequestLog& r) {
    return json{{"timestamp", format_utc(r.timestamp)},
                {"page_id", r.page_id},
                {"fidelity", policy::fidelity_name(r.fidelity)},
                {"page_size", r.page_size},
                {"plt_ms", r.plt_ms ? json(*r.plt_ms) : json(nullptr)},
                {"geo", geo_json(r.geo)},
                {"network_type", r.network_type},
                {"device_model", r.device_model}};
}

RequestLog request_log_from_json(const json& j) {
    constexpr std::string_view what = "request log";
    if (!j.is_object()) bad(what, "(document)");
    RequestLog r;
    r.timestamp = time_field(j, what, "timestamp");
    r.page_id = str(j, what, "page_id");
    try {
        r.fidelity = policy::parse_fidelity(str(j, what, "fidelity"));
    } catch (const Error&) {
        bad(what, "fidelity");
    }
    r.page_size = u64(j, what, "page_size");
    if (j.contains("plt_ms") && !j["plt_ms"].is_null()) r.plt_ms = num(j, what, "plt_ms");
    r.geo = geo(j, what, "geo");
    r.network_type = str(j, what, "network_type", false);
    r.device_model = str(j, what, "device_model", false);
    return r;
}

json to_json(const adx::AdCampaign& c) {
    json geo_target = nullptr;
    if (c.geo_target) {
        geo_target = json{{"lat", c.geo_target->center.lat},
                          {"lon", c.geo_target->center.lon},
                          {"radius_km", c.geo_target->radius_km}};
    }
    return json{{"ad_id", c.ad_id},
                {"advertiser", c.advertiser_id},
                {"creatives",
                 json{{"video", opt_str(c.creatives.video_url)},
                      {"image", opt_str(c.creatives.image_url)},
                      {"text", opt_str(c.creatives.text_body)}}},
                {"click_href", c.click_href},
                {"community", c.home_community_id},
                {"visibility", adx::visibility_name(c.visibility)},
                {"geo_target", geo_target},
                {"interests", c.interest_tags},
                {"target_impressions", c.target_impressions},
                {"start", format_utc(c.active_start)},
                {"end", format_utc(c.active_end)},
                {"served_impressions", c.served_impressions}};
}

adx::AdCampaign campaign_from_json(const json& j) {
    constexpr std::string_view what = "campaign";
    if (!j.is_object()) bad(what, "(document)");
    adx::AdCampaign c;
    c.ad_id = str(j, what, "ad_id", false);
    c.advertiser_id = str(j, what, "advertiser", false);
    if (j.contains("creatives") && j["creatives"].is_object()) {
        const auto& cr = j["creatives"];
        c.creatives.video_url = opt_str(cr, what, "video");
        c.creatives.image_url = opt_str(cr, what, "image");
        c.creatives.text_body = opt_str(cr, what, "text");
    } else if (j.contains("creatives") && !j["creatives"].is_null()) {
        bad(what, "creatives");
    }
    c.click_href = str(j, what, "click_href");
    c.home_community_id = str(j, what, "community", false);
    try {
        c.visibility = adx::parse_visibility(str(j, what, "visibility", false).empty()
                                                 ? std::string("local_only")
                                                 : str(j, what, "visibility", false));
    } catch (const Error&) {
        bad(what, "visibility");
    }
    if (j.contains("geo_target") && !j["geo_target"].is_null()) {
        const auto& g = j["geo_target"];
        if (!g.is_object()) bad(what, "geo_target");
        c.geo_target = adx::GeoTarget{GeoPoint{num(g, what, "lat"), num(g, what, "lon")}, num(g, what, "radius_km")};
    }
    c.interest_tags = str_set(j, what, "interests");
    c.target_impressions = u64(j, what, "target_impressions");
    c.active_start = time_field(j, what, "start");
    c.active_end = time_field(j, what, "end");
    c.served_impressions = u64(j, what, "served_impressions", false);
    return c;
}

json to_json(const policy::MediaVariantSet& s) {
    json variants = json::object();
    for (auto f : policy::kAllFidelities) {
        if (const auto& v = s.at(f)) {
            variants[std::string(policy::fidelity_name(f))] =
                json{{"url", v->url}, {"width", v->width}, {"height", v->height}, {"bytes", v->byte_size}, {"mime", v->mime}};
        }
    }
    return json{{"id", s.media_id}, {"video", s.video}, {"variants", variants}};
}

policy::MediaVariantSet variants_from_json(const json& j) {
    constexpr std::string_view what = "media variants";
    if (!j.is_object()) bad(what, "(document)");
    policy::MediaVariantSet s;
    s.media_id = str(j, what, "id");
    s.video = j.value("video", false);
    if (!j.contains("variants") || !j["variants"].is_object()) bad(what, "variants");
    for (auto f : policy::kAllFidelities) {
        const std::string key(policy::fidelity_name(f));
        if (!j["variants"].contains(key)) continue;
        const auto& v = j["variants"][key];
        s.at(f) = policy::MediaVariant{str(v, what, "url"), static_cast<std::int64_t>(u64(v, what, "width")),
                                       static_cast<std::int64_t>(u64(v, what, "height")), u64(v, what, "bytes"),
                                       str(v, what, "mime")};
    }
    return s;
}

}  // namespace gaius::edge
