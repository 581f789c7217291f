#include "gaius/edge/service.hpp"

#include "gaius/common/error.hpp"
#include "gaius/common/fs.hpp"
#include "gaius/common/image_probe.hpp"
#include "gaius/edge/feed.hpp"
#include "gaius/maml/codec.hpp"
#include "gaius/maml/geometry.hpp"
#include "gaius/policy/assemble.hpp"
#include "gaius/policy/transcode.hpp"

#include <algorithm>
#include <random>

namespace gaius::edge {

namespace {

std::string describe(const std::vector<maml::Violation>& violations) {
    std::string msg = "document failed validation:";
    for (const auto& v : violations) {
        msg += " " + v.rule;
        if (v.object_index >= 0) msg += "@" + std::to_string(v.object_index);
    }
    return msg;
}

std::string random_hex(std::size_t bytes) {
    thread_local std::random_device rd;
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    while (out.size() < bytes * 2) {
        auto word = rd();
        for (int i = 0; i < 8 && out.size() < bytes * 2; ++i, word >>= 4) out.push_back(kHex[word & 0xf]);
    }
    return out;
}

std::optional<std::string> video_mime(std::string_view bytes) {
    if (bytes.size() >= 12 && bytes.substr(4, 4) == "ftyp") return "video/mp4";
    if (bytes.size() >= 4 && bytes.substr(0, 4) == "\x1a\x45\xdf\xa3") return "video/webm";
    return std::nullopt;
}

}  // namespace

ValidationFailed::ValidationFailed(std::vector<maml::Violation> violations)
    : Error(Errc::validation_failed, describe(violations)), violations_(std::move(violations)) {}

EdgeService::EdgeService(EdgeConfig config, const Clock& clock)
    : config_(std::move(config)), clock_(clock), store_(config_.store_path), exchange_(config_.profile) {
    config_.profile.check();
    for (const auto& j : store_.read_all("communities")) {
        auto c = community_from_json(j);
        communities_.emplace(c.community_id, std::move(c));
    }
    for (const auto& j : store_.read_all("content")) {
        auto c = content_from_json(j);
        if (c.kind == ContentKind::page) page_content_.emplace(c.page_id, c.content_id);
        content_.emplace(c.content_id, std::move(c));
    }
    for (const auto& j : store_.read_all("users")) {
        auto u = user_from_json(j);
        users_.emplace(u.user_id, std::move(u));
    }
    std::vector<adx::AdCampaign> campaigns;
    for (const auto& j : store_.read_all("campaigns")) campaigns.push_back(campaign_from_json(j));
    exchange_.restore(std::move(campaigns));
}

EdgeService::~EdgeService() {
    try {
        flush_all();
    } catch (...) {
    }
}

std::string EdgeService::new_id(std::string_view prefix) { return std::string(prefix) + random_hex(8); }

Registration EdgeService::register_user(UserProfile profile) {
    if (profile.user_id.empty()) profile.user_id = new_id("u-");
    if (!FileStore::valid_key(profile.user_id)) throw Error(Errc::invalid_argument, "invalid user id");
    if (profile.location && !profile.location->valid()) throw Error(Errc::invalid_argument, "invalid location");
    if (!profile.language.empty() && !maml::is_language_tag(profile.language)) {
        throw Error(Errc::invalid_argument, "invalid language tag '" + profile.language + "'");
    }
    profile.interests = adx::normalize_tags(profile.interests);
    profile.communities.clear();
    Registration reg{profile, random_hex(16)};
    {
        std::unique_lock lock(index_mu_);
        if (users_.contains(profile.user_id)) {
            throw Error(Errc::invalid_argument, "user " + profile.user_id + " already exists");
        }
        store_.write_record("users", profile.user_id, to_json(profile));
        users_.emplace(profile.user_id, profile);
    }
    store_.write_token(reg.token, profile.user_id);
    return reg;
}

std::optional<std::string> EdgeService::authenticate(std::string_view token) const {
    if (!FileStore::valid_key(token)) return std::nullopt;
    return store_.read_token(token);
}

std::optional<UserProfile> EdgeService::user(std::string_view user_id) const {
    std::shared_lock lock(index_mu_);
    const auto it = users_.find(user_id);
    if (it == users_.end()) return std::nullopt;
    return it->second;
}

Community EdgeService::create_community(std::string_view owner_id, Community draft) {
    if (draft.name.empty()) throw Error(Errc::invalid_argument, "community name is empty");
    if (draft.community_id.empty()) draft.community_id = new_id("c-");
    if (!FileStore::valid_key(draft.community_id)) throw Error(Errc::invalid_argument, "invalid community id");
    draft.owner_id = std::string(owner_id);
    draft.members = {draft.owner_id};
    draft.content_ids.clear();
    draft.tags = adx::normalize_tags(draft.tags);
    std::unique_lock lock(index_mu_);
    auto owner = users_.find(owner_id);
    if (owner == users_.end()) throw Error(Errc::unauthorized, "unknown user " + std::string(owner_id));
    if (communities_.contains(draft.community_id)) {
        throw Error(Errc::invalid_argument, "community " + draft.community_id + " already exists");
    }
    store_.write_record("communities", draft.community_id, to_json(draft));
    owner->second.communities.insert(draft.community_id);
    store_.write_record("users", owner->second.user_id, to_json(owner->second));
    communities_.emplace(draft.community_id, draft);
    return draft;
}

Community EdgeService::add_member(std::string_view community_id, std::string_view actor_id, std::string_view member_id) {
    std::unique_lock lock(index_mu_);
    auto c = communities_.find(community_id);
    if (c == communities_.end()) throw Error(Errc::unknown_community, "unknown community " + std::string(community_id));
    auto member = users_.find(member_id);
    if (member == users_.end()) throw Error(Errc::not_found, "unknown user " + std::string(member_id));
    const bool owner = actor_id == c->second.owner_id;
    if (c->second.is_private() ? !owner : !(owner || actor_id == member_id)) {
        throw Error(Errc::forbidden, "not allowed to add members to " + std::string(community_id));
    }
    c->second.members.insert(std::string(member_id));
    member->second.communities.insert(c->second.community_id);
    store_.write_record("communities", c->second.community_id, to_json(c->second));
    store_.write_record("users", member->second.user_id, to_json(member->second));
    return c->second;
}

std::vector<Community> EdgeService::list_communities(const std::optional<std::string>& viewer) const {
    std::shared_lock lock(index_mu_);
    std::vector<Community> out;
    for (const auto& [id, c] : communities_) {
        if (!c.is_private() || (viewer && c.is_member(*viewer))) out.push_back(c);
    }
    return out;
}

std::optional<Community> EdgeService::community(std::string_view community_id) const {
    std::shared_lock lock(index_mu_);
    const auto it = communities_.find(community_id);
    if (it == communities_.end()) return std::nullopt;
    return it->second;
}

void EdgeService::check_access(const std::string& community_id, const std::optional<std::string>& viewer) const {
    if (community_id.empty()) return;
    std::shared_lock lock(index_mu_);
    const auto it = communities_.find(community_id);
    if (it == communities_.end() || !it->second.is_private()) return;
    if (!viewer) throw Error(Errc::unauthorized, "community " + community_id + " is private");
    if (!it->second.is_member(*viewer)) throw Error(Errc::forbidden, "not a member of " + community_id);
}

void EdgeService::save_content(const ContentItem& item) { store_.write_record("content", item.content_id, to_json(item)); }

std::string EdgeService::publish_page(std::string_view author_id, const std::optional<std::string>& community_id,
                                      std::string_view document) {
    const auto author = user(author_id);
    if (!author) throw Error(Errc::unauthorized, "unknown user " + std::string(author_id));

    maml::Page page;
    try {
        page = maml::parse_page(document, maml::ParseOptions{false, false});
    } catch (const maml::ParseError& e) {
        throw ValidationFailed({maml::Violation{e.object_index(), e.what(), std::string(maml::parse_errc_name(e.code()))}});
    }
    if (community_id) page.community_id = *community_id;
    if (page.community_id && page.community_id->empty()) page.community_id.reset();
    if (page.community_id) {
        const auto c = community(*page.community_id);
        if (!c) throw Error(Errc::unknown_community, "unknown community " + *page.community_id);
        if (c->is_private() && !c->is_member(author_id)) {
            throw Error(Errc::forbidden, "not a member of " + *page.community_id);
        }
    }
    page.author_id = std::string(author_id);
    if (page.language.empty()) page.language = author->language;
    if (!page.location) page.location = author->location;
    if (page.page_id.empty()) page.page_id = new_id("p-");
    if (!FileStore::valid_key(page.page_id)) throw Error(Errc::invalid_argument, "invalid page id '" + page.page_id + "'");
    if (auto violations = maml::validate(page); !violations.empty()) throw ValidationFailed(std::move(violations));

    const auto now = clock_.now();
    const auto stored = store_.update_page(page.page_id, [&](const std::optional<maml::Page>& current) {
        maml::Page next = page;
        if (current) {
            if (current->author_id != page.author_id) {
                throw Error(Errc::forbidden, "page " + page.page_id + " belongs to another author");
            }
            next.version = current->version + 1;
            next.created_at = current->created_at;
        } else {
            next.version = 1;
            next.created_at = now;
        }
        next.updated_at = now;
        return next;
    });

    std::unique_lock lock(index_mu_);
    if (!page_content_.contains(stored.page_id)) {
        ContentItem item;
        item.content_id = new_id("k-");
        item.kind = ContentKind::page;
        item.page_id = stored.page_id;
        item.author = stored.author_id;
        item.community_id = stored.community_id.value_or("");
        item.location = stored.location;
        item.language = stored.language;
        item.created_at = now;
        save_content(item);
        if (!item.community_id.empty()) {
            auto& c = communities_.at(item.community_id);
            c.content_ids.push_back(item.content_id);
            store_.write_record("communities", c.community_id, to_json(c));
        }
        page_content_.emplace(stored.page_id, item.content_id);
        content_.emplace(item.content_id, std::move(item));
    }
    return stored.page_id;
}

std::string EdgeService::get_page(std::string_view page_id, const std::optional<std::string>& viewer) const {
    if (!FileStore::valid_key(page_id)) throw Error(Errc::not_found, "page not found");
    const auto bytes = store_.read_page_bytes(page_id);
    if (!bytes) throw Error(Errc::not_found, "page " + std::string(page_id) + " not found");
    check_access(maml::parse_page(*bytes).community_id.value_or(""), viewer);
    return *bytes;
}

ServedPage EdgeService::serve_page(std::string_view page_id, const std::optional<std::string>& viewer,
                                   std::optional<policy::Fidelity> fidelity_param, const ClientInfo& client) {
    if (!FileStore::valid_key(page_id)) throw Error(Errc::not_found, "page not found");
    const auto stored = store_.read_page(page_id);
    if (!stored) throw Error(Errc::not_found, "page " + std::string(page_id) + " not found");
    const auto community_id = stored->community_id.value_or("");
    check_access(community_id, viewer);

    const auto profile = viewer ? user(*viewer) : std::nullopt;
    const auto pref = fidelity_param ? fidelity_param : (profile ? profile->preferred_fidelity : std::nullopt);
    const auto fidelity = policy::select_fidelity(pref, client.network);
    const auto location = client.location ? client.location : (profile ? profile->location : std::nullopt);
    const auto now = clock_.now();

    const policy::VariantLookup lookup = [this](std::string_view id) { return variants(id); };
    std::vector<policy::AdCreative> ads;
    if (const auto slots = policy::ad_slots(*stored).size(); slots > 0) {
        adx::AdContext ctx;
        ctx.user_location = location;
        ctx.community_id = community_id;
        if (profile) ctx.interest_tags = profile->interests;
        ctx.fidelity = fidelity;
        ctx.now = now;
        for (const auto& c : exchange_.select(ctx, slots)) {
            if (auto creative = adx::creative_for(c, fidelity, config_.profile)) ads.push_back(std::move(*creative));
        }
    }
    // Assemble before counting impressions so a failed response serves none.
    auto assembled = policy::assemble_page(*stored, fidelity, ads, lookup, config_.profile);
    std::vector<policy::AdCreative> served;
    for (const auto& ad : ads) {
        try {
            exchange_.record_impression(ad.ad_id);
            served.push_back(ad);
        } catch (const Error& e) {
            if (e.code() != Errc::target_reached && e.code() != Errc::unknown_ad) throw;
        }
    }
    if (served.size() != ads.size()) assembled = policy::assemble_page(*stored, fidelity, served, lookup, config_.profile);

    ServedPage out;
    out.fidelity = fidelity;
    out.document = maml::serialize_page(assembled);
    out.page_size = maml::page_weight(assembled, policy::variant_sizes(assembled, lookup));
    out.token = random_hex(16);
    for (const auto& ad : served) out.ad_ids.push_back(ad.ad_id);

    {
        std::unique_lock lock(index_mu_);
        if (const auto it = page_content_.find(page_id); it != page_content_.end()) ++content_.at(it->second).views;
    }
    counters_dirty_ = true;
    RequestLog record;
    record.timestamp = now;
    record.page_id = std::string(page_id);
    record.fidelity = fidelity;
    record.page_size = out.page_size;
    if (location) record.geo = coarse(*location);
    record.network_type = client.network_type;
    record.device_model = client.device_model;
    std::lock_guard lock(pending_mu_);
    pending_.emplace(out.token, Pending{std::move(record), now});
    return out;
}

std::optional<policy::MediaVariantSet> EdgeService::variants(std::string_view media_id) const {
    if (!FileStore::valid_key(media_id)) return std::nullopt;
    {
        std::lock_guard lock(variants_mu_);
        if (const auto it = variant_cache_.find(media_id); it != variant_cache_.end()) return it->second;
    }
    auto set = store_.read_variants(media_id);
    if (set) {
        std::lock_guard lock(variants_mu_);
        variant_cache_.emplace(std::string(media_id), *set);
    }
    return set;
}

std::string EdgeService::put_media(std::string_view bytes, const std::optional<std::string>& poster_id) {
    const auto id = content_id(bytes).substr(0, 16);
    if (variants(id)) return id;
    if (const auto mime = video_mime(bytes)) {
        policy::MediaVariantSet set;
        set.media_id = id;
        set.video = true;
        std::array<std::string, 3> files;
        for (auto f : {policy::Fidelity::medium, policy::Fidelity::high}) {
            set.at(f) = policy::MediaVariant{policy::variant_url(id, f), 0, 0, bytes.size(), *mime};
            files[static_cast<std::size_t>(f)] = std::string(bytes);
        }
        if (poster_id) {
            const auto poster = variants(*poster_id);
            if (!poster || poster->video || !poster->at(policy::Fidelity::low)) {
                throw Error(Errc::not_found, "poster " + *poster_id + " is not a stored image");
            }
            auto low = *poster->at(policy::Fidelity::low);
            low.url = policy::variant_url(id, policy::Fidelity::low);
            set.at(policy::Fidelity::low) = low;
            files[0] = *store_.read_media(*poster_id, policy::Fidelity::low);
        }
        store_.write_media(set, files);
        return id;
    }
    if (poster_id) throw Error(Errc::invalid_argument, "only videos take a poster");
    auto transcoded = policy::transcode_all(bytes, config_.profile, id);
    store_.write_media(transcoded.set, transcoded.bytes);
    return id;
}

MediaBlob EdgeService::get_media(std::string_view media_id, policy::Fidelity f) const {
    const auto set = variants(media_id);
    if (!set) throw Error(Errc::not_found, "media " + std::string(media_id) + " not found");
    const auto& v = set->at(f);
    if (!v) {
        throw Error(Errc::missing_variant,
                    "media " + std::string(media_id) + " has no " + std::string(policy::fidelity_name(f)) + " variant");
    }
    auto bytes = store_.read_media(media_id, f);
    if (!bytes) throw Error(Errc::missing_variant, "variant file missing for " + std::string(media_id));
    return MediaBlob{std::move(*bytes), v->mime};
}

std::vector<ContentItem> EdgeService::feed(std::string_view community_id, const std::optional<std::string>& viewer,
                                           std::optional<double> alpha) const {
    const auto c = community(community_id);
    if (!c) throw Error(Errc::unknown_community, "unknown community " + std::string(community_id));
    check_access(c->community_id, viewer);
    std::vector<ContentItem> items;
    {
        std::shared_lock lock(index_mu_);
        for (const auto& id : c->content_ids) {
            if (const auto it = content_.find(id); it != content_.end()) items.push_back(it->second);
        }
    }
    UserProfile who;
    if (viewer) who = user(*viewer).value_or(UserProfile{});
    return rank_feed(std::move(items), who, alpha.value_or(config_.feed_alpha));
}

std::string EdgeService::submit_campaign(adx::AdCampaign c) {
    if (c.ad_id.empty()) c.ad_id = new_id("ad-");
    if (!FileStore::valid_key(c.ad_id)) throw Error(Errc::invalid_argument, "invalid ad id");
    if (!c.home_community_id.empty() && !community(c.home_community_id)) {
        throw Error(Errc::unknown_community, "unknown community " + c.home_community_id);
    }
    const auto id = exchange_.submit(c);
    store_.write_record("campaigns", id, to_json(*exchange_.get(id)));
    return id;
}

adx::PricingQuote EdgeService::quote(std::string_view ad_id) const {
    const auto c = exchange_.get(ad_id);
    if (!c) throw Error(Errc::unknown_ad, "unknown ad " + std::string(ad_id));
    const auto now = clock_.now();
    // Quoting while every campaign has ended still prices for one advertiser.
    const auto count = std::max<std::uint64_t>(1, exchange_.active_advertiser_count(now));
    return adx::quote_price(*c, adx::ExchangeState{config_.weekly_infra_cost, count}, config_.base_cpi, now);
}

RequestLog EdgeService::log_metrics(std::string_view token, double plt_ms) {
    if (!(plt_ms >= 0) || plt_ms > 1.0e9) throw Error(Errc::invalid_argument, "plt_ms out of range");
    Pending p;
    {
        std::lock_guard lock(pending_mu_);
        const auto it = pending_.find(token);
        if (it == pending_.end()) throw Error(Errc::unknown_token, "unknown or already used token");
        p = std::move(it->second);
        pending_.erase(it);
    }
    p.record.plt_ms = plt_ms;
    store_.append_log(p.record);
    return p.record;
}

std::size_t EdgeService::flush_expired() {
    const auto cutoff = clock_.now() - config_.metrics_ttl;
    std::vector<RequestLog> expired;
    {
        std::lock_guard lock(pending_mu_);
        for (auto it = pending_.begin(); it != pending_.end();) {
            if (it->second.opened <= cutoff) {
                expired.push_back(std::move(it->second.record));
                it = pending_.erase(it);
            } else {
                ++it;
            }
        }
    }
    std::stable_sort(expired.begin(), expired.end(), [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    for (const auto& r : expired) store_.append_log(r);
    if (counters_dirty_.exchange(false)) save_counters();
    return expired.size();
}

void EdgeService::save_counters() {
    for (const auto& c : exchange_.snapshot()) store_.write_record("campaigns", c.ad_id, to_json(c));
    std::shared_lock lock(index_mu_);
    for (const auto& [id, item] : content_) {
        if (item.views > 0) save_content(item);
    }
}

std::size_t EdgeService::flush_all() {
    std::vector<RequestLog> all;
    {
        std::lock_guard lock(pending_mu_);
        for (auto& [token, p] : pending_) all.push_back(std::move(p.record));
        pending_.clear();
    }
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    for (const auto& r : all) store_.append_log(r);
    counters_dirty_ = false;
    save_counters();
    return all.size();
}

std::size_t EdgeService::pending_count() const {
    std::lock_guard lock(pending_mu_);
    return pending_.size();
}

}  // namespace gaius::edge
