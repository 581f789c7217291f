#pragma once

#include "gaius/adx/exchange.hpp"
#include "gaius/common/error.hpp"
#include "gaius/edge/config.hpp"
#include "gaius/edge/model.hpp"
#include "gaius/edge/store.hpp"
#include "gaius/maml/validate.hpp"

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace gaius::edge {

// Error(validation_failed) carrying the validator's findings.
class ValidationFailed : public Error {
public:
    explicit ValidationFailed(std::vector<maml::Violation> violations);
    const std::vector<maml::Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<maml::Violation> violations_;
};

// What the client tells us about itself on a page request.
struct ClientInfo {
    std::optional<policy::NetworkHint> network;
    std::optional<GeoPoint> location;
    std::string network_type;
    std::string device_model;
};

struct ServedPage {
    std::string document;  // wire format
    policy::Fidelity fidelity = policy::Fidelity::medium;
    std::uint64_t page_size = 0;
    std::string token;  // identifies the pending log record
    std::vector<std::string> ad_ids;
};

struct MediaBlob {
    std::string bytes;
    std::string mime;
};

struct Registration {
    UserProfile user;
    std::string token;
};

class EdgeService {
public:
    EdgeService(EdgeConfig config, const Clock& clock);
    ~EdgeService();

    const EdgeConfig& config() const noexcept { return config_; }
    FileStore& store() noexcept { return store_; }
    adx::AdExchange& exchange() noexcept { return exchange_; }

    // Users. A missing user_id is generated.
    Registration register_user(UserProfile profile);
    // user_id for a bearer token; nullopt when unknown.
    std::optional<std::string> authenticate(std::string_view token) const;
    std::optional<UserProfile> user(std::string_view user_id) const;

    // Communities. The owner is always a member. Only the owner adds members
    // to a private community; anyone may join a public one themselves.
    Community create_community(std::string_view owner_id, Community draft);
    Community add_member(std::string_view community_id, std::string_view actor_id, std::string_view member_id);
    // Public communities plus the private ones the viewer belongs to.
    std::vector<Community> list_communities(const std::optional<std::string>& viewer) const;
    std::optional<Community> community(std::string_view community_id) const;

    // Parses leniently, validates, fills language/location from the author's
    // profile and stores a new version. A document naming an existing page
    // replaces it when the author matches. Returns the page_id.
    // Throws ValidationFailed, Error(unknown_community), Error(forbidden).
    std::string publish_page(std::string_view author_id, const std::optional<std::string>& community_id,
                             std::string_view document);

    // Stored page bytes, subject to community visibility.
    std::string get_page(std::string_view page_id, const std::optional<std::string>& viewer) const;

    // Assembles the page with ads and fidelity variants, records impressions
    // and opens a pending log record under the returned token.
    // Throws Error(not_found), Error(unauthorized), Error(forbidden),
    // Error(missing_variant).
    ServedPage serve_page(std::string_view page_id, const std::optional<std::string>& viewer,
                          std::optional<policy::Fidelity> fidelity_param, const ClientInfo& client = {});

    // Stores an image (transcoded to every fidelity) or a video. A video's low
    // variant is the low variant of `poster_id`. Returns the media id.
    std::string put_media(std::string_view bytes, const std::optional<std::string>& poster_id = std::nullopt);
    MediaBlob get_media(std::string_view media_id, policy::Fidelity f) const;
    std::optional<policy::MediaVariantSet> variants(std::string_view media_id) const;

    // Content of one community ranked for the viewer.
    std::vector<ContentItem> feed(std::string_view community_id, const std::optional<std::string>& viewer,
                                  std::optional<double> alpha = std::nullopt) const;

    // Ads.
    std::string submit_campaign(adx::AdCampaign c);
    adx::PricingQuote quote(std::string_view ad_id) const;

    // Merges the client's PLT into the pending record and appends it.
    // Throws Error(unknown_token) for unknown, expired or already used tokens.
    RequestLog log_metrics(std::string_view token, double plt_ms);
    // Appends pending records older than the metrics TTL without a PLT and
    // saves impression and view counters changed since the last flush.
    std::size_t flush_expired();
    // Appends every pending record and persists campaign counters.
    std::size_t flush_all();
    std::size_t pending_count() const;

private:
    struct Pending {
        RequestLog record;
        Timestamp opened{};
    };

    void check_access(const std::string& community_id, const std::optional<std::string>& viewer) const;
    std::string new_id(std::string_view prefix);
    void save_content(const ContentItem& item);

    EdgeConfig config_;
    const Clock& clock_;
    FileStore store_;
    adx::AdExchange exchange_;

    mutable std::shared_mutex index_mu_;
    std::map<std::string, Community, std::less<>> communities_;
    std::map<std::string, ContentItem, std::less<>> content_;
    std::map<std::string, std::string, std::less<>> page_content_;  // page_id -> content_id
    std::map<std::string, UserProfile, std::less<>> users_;

    mutable std::mutex variants_mu_;
    mutable std::map<std::string, policy::MediaVariantSet, std::less<>> variant_cache_;

    mutable std::mutex pending_mu_;
    std::map<std::string, Pending, std::less<>> pending_;

    // Set when impressions or views changed since counters were last saved.
    std::atomic<bool> counters_dirty_{false};
    void save_counters();
};

}  // namespace gaius::edge
