#pragma once

#include "gaius/edge/model.hpp"
#include "gaius/maml/types.hpp"
#include "gaius/policy/variants.hpp"

#include <array>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace gaius::edge {

// File-backed store rooted at one directory:
//
//   pages/{id}.json           wire-format page
//   communities/{id}.json
//   content/{id}.json
//   users/{id}.json
//   tokens/{token}            user id
//   campaigns/{ad_id}.json
//   media/{id}/variants.json  MediaVariantSet
//   media/{id}/{fidelity}.{ext}
//   logs/requests.jsonl       one RequestLog per line
//
// Every file write goes to a temp file and is renamed into place, so a crash
// leaves either the old or the new version. Writers of one key are
// serialized; readers take a shared lock on the key's stripe.
class FileStore {
public:
    explicit FileStore(std::filesystem::path root);

    const std::filesystem::path& root() const noexcept { return root_; }

    std::optional<maml::Page> read_page(std::string_view page_id) const;
    std::optional<std::string> read_page_bytes(std::string_view page_id) const;
    // Read-modify-write under the key's exclusive lock: `update` receives the
    // current page (if any) and returns the page to store.
    maml::Page update_page(std::string_view page_id,
                           const std::function<maml::Page(const std::optional<maml::Page>&)>& update);

    // Generic JSON records, one file per key under `kind`.
    std::optional<json> read_record(std::string_view kind, std::string_view key) const;
    void write_record(std::string_view kind, std::string_view key, const json& value);
    std::vector<json> read_all(std::string_view kind) const;

    std::optional<std::string> read_token(std::string_view token) const;
    void write_token(std::string_view token, std::string_view user_id);

    std::optional<policy::MediaVariantSet> read_variants(std::string_view media_id) const;
    void write_media(const policy::MediaVariantSet& set, const std::array<std::string, 3>& bytes);
    std::optional<std::string> read_media(std::string_view media_id, policy::Fidelity f) const;

    // Serialized appender; each record is one line written with a single
    // write() and flushed.
    void append_log(const RequestLog& record);
    std::vector<RequestLog> read_log() const;

    // Store keys are restricted to [A-Za-z0-9._-] without a leading dot.
    static bool valid_key(std::string_view key) noexcept;

private:
    std::shared_mutex& stripe(std::string_view kind, std::string_view key) const;
    std::filesystem::path record_path(std::string_view kind, std::string_view key) const;

    std::filesystem::path root_;
    mutable std::array<std::shared_mutex, 64> stripes_;
    mutable std::mutex log_mu_;
};

// File extension for a stored media mime type ("jpg", "png", "mp4", ...).
std::string media_extension(std::string_view mime);

}  // namespace gaius::edge
