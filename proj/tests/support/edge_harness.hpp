#pragma once

#include "gaius/common/time.hpp"
#include "gaius/edge/service.hpp"

#include "golden.hpp"

#include <filesystem>
#include <memory>
#include <random>
#include <string>

namespace gaius::testing {

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("gaius-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

// A service over a fresh store with a manual clock.
struct EdgeHarness {
    TempDir dir;
    ManualClock clock{parse_utc("2019-07-01T12:00:00Z")};
    edge::EdgeConfig config;
    std::unique_ptr<edge::EdgeService> service;

    EdgeHarness() {
        config.store_path = dir.path() / "store";
        service = std::make_unique<edge::EdgeService>(config, clock);
    }

    // Flushes and reopens the store.
    void restart() {
        service.reset();
        service = std::make_unique<edge::EdgeService>(config, clock);
    }

    edge::EdgeService& operator*() { return *service; }
    edge::EdgeService* operator->() { return service.get(); }

    edge::Registration user(const std::string& id, std::optional<GeoPoint> at = std::nullopt) {
        edge::UserProfile u;
        u.user_id = id;
        u.language = "en-KE";
        u.location = at;
        return service->register_user(u);
    }

    // Uploads the news media and publishes the news page as `author`.
    std::string publish_news(const std::string& author, const std::optional<std::string>& community = std::nullopt) {
        const std::filesystem::path news = std::filesystem::path(GAIUS_FIXTURES_DIR) / "news";
        for (const auto& entry : std::filesystem::directory_iterator(news / "media")) {
            service->put_media(slurp(entry.path()));
        }
        return service->publish_page(author, community, slurp(news / "page.json"));
    }
};

}  // namespace gaius::testing
