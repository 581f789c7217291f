#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace gaius::policy {

// Ordered so that the enumerator value compares like the fidelity.
enum class Fidelity { low = 0, medium = 1, high = 2 };

inline constexpr std::array<Fidelity, 3> kAllFidelities{Fidelity::low, Fidelity::medium, Fidelity::high};

std::string_view fidelity_name(Fidelity f) noexcept;
// Throws Error(invalid_argument) for anything but "high", "medium", "low".
Fidelity parse_fidelity(std::string_view name);

enum class AdFormat { video, image, text };

std::string_view ad_format_name(AdFormat f) noexcept;

struct FidelityLevel {
    double image_scale = 1.0;
    int image_quality = 85;
    AdFormat ad_format = AdFormat::video;
    bool video_allowed = true;
};

struct FidelityProfile {
    std::array<FidelityLevel, 3> levels{{
        {0.25, 35, AdFormat::text, false},
        {0.5, 60, AdFormat::image, true},
        {1.0, 85, AdFormat::video, true},
    }};

    const FidelityLevel& at(Fidelity f) const noexcept { return levels[static_cast<std::size_t>(f)]; }
    FidelityLevel& at(Fidelity f) noexcept { return levels[static_cast<std::size_t>(f)]; }

    // Throws Error(invalid_argument) unless scale and quality strictly increase
    // with fidelity, scale is in (0, 1], quality in [1, 100], the ad formats
    // are text/image/video from low to high and video is disallowed at low.
    void check() const;
};

struct NetworkHint {
    double rtt_ms = 0;
    double bandwidth_kbps = 0;
};

Fidelity select_fidelity(std::optional<Fidelity> user_pref, std::optional<NetworkHint> hint) noexcept;

}  // namespace gaius::policy
