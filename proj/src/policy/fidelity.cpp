#include "gaius/policy/fidelity.hpp"

#include "gaius/common/error.hpp"

namespace gaius::policy {

std::string_view fidelity_name(Fidelity f) noexcept {
    switch (f) {
        case Fidelity::low: return "low";
        case Fidelity::medium: return "medium";
        case Fidelity::high: return "high";
    }
    return "medium";
}

Fidelity parse_fidelity(std::string_view name) {
    for (auto f : kAllFidelities) {
        if (fidelity_name(f) == name) return f;
    }
    throw Error(Errc::invalid_argument, "unknown fidelity '" + std::string(name) + "'");
}

std::string_view ad_format_name(AdFormat f) noexcept {
    switch (f) {
        case AdFormat::video: return "video";
        case AdFormat::image: return "image";
        case AdFormat::text: return "text";
    }
    return "text";
}

void FidelityProfile::check() const {
    for (auto f : kAllFidelities) {
        const auto& l = at(f);
        if (!(l.image_scale > 0 && l.image_scale <= 1)) {
            throw Error(Errc::invalid_argument, "image_scale for " + std::string(fidelity_name(f)) + " must be in (0, 1]");
        }
        if (l.image_quality < 1 || l.image_quality > 100) {
            throw Error(Errc::invalid_argument, "image_quality for " + std::string(fidelity_name(f)) + " must be in [1, 100]");
        }
    }
    for (std::size_t i = 1; i < levels.size(); ++i) {
        if (!(levels[i].image_scale > levels[i - 1].image_scale) || !(levels[i].image_quality > levels[i - 1].image_quality)) {
            throw Error(Errc::invalid_argument, "image_scale and image_quality must strictly increase with fidelity");
        }
    }
    if (at(Fidelity::low).ad_format != AdFormat::text || at(Fidelity::medium).ad_format != AdFormat::image ||
        at(Fidelity::high).ad_format != AdFormat::video) {
        throw Error(Errc::invalid_argument, "ad formats must be text, image, video from low to high");
    }
    if (at(Fidelity::low).video_allowed) throw Error(Errc::invalid_argument, "video is not allowed at low fidelity");
}

Fidelity select_fidelity(std::optional<Fidelity> user_pref, std::optional<NetworkHint> hint) noexcept {
    if (user_pref) return *user_pref;
    if (!hint) return Fidelity::medium;
    if (hint->bandwidth_kbps < 256 || hint->rtt_ms > 800) return Fidelity::low;
    if (hint->bandwidth_kbps < 1024 || hint->rtt_ms > 300) return Fidelity::medium;
    return Fidelity::high;
}

}  // namespace gaius::policy
