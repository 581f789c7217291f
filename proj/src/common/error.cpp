#include "gaius/common/error.hpp"

namespace gaius {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::invariant_violation: return "InvariantViolation";
        case Errc::missing_media_size: return "MissingMediaSize";
        case Errc::empty_snapshot: return "EmptySnapshot";
        case Errc::unscalable_viewport: return "UnscalableViewport";
        case Errc::parse_failure: return "ParseFailure";
        case Errc::unsupported_image_format: return "UnsupportedImageFormat";
        case Errc::zero_dimension: return "ZeroDimension";
        case Errc::page_not_found: return "PageNotFound";
        case Errc::missing_variant: return "MissingVariant";
        case Errc::no_creative: return "NoCreative";
        case Errc::invalid_window: return "InvalidWindow";
        case Errc::unknown_ad: return "UnknownAd";
        case Errc::target_reached: return "TargetReached";
        case Errc::not_found: return "NotFound";
        case Errc::forbidden: return "Forbidden";
        case Errc::unauthorized: return "Unauthorized";
        case Errc::validation_failed: return "ValidationFailed";
        case Errc::unknown_community: return "UnknownCommunity";
        case Errc::unknown_token: return "UnknownToken";
        case Errc::cyclic_graph: return "CyclicGraph";
        case Errc::empty_corpus: return "EmptyCorpus";
        case Errc::io_error: return "IoError";
        case Errc::invalid_argument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace gaius
