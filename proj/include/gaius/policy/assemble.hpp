#pragma once

#include "gaius/maml/geometry.hpp"
#include "gaius/maml/types.hpp"
#include "gaius/policy/fidelity.hpp"
#include "gaius/policy/variants.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gaius::policy {

// Rect color that marks an ad slot in a stored page.
inline constexpr std::string_view kAdSlotColor = "#00adfe";

// One ad chosen for a page: `content` is a media url for video/image ads and
// the body text for text ads.
struct AdCreative {
    std::string ad_id;
    AdFormat format = AdFormat::text;
    std::string content;
    std::string click_href;

    friend bool operator==(const AdCreative&, const AdCreative&) = default;
};

using PageLookup = std::function<std::optional<maml::Page>(std::string_view page_id)>;
using VariantLookup = std::function<std::optional<MediaVariantSet>(std::string_view media_id)>;

struct AssemblyStores {
    PageLookup pages;
    VariantLookup variants;
};

// Indices of the ad slot Rects in paint order.
std::vector<std::size_t> ad_slots(const maml::Page& page);

// Fills ad slots in paint order (extra ads are ignored, unfilled slots stay),
// then points every stored media url at its variant for `fidelity` and
// replaces videos by their poster image when the fidelity disallows video.
// Urls outside the media store are left as they are.
// Throws Error(invalid_argument) for an ad whose format does not match the
// fidelity, Error(missing_variant) for absent variants.
maml::Page assemble_page(const maml::Page& stored, Fidelity fidelity, const std::vector<AdCreative>& ads,
                         const VariantLookup& variants, const FidelityProfile& profile = {});

// Store lookup form; throws Error(page_not_found).
maml::Page assemble_page(std::string_view page_id, Fidelity fidelity, const std::vector<AdCreative>& ads,
                         const AssemblyStores& stores, const FidelityProfile& profile = {});

// Sizes of every media url in an assembled page, taken from the variant
// sets. Urls outside the media store count as zero bytes: the edge never
// serves them.
maml::MediaSizes variant_sizes(const maml::Page& assembled, const VariantLookup& variants);

}  // namespace gaius::policy
