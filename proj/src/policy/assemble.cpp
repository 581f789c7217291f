#include "gaius/policy/assemble.hpp"

#include "gaius/common/error.hpp"
#include "gaius/convert/text_metrics.hpp"

#include <algorithm>

namespace gaius::policy {

namespace {

MediaVariant variant_for(const VariantLookup& variants, const std::string& media_id, Fidelity f) {
    const auto set = variants ? variants(media_id) : std::nullopt;
    if (!set || !set->at(f)) {
        throw Error(Errc::missing_variant,
                    "no " + std::string(fidelity_name(f)) + " variant for media " + media_id);
    }
    return *set->at(f);
}

// Largest font, at most 24, whose wrapped text fits the slot height.
std::int64_t fitting_font(const std::string& text, const maml::Box& box) {
    std::int64_t font = 24;
    while (font > 8 && convert::text_height(text, static_cast<int>(font), static_cast<double>(box.w)) > box.h) --font;
    return font;
}

maml::Object ad_object(const AdCreative& ad, const maml::Box& slot) {
    switch (ad.format) {
        case AdFormat::video: return maml::Video{ad.content, slot, ad.click_href};
        case AdFormat::image: return maml::Image{ad.content, slot, ad.click_href};
        case AdFormat::text: break;
    }
    maml::Text t;
    t.txt = ad.content;
    t.box = slot;
    t.font = fitting_font(ad.content, slot);
    t.href = ad.click_href;
    return t;
}

}  // namespace

std::vector<std::size_t> ad_slots(const maml::Page& page) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < page.objects.size(); ++i) {
        if (const auto* r = std::get_if<maml::Rect>(&page.objects[i]); r && r->color == kAdSlotColor) out.push_back(i);
    }
    return out;
}

maml::Page assemble_page(const maml::Page& stored, Fidelity fidelity, const std::vector<AdCreative>& ads,
                         const VariantLookup& variants, const FidelityProfile& profile) {
    const auto& level = profile.at(fidelity);
    maml::Page page = stored;

    const auto slots = ad_slots(page);
    for (std::size_t k = 0; k < slots.size() && k < ads.size(); ++k) {
        if (ads[k].format != level.ad_format) {
            throw Error(Errc::invalid_argument, "ad " + ads[k].ad_id + " is a " + std::string(ad_format_name(ads[k].format)) +
                                                    " ad but " + std::string(fidelity_name(fidelity)) + " fidelity serves " +
                                                    std::string(ad_format_name(level.ad_format)) + " ads");
        }
        page.objects[slots[k]] = ad_object(ads[k], maml::box_of(page.objects[slots[k]]));
    }

    for (auto& obj : page.objects) {
        if (auto* img = std::get_if<maml::Image>(&obj)) {
            if (auto id = media_id_of(img->url)) img->url = variant_for(variants, *id, fidelity).url;
        } else if (auto* vid = std::get_if<maml::Video>(&obj)) {
            const auto id = media_id_of(vid->url);
            if (!level.video_allowed) {
                if (!id) {
                    throw Error(Errc::missing_variant, "video " + vid->url + " has no poster in the media store");
                }
                obj = maml::Image{variant_for(variants, *id, fidelity).url, vid->box, vid->href};
            } else if (id) {
                vid->url = variant_for(variants, *id, fidelity).url;
            }
        }
    }
    return page;
}

maml::Page assemble_page(std::string_view page_id, Fidelity fidelity, const std::vector<AdCreative>& ads,
                         const AssemblyStores& stores, const FidelityProfile& profile) {
    auto stored = stores.pages ? stores.pages(page_id) : std::nullopt;
    if (!stored) throw Error(Errc::page_not_found, "page " + std::string(page_id) + " not found");
    return assemble_page(*stored, fidelity, ads, stores.variants, profile);
}

maml::MediaSizes variant_sizes(const maml::Page& assembled, const VariantLookup& variants) {
    maml::MediaSizes sizes;
    for (const auto& obj : assembled.objects) {
        const std::string* url = maml::media_url(obj);
        if (url == nullptr || sizes.contains(*url)) continue;
        const auto id = media_id_of(*url);
        if (!id) {
            sizes.emplace(*url, 0);
            continue;
        }
        Fidelity f = Fidelity::high;
        if (const auto q = url->find("?fidelity="); q != std::string::npos) f = parse_fidelity(url->substr(q + 10));
        sizes.emplace(*url, variant_for(variants, *id, f).byte_size);
    }
    return sizes;
}

}  // namespace gaius::policy
