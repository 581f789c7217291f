#include "gaius/policy/variants.hpp"

namespace gaius::policy {

bool MediaVariantSet::ordered() const noexcept {
    std::optional<std::uint64_t> prev;
    for (const auto& v : variants) {
        if (!v) continue;
        if (prev && v->byte_size < *prev) return false;
        prev = v->byte_size;
    }
    return true;
}

std::string variant_url(std::string_view media_id, Fidelity f) {
    std::string url = std::string(kMediaPrefix) + std::string(media_id);
    if (f != Fidelity::high) url += "?fidelity=" + std::string(fidelity_name(f));
    return url;
}

std::optional<std::string> media_id_of(std::string_view url) {
    if (!url.starts_with(kMediaPrefix)) return std::nullopt;
    auto id = url.substr(kMediaPrefix.size());
    id = id.substr(0, id.find_first_of("?#"));
    if (id.empty() || id.find('/') != std::string_view::npos) return std::nullopt;
    return std::string(id);
}

}  // namespace gaius::policy
