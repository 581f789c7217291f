#pragma once

#include "gaius/maml/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace gaius::maml {

// Index of the topmost object (last in paint order) containing the point.
std::optional<std::size_t> hit_test(const Page& page, double x, double y);

using MediaSizes = std::map<std::string, std::uint64_t, std::less<>>;

// Serialized document length plus the bytes of every Image/Video url.
// Throws Error(missing_media_size) naming the first url without a size.
std::uint64_t page_weight(const Page& page, const MediaSizes& media_sizes);

// Number of fetches a client needs: the document plus one per media object.
std::size_t request_count(const Page& page) noexcept;

}  // namespace gaius::maml
