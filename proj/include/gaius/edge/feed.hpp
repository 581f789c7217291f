#pragma once

#include "gaius/edge/model.hpp"

#include <vector>

namespace gaius::edge {

// 1 / (1 + km); 0 when either location is unknown.
double proximity(const UserProfile& user, const ContentItem& item) noexcept;

// score = alpha * proximity + (1 - alpha) * views / max views in the set,
// highest first; ties go to the newer item, then the smaller content_id.
// Throws Error(invalid_argument) unless alpha is in [0, 1].
std::vector<ContentItem> rank_feed(std::vector<ContentItem> items, const UserProfile& user, double alpha = 0.5);

}  // namespace gaius::edge
