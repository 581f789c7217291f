#pragma once

#include "gaius/common/stats.hpp"
#include "gaius/edge/model.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace gaius::edge {

struct Distribution {
    std::size_t count = 0;
    double min = 0, p50 = 0, p90 = 0, p95 = 0, max = 0, mean = 0;
};

struct MetricsSummary {
    std::size_t requests = 0;
    std::array<std::size_t, 3> by_fidelity{};  // indexed by Fidelity
    Distribution page_size;
    Distribution plt_ms;  // records that carry a client PLT
};

Distribution distribution(std::vector<double> values);
MetricsSummary summarize(const std::vector<RequestLog>& records);
json to_json(const MetricsSummary& s);

}  // namespace gaius::edge
