#include "gaius/edge/metrics.hpp"

#include <algorithm>
#include <numeric>

namespace gaius::edge {

Distribution distribution(std::vector<double> values) {
    Distribution d;
    d.count = values.size();
    if (values.empty()) return d;
    std::sort(values.begin(), values.end());
    d.min = values.front();
    d.max = values.back();
    d.p50 = percentile(values, 50);
    d.p90 = percentile(values, 90);
    d.p95 = percentile(values, 95);
    d.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    return d;
}

MetricsSummary summarize(const std::vector<RequestLog>& records) {
    MetricsSummary s;
    s.requests = records.size();
    std::vector<double> sizes, plts;
    for (const auto& r : records) {
        ++s.by_fidelity[static_cast<std::size_t>(r.fidelity)];
        sizes.push_back(static_cast<double>(r.page_size));
        if (r.plt_ms) plts.push_back(*r.plt_ms);
    }
    s.page_size = distribution(std::move(sizes));
    s.plt_ms = distribution(std::move(plts));
    return s;
}

namespace {

json dist_json(const Distribution& d) {
    return json{{"count", d.count}, {"min", d.min}, {"p50", d.p50}, {"p90", d.p90},
                {"p95", d.p95},     {"max", d.max}, {"mean", d.mean}};
}

}  // namespace

json to_json(const MetricsSummary& s) {
    json by = json::object();
    for (auto f : policy::kAllFidelities) by[std::string(policy::fidelity_name(f))] = s.by_fidelity[static_cast<std::size_t>(f)];
    return json{{"requests", s.requests}, {"by_fidelity", by}, {"page_size", dist_json(s.page_size)}, {"plt_ms", dist_json(s.plt_ms)}};
}

}  // namespace gaius::edge
