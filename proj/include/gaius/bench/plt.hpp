#pragma once

#include "gaius/convert/snapshot.hpp"
#include "gaius/maml/geometry.hpp"
#include "gaius/maml/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gaius::bench {

struct NetworkModel {
    double rtt_ms = 100;
    double bandwidth_kbps = 1024;
    double dns_ms = 100;  // once per host
    int max_connections_per_host = 6;
    int connection_setup_rtts = 1;
    int request_rtts = 1;

    // Throws Error(invalid_argument) unless every field is positive.
    void check() const;
    // Compact description, e.g. "rtt100-bw1024-dns100-c6-s1-r1".
    std::string id() const;
};

struct FetchNode {
    std::string host;
    std::uint64_t bytes = 0;
};

// Objects and their dependencies: `child` is requested once every one of its
// parents has been received. Objects without parents are requested at t = 0.
struct FetchGraph {
    std::vector<FetchNode> nodes;
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // (parent, child)
};

// Discrete-event page-load simulation. Each host has
// max_connections_per_host connections. The objects of one dependency depth
// are dealt to them round-robin from the first connection, and each
// connection fetches its objects in (depth, index) order. The assignment does
// not depend on sizes or timing, which keeps PLT monotone in both. A fetch costs the host's DNS lookup if it is still pending, setup
// RTTs on a connection's first fetch, request RTTs and bytes / bandwidth.
// Returns the completion time of the last object in seconds.
// Throws Error(cyclic_graph) or Error(invalid_argument).
double simulate_plt(const FetchGraph& graph, const NetworkModel& model);

// Host part of a url ("" when there is none).
std::string host_of(std::string_view url);

// The captured request graph of a snapshot.
FetchGraph html_graph(const convert::HtmlPageSnapshot& snap);

// A MAML page is one document fetch followed by one fetch per media object,
// all from the edge host.
FetchGraph maml_graph(const maml::Page& page, const maml::MediaSizes& sizes);

}  // namespace gaius::bench
