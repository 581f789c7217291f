#include "gaius/bench/plt.hpp"

#include "gaius/common/error.hpp"
#include "gaius/common/numfmt.hpp"
#include "gaius/maml/codec.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <tuple>

namespace gaius::bench {

void NetworkModel::check() const {
    if (!(rtt_ms > 0 && bandwidth_kbps > 0 && dns_ms > 0 && max_connections_per_host > 0 &&
          connection_setup_rtts > 0 && request_rtts > 0)) {
        throw Error(Errc::invalid_argument, "network model fields must all be positive");
    }
}

std::string NetworkModel::id() const {
    return "rtt" + format_number(rtt_ms) + "-bw" + format_number(bandwidth_kbps) + "-dns" + format_number(dns_ms) +
           "-c" + std::to_string(max_connections_per_host) + "-s" + std::to_string(connection_setup_rtts) + "-r" +
           std::to_string(request_rtts);
}

std::string host_of(std::string_view url) {
    const auto scheme = url.find("://");
    if (scheme == std::string_view::npos) return {};
    auto rest = url.substr(scheme + 3);
    rest = rest.substr(0, rest.find_first_of("/?#"));
    if (const auto at = rest.rfind('@'); at != std::string_view::npos) rest = rest.substr(at + 1);
    std::string host(rest);
    std::transform(host.begin(), host.end(), host.begin(), [](unsigned char c) { return std::tolower(c); });
    return host;
}

double simulate_plt(const FetchGraph& graph, const NetworkModel& model) {
    model.check();
    const std::size_t n = graph.nodes.size();
    if (n == 0) return 0.0;
    std::vector<std::vector<std::size_t>> children(n);
    std::vector<std::size_t> pending(n, 0);
    for (const auto& [p, c] : graph.edges) {
        if (p >= n || c >= n) throw Error(Errc::invalid_argument, "edge references a missing object");
        children[p].push_back(c);
        ++pending[c];
    }

    // Kahn's algorithm gives both the cycle check and longest-path depths.
    std::vector<std::size_t> depth(n, 0), indeg = pending, order;
    order.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (indeg[i] == 0) order.push_back(i);
    }
    for (std::size_t k = 0; k < order.size(); ++k) {
        for (auto c : children[order[k]]) {
            depth[c] = std::max(depth[c], depth[order[k]] + 1);
            if (--indeg[c] == 0) order.push_back(c);
        }
    }
    if (order.size() != n) throw Error(Errc::cyclic_graph, "request graph has a cycle");

    // Static connection assignment: within a host, each dependency depth is
    // dealt round-robin starting from the first connection.
    struct Slot {
        std::vector<std::size_t> queue;
        std::size_t next = 0;
        bool busy = false;
        bool opened = false;
    };
    std::map<std::string, std::vector<std::size_t>> by_host;
    for (std::size_t i = 0; i < n; ++i) by_host[graph.nodes[i].host].push_back(i);
    std::vector<Slot> slots;
    std::vector<std::size_t> slot_of(n);
    std::map<std::string, std::optional<double>> dns_done;
    const auto per_host = static_cast<std::size_t>(model.max_connections_per_host);
    for (auto& [host, objs] : by_host) {
        std::sort(objs.begin(), objs.end(), [&](auto a, auto b) { return std::tie(depth[a], a) < std::tie(depth[b], b); });
        const std::size_t first = slots.size();
        std::size_t used = 0, k = 0;
        for (std::size_t i = 0; i < objs.size(); ++i, ++k) {
            if (i > 0 && depth[objs[i]] != depth[objs[i - 1]]) k = 0;
            used = std::max(used, k % per_host + 1);
        }
        slots.resize(first + used);
        k = 0;
        for (std::size_t i = 0; i < objs.size(); ++i, ++k) {
            if (i > 0 && depth[objs[i]] != depth[objs[i - 1]]) k = 0;
            const auto s = first + k % per_host;
            slots[s].queue.push_back(objs[i]);
            slot_of[objs[i]] = s;
        }
        dns_done[host] = std::nullopt;
    }

    const double rtt = model.rtt_ms / 1000.0;
    const double bytes_per_s = model.bandwidth_kbps * 1000.0 / 8.0;
    std::vector<bool> ready(n, false);
    using Event = std::pair<double, std::size_t>;  // completion time, object
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events;

    auto try_start = [&](std::size_t s, double now) {
        auto& slot = slots[s];
        if (slot.busy || slot.next == slot.queue.size()) return;
        const auto obj = slot.queue[slot.next];
        if (!ready[obj]) return;
        auto& dns = dns_done[graph.nodes[obj].host];
        if (!dns) dns = now + model.dns_ms / 1000.0;
        double t = std::max(now, *dns);
        if (!slot.opened) {
            t += model.connection_setup_rtts * rtt;
            slot.opened = true;
        }
        t += model.request_rtts * rtt + static_cast<double>(graph.nodes[obj].bytes) / bytes_per_s;
        slot.busy = true;
        ++slot.next;
        events.emplace(t, obj);
    };

    for (std::size_t i = 0; i < n; ++i) ready[i] = pending[i] == 0;
    for (std::size_t s = 0; s < slots.size(); ++s) try_start(s, 0.0);

    double plt = 0.0;
    while (!events.empty()) {
        const auto [t, obj] = events.top();
        events.pop();
        plt = std::max(plt, t);
        slots[slot_of[obj]].busy = false;
        std::vector<std::size_t> woken{slot_of[obj]};
        for (auto c : children[obj]) {
            if (--pending[c] == 0) {
                ready[c] = true;
                woken.push_back(slot_of[c]);
            }
        }
        std::sort(woken.begin(), woken.end());
        woken.erase(std::unique(woken.begin(), woken.end()), woken.end());
        for (auto s : woken) try_start(s, t);
    }
    return plt;
}

FetchGraph html_graph(const convert::HtmlPageSnapshot& snap) {
    FetchGraph g;
    g.nodes.reserve(snap.resources.size());
    for (const auto& r : snap.resources) g.nodes.push_back(FetchNode{host_of(r.url), r.byte_size});
    for (const auto& e : snap.edges) g.edges.emplace_back(e.parent, e.child);
    return g;
}

FetchGraph maml_graph(const maml::Page& page, const maml::MediaSizes& sizes) {
    static const std::string kEdge = "edge";
    FetchGraph g;
    g.nodes.push_back(FetchNode{kEdge, maml::serialize_page(page).size()});
    for (const auto& obj : page.objects) {
        const std::string* url = maml::media_url(obj);
        if (url == nullptr) continue;
        const auto it = sizes.find(*url);
        if (it == sizes.end()) throw Error(Errc::missing_media_size, "no size for media url " + *url);
        g.edges.emplace_back(0, g.nodes.size());
        g.nodes.push_back(FetchNode{kEdge, it->second});
    }
    return g;
}

}  // namespace gaius::bench
