#include "gaius/edge/http.hpp"

#include "gaius/common/error.hpp"

#include <httplib.h>

#include <charconv>

namespace gaius::edge {

namespace {

constexpr const char* kJson = "application/json";
constexpr const char* kMaml = "application/vnd.maml+json";

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

std::optional<std::string> bearer(const httplib::Request& req) {
    const auto h = req.get_header_value("Authorization");
    constexpr std::string_view prefix = "Bearer ";
    if (h.size() <= prefix.size() || std::string_view(h).substr(0, prefix.size()) != prefix) return std::nullopt;
    return h.substr(prefix.size());
}

std::optional<double> parse_double(std::string_view s) {
    double v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string unquote(std::string s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

std::optional<policy::Fidelity> fidelity_param(const httplib::Request& req) {
    if (!req.has_param("fidelity")) return std::nullopt;
    return policy::parse_fidelity(req.get_param_value("fidelity"));
}

// Client Hints: RTT in ms and Downlink in Mbps, ECT for the connection type,
// Sec-CH-UA-Model for the device. X-Gaius-Geo carries "lat,lon".
ClientInfo client_info(const httplib::Request& req) {
    ClientInfo info;
    const auto rtt = req.has_header("RTT") ? parse_double(req.get_header_value("RTT")) : std::nullopt;
    const auto down = req.has_header("Downlink") ? parse_double(req.get_header_value("Downlink")) : std::nullopt;
    if (rtt || down) info.network = policy::NetworkHint{rtt.value_or(0.0), down ? *down * 1000.0 : 1.0e9};
    info.network_type = req.get_header_value("ECT");
    info.device_model = unquote(req.get_header_value("Sec-CH-UA-Model"));
    if (req.has_header("X-Gaius-Geo")) {
        const auto geo = req.get_header_value("X-Gaius-Geo");
        if (const auto comma = geo.find(','); comma != std::string::npos) {
            const auto lat = parse_double(std::string_view(geo).substr(0, comma));
            const auto lon = parse_double(std::string_view(geo).substr(comma + 1));
            if (lat && lon && GeoPoint{*lat, *lon}.valid()) info.location = GeoPoint{*lat, *lon};
        }
    }
    return info;
}

json quote_json(const adx::PricingQuote& q) {
    return json{{"base_component", q.base_component},
                {"infra_component", q.infra_component},
                {"weekly_charge", q.weekly_charge},
                {"quoted_at", format_utc(q.quoted_at)}};
}

}  // namespace

int http_status(Errc code) noexcept {
    switch (code) {
        case Errc::not_found:
        case Errc::page_not_found:
        case Errc::unknown_community:
        case Errc::unknown_ad:
        case Errc::unknown_token: return 404;
        case Errc::forbidden: return 403;
        case Errc::unauthorized: return 401;
        case Errc::validation_failed:
        case Errc::invariant_violation: return 422;
        case Errc::unsupported_image_format:
        case Errc::zero_dimension: return 415;
        case Errc::target_reached:
        case Errc::missing_variant: return 409;
        case Errc::invalid_argument:
        case Errc::parse_failure:
        case Errc::no_creative:
        case Errc::invalid_window: return 400;
        default: return 500;
    }
}

json error_body(const Error& e) {
    json violations = json::array();
    if (const auto* v = dynamic_cast<const ValidationFailed*>(&e)) {
        for (const auto& x : v->violations()) {
            violations.push_back(json{{"object_index", x.object_index}, {"field", x.field}, {"rule", x.rule}});
        }
    }
    return json{{"error", errc_name(e.code())}, {"message", e.what()}, {"violations", violations}};
}

HttpServer::HttpServer(EdgeService& service) : service_(service), server_(std::make_unique<httplib::Server>()) {
    routes();
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::routes() {
    auto& s = *server_;
    auto& svc = service_;

    s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
            std::rethrow_exception(ep);
        } catch (const Error& e) {
            send_json(res, http_status(e.code()), error_body(e));
        } catch (const json::exception& e) {
            send_json(res, 400, error_body(Error(Errc::invalid_argument, std::string("malformed JSON: ") + e.what())));
        } catch (const std::exception& e) {
            send_json(res, 500, error_body(Error(Errc::io_error, e.what())));
        }
    });

    auto viewer = [&svc](const httplib::Request& req) -> std::optional<std::string> {
        const auto token = bearer(req);
        if (!token) return std::nullopt;
        auto user = svc.authenticate(*token);
        if (!user) throw Error(Errc::unauthorized, "unknown bearer token");
        return user;
    };
    auto required = [viewer](const httplib::Request& req) {
        auto user = viewer(req);
        if (!user) throw Error(Errc::unauthorized, "bearer token required");
        return *user;
    };

    s.Get("/healthz", [](const httplib::Request&, httplib::Response& res) { send_json(res, 200, json{{"status", "ok"}}); });

    s.Post("/v1/users", [&svc](const httplib::Request& req, httplib::Response& res) {
        const auto reg = svc.register_user(user_from_json(json::parse(req.body)));
        send_json(res, 201, json{{"user", to_json(reg.user)}, {"token", reg.token}});
    });

    s.Get("/v1/communities", [&svc, viewer](const httplib::Request& req, httplib::Response& res) {
        json out = json::array();
        for (const auto& c : svc.list_communities(viewer(req))) out.push_back(to_json(c));
        send_json(res, 200, out);
    });

    s.Post("/v1/communities", [&svc, required](const httplib::Request& req, httplib::Response& res) {
        const auto owner = required(req);
        send_json(res, 201, to_json(svc.create_community(owner, community_from_json(json::parse(req.body)))));
    });

    s.Post(R"(/v1/communities/([^/]+)/members)", [&svc, required](const httplib::Request& req, httplib::Response& res) {
        const auto actor = required(req);
        const auto body = json::parse(req.body);
        const auto member = body.value("user_id", actor);
        send_json(res, 200, to_json(svc.add_member(req.matches[1].str(), actor, member)));
    });

    s.Get(R"(/v1/communities/([^/]+)/feed)", [&svc, viewer](const httplib::Request& req, httplib::Response& res) {
        std::optional<double> alpha;
        if (req.has_param("alpha")) {
            alpha = parse_double(req.get_param_value("alpha"));
            if (!alpha) throw Error(Errc::invalid_argument, "alpha must be a number");
        }
        json items = json::array();
        for (const auto& c : svc.feed(req.matches[1].str(), viewer(req), alpha)) items.push_back(to_json(c));
        send_json(res, 200, json{{"community", req.matches[1].str()}, {"items", items}});
    });

    s.Post("/v1/pages", [&svc, required](const httplib::Request& req, httplib::Response& res) {
        const auto author = required(req);
        std::optional<std::string> community;
        if (req.has_param("community")) community = req.get_param_value("community");
        const auto id = svc.publish_page(author, community, req.body);
        send_json(res, 201, json{{"page_id", id}});
    });

    s.Get(R"(/v1/pages/([^/]+))", [&svc, viewer](const httplib::Request& req, httplib::Response& res) {
        const auto served = svc.serve_page(req.matches[1].str(), viewer(req), fidelity_param(req), client_info(req));
        res.status = 200;
        res.set_header("X-Gaius-Request", served.token);
        res.set_header("X-Gaius-Page-Size", std::to_string(served.page_size));
        res.set_header("X-Gaius-Fidelity", std::string(policy::fidelity_name(served.fidelity)));
        res.set_content(served.document, kMaml);
    });

    s.Post("/v1/ads", [&svc, required](const httplib::Request& req, httplib::Response& res) {
        auto campaign = campaign_from_json(json::parse(req.body));
        campaign.advertiser_id = required(req);
        campaign.served_impressions = 0;
        const auto id = svc.submit_campaign(std::move(campaign));
        send_json(res, 201, json{{"ad_id", id}, {"quote", quote_json(svc.quote(id))}});
    });

    s.Post(R"(/v1/ads/([^/]+)/quote)", [&svc](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, quote_json(svc.quote(req.matches[1].str())));
    });

    s.Post("/v1/media", [&svc, required](const httplib::Request& req, httplib::Response& res) {
        required(req);
        std::optional<std::string> poster;
        if (req.has_param("poster")) poster = req.get_param_value("poster");
        const auto id = svc.put_media(req.body, poster);
        send_json(res, 201, to_json(*svc.variants(id)));
    });

    s.Get(R"(/v1/media/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
        const auto blob = svc.get_media(req.matches[1].str(), fidelity_param(req).value_or(policy::Fidelity::high));
        res.status = 200;
        res.set_header("Cache-Control", "public, max-age=31536000, immutable");
        res.set_content(blob.bytes, blob.mime);
    });

    s.Post("/v1/metrics", [&svc](const httplib::Request& req, httplib::Response& res) {
        const auto body = json::parse(req.body);
        auto token = body.value("token", req.get_header_value("X-Gaius-Request"));
        if (!body.contains("plt_ms") || !body["plt_ms"].is_number()) {
            throw Error(Errc::invalid_argument, "plt_ms is required");
        }
        send_json(res, 200, to_json(svc.log_metrics(token, body["plt_ms"].get<double>())));
    });
}

int HttpServer::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = server_->bind_to_any_port(host);
    } else if (!server_->bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) throw Error(Errc::io_error, "cannot bind " + host + ":" + std::to_string(port));
    server_->new_task_queue = [threads = service_.config().threads] {
        return new httplib::ThreadPool(static_cast<std::size_t>(threads));
    };
    listener_ = std::thread([this] { server_->listen_after_bind(); });
    flusher_ = std::thread([this] {
        std::unique_lock lock(mu_);
        while (!cv_.wait_for(lock, std::chrono::seconds(1), [this] { return stopping_; })) {
            lock.unlock();
            try {
                service_.flush_expired();
            } catch (...) {
            }
            lock.lock();
        }
    });
    server_->wait_until_ready();
    return bound;
}

void HttpServer::wait() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [this] { return stopped_; });
}

void HttpServer::stop() {
    {
        std::lock_guard lock(mu_);
        if (stopping_) return;
        stopping_ = true;
    }
    cv_.notify_all();
    server_->stop();
    if (listener_.joinable()) listener_.join();
    if (flusher_.joinable()) flusher_.join();
    service_.flush_all();
    {
        std::lock_guard lock(mu_);
        stopped_ = true;
    }
    cv_.notify_all();
}

}  // namespace gaius::edge
