#include "gaius/edge/config.hpp"

#include "gaius/common/error.hpp"
#include "gaius/common/fs.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <sstream>

namespace gaius::edge {

namespace {

namespace pt = boost::property_tree;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
    throw Error(Errc::invalid_argument, "config " + where + ": " + what);
}

std::string unquote(std::string v) {
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\''))) {
        return v.substr(1, v.size() - 2);
    }
    return v;
}

double number(const std::string& where, const std::string& raw) {
    const auto v = unquote(raw);
    double out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) bad(where, "expected a number, got '" + v + "'");
    return out;
}

long integer(const std::string& where, const std::string& raw) {
    const auto v = unquote(raw);
    long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) bad(where, "expected an integer, got '" + v + "'");
    return out;
}

void apply(EdgeConfig& cfg, const std::string& section, const std::string& key, const std::string& raw) {
    const auto where = "[" + section + "] " + key;
    if (section == "store" && key == "path") {
        cfg.store_path = unquote(raw);
        if (cfg.store_path.empty()) bad(where, "empty path");
    } else if (section == "server" && key == "host") {
        cfg.listen_host = unquote(raw);
    } else if (section == "server" && key == "port") {
        const auto port = integer(where, raw);
        if (port < 0 || port > 65535) bad(where, "port out of range");
        cfg.listen_port = static_cast<int>(port);
    } else if (section == "server" && key == "threads") {
        const auto n = integer(where, raw);
        if (n < 1 || n > 1024) bad(where, "threads out of range");
        cfg.threads = static_cast<int>(n);
    } else if (section.starts_with("fidelity.") && (key == "image_scale" || key == "image_quality")) {
        policy::Fidelity f{};
        try {
            f = policy::parse_fidelity(section.substr(9));
        } catch (const Error&) {
            bad(where, "unknown fidelity level");
        }
        if (key == "image_scale") {
            cfg.profile.at(f).image_scale = number(where, raw);
        } else {
            cfg.profile.at(f).image_quality = static_cast<int>(integer(where, raw));
        }
    } else if (section == "pricing" && key == "base_cpi") {
        cfg.base_cpi = number(where, raw);
        if (!(cfg.base_cpi >= 0)) bad(where, "must be non-negative");
    } else if (section == "pricing" && key == "weekly_infra_cost") {
        cfg.weekly_infra_cost = number(where, raw);
        if (!(cfg.weekly_infra_cost >= 0)) bad(where, "must be non-negative");
    } else if (section == "feed" && key == "alpha") {
        cfg.feed_alpha = number(where, raw);
        if (!(cfg.feed_alpha >= 0 && cfg.feed_alpha <= 1)) bad(where, "must be in [0, 1]");
    } else if (section == "metrics" && key == "ttl_s") {
        const auto ttl = integer(where, raw);
        if (ttl < 1) bad(where, "must be positive");
        cfg.metrics_ttl = std::chrono::seconds(ttl);
    } else {
        bad(where, "unknown key");
    }
}

}  // namespace

EdgeConfig parse_config(std::string_view text) {
    pt::ptree tree;
    std::istringstream in{std::string(text)};
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        bad("line " + std::to_string(e.line()), e.message());
    }
    EdgeConfig cfg;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) bad(section, "key outside a section");
        for (const auto& [key, value] : body) apply(cfg, section, key, value.data());
    }
    try {
        cfg.profile.check();
    } catch (const Error& e) {
        bad("[fidelity]", e.what());
    }
    return cfg;
}

EdgeConfig load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error& e) {
        throw Error(Errc::io_error, "cannot read config " + path.string() + ": " + e.what());
    }
    return parse_config(text);
}

}  // namespace gaius::edge
