#pragma once

#include "gaius/policy/fidelity.hpp"

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>

namespace gaius::edge {

struct EdgeConfig {
    std::filesystem::path store_path = "gaius-store";
    std::string listen_host = "127.0.0.1";
    int listen_port = 8080;
    policy::FidelityProfile profile;
    double base_cpi = 0.01;
    double weekly_infra_cost = 70.0;
    double feed_alpha = 0.5;
    // Served requests wait this long for the client's PLT report before
    // their log record is written without one.
    std::chrono::seconds metrics_ttl{300};
    int threads = 8;
};

// Parses the key = value format:
//
//   # comment
//   [store]
//   path = "/var/lib/gaius"
//   [fidelity.medium]
//   image_scale = 0.5
//
// Throws Error(invalid_argument) naming the line for malformed lines and the
// section and key for unknown keys or values out of range.
EdgeConfig parse_config(std::string_view text);
EdgeConfig load_config(const std::filesystem::path& path);

}  // namespace gaius::edge
