#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gaius {

// One code per failure the public operations can report.
enum class Errc {
    invariant_violation,
    missing_media_size,
    empty_snapshot,
    unscalable_viewport,
    parse_failure,
    unsupported_image_format,
    zero_dimension,
    page_not_found,
    missing_variant,
    no_creative,
    invalid_window,
    unknown_ad,
    target_reached,
    not_found,
    forbidden,
    unauthorized,
    validation_failed,
    unknown_community,
    unknown_token,
    cyclic_graph,
    empty_corpus,
    io_error,
    invalid_argument,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace gaius
