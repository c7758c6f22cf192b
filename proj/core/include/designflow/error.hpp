#pragma once

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace designflow {

/// Stable machine-readable error codes. The string form (see code_name) is
/// part of the public API and must not change once released.
enum class Errc {
    invalid_argument,
    // text entries
    no_colon,
    empty_part,
    empty_after_trim,
    empty_brief,
    invalid_text_format,
    // selection
    missing_composition,
    type_mismatch,
    unknown_card,
    no_text,
    duplicate_selection,
    not_selected,
    // prompt rendering
    missing_field,
    missing_context,
    missing_variable,
    // providers
    timeout,
    schema_violation,
    transport_error,
    // pipeline
    unknown_entry,
    duplicate_entry,
    unsupported_for_text,
    invalid_state,
    no_prior_design,
    // analytics
    dimension_mismatch,
    too_few_items,
    // persistence
    not_found,
    corrupt_record,
    missing_blob,
    id_collision,
    storage_error,
    // service
    session_not_found,
    job_not_found,
    image_not_found,
    bad_request,
};

std::string_view code_name(Errc code) noexcept;

/// True for errors that originate in a model provider.
bool is_provider_error(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message, nlohmann::json details = nullptr)
        : std::runtime_error(message), code_(code), details_(std::move(details)) {}

    Errc code() const noexcept { return code_; }
    const nlohmann::json& details() const noexcept { return details_; }

private:
    Errc code_;
    nlohmann::json details_;
};

}  // namespace designflow
