#include "designflow/error.hpp"

namespace designflow {

std::string_view code_name(Errc code) noexcept {
    switch (code) {
        case Errc::invalid_argument: return "invalid_argument";
        case Errc::no_colon: return "no_colon";
        case Errc::empty_part: return "empty_part";
        case Errc::empty_after_trim: return "empty_after_trim";
        case Errc::empty_brief: return "empty_brief";
        case Errc::invalid_text_format: return "invalid_text_format";
        case Errc::missing_composition: return "missing_composition";
        case Errc::type_mismatch: return "type_mismatch";
        case Errc::unknown_card: return "unknown_card";
        case Errc::no_text: return "no_text";
        case Errc::duplicate_selection: return "duplicate_selection";
        case Errc::not_selected: return "not_selected";
        case Errc::missing_field: return "missing_field";
        case Errc::missing_context: return "missing_context";
        case Errc::missing_variable: return "missing_variable";
        case Errc::timeout: return "timeout";
        case Errc::schema_violation: return "schema_violation";
        case Errc::transport_error: return "transport_error";
        case Errc::unknown_entry: return "unknown_entry";
        case Errc::duplicate_entry: return "duplicate_entry";
        case Errc::unsupported_for_text: return "unsupported_for_text";
        case Errc::invalid_state: return "invalid_state";
        case Errc::no_prior_design: return "no_prior_design";
        case Errc::dimension_mismatch: return "dimension_mismatch";
        case Errc::too_few_items: return "too_few_items";
        case Errc::not_found: return "not_found";
        case Errc::corrupt_record: return "corrupt_record";
        case Errc::missing_blob: return "missing_blob";
        case Errc::id_collision: return "id_collision";
        case Errc::storage_error: return "storage_error";
        case Errc::session_not_found: return "session_not_found";
        case Errc::job_not_found: return "job_not_found";
        case Errc::image_not_found: return "image_not_found";
        case Errc::bad_request: return "bad_request";
    }
    return "unknown";
}

bool is_provider_error(Errc code) noexcept {
    return code == Errc::timeout || code == Errc::schema_violation ||
           code == Errc::transport_error;
}

}  // namespace designflow
