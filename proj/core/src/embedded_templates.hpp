#pragma once

#include <span>
#include <string_view>

namespace designflow::detail {

struct EmbeddedTemplate {
    std::string_view name;  // file stem, e.g. "design_integrator"
    std::string_view body;
};

std::span<const EmbeddedTemplate> embedded_templates() noexcept;

}  // namespace designflow::detail
