#pragma once

#include <nlohmann/json.hpp>

#include <compare>
#include <functional>
#include <string>
#include <string_view>

namespace designflow {

/// Opaque string identifier tagged by the entity it names.
template <class Tag>
class Id {
public:
    Id() = default;
    explicit Id(std::string value) : value_(std::move(value)) {}

    const std::string& str() const noexcept { return value_; }
    bool empty() const noexcept { return value_.empty(); }

    friend auto operator<=>(const Id&, const Id&) = default;
    friend bool operator==(const Id&, const Id&) = default;

private:
    std::string value_;
};

template <class Tag>
void to_json(nlohmann::json& j, const Id<Tag>& id) {
    j = id.str();
}

template <class Tag>
void from_json(const nlohmann::json& j, Id<Tag>& id) {
    id = Id<Tag>(j.get<std::string>());
}

using SessionId = Id<struct SessionTag>;
using EntryId = Id<struct EntryTag>;
using CardId = Id<struct CardTag>;
using ArtifactId = Id<struct ArtifactTag>;
using PromptId = Id<struct PromptTag>;

}  // namespace designflow

template <class Tag>
struct std::hash<designflow::Id<Tag>> {
    std::size_t operator()(const designflow::Id<Tag>& id) const noexcept {
        return std::hash<std::string>{}(id.str());
    }
};
