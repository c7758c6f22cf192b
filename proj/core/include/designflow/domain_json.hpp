#pragma once

// JSON mapping of the domain types. Field names match the domain types
// one-to-one and are shared by the persistence format and the HTTP API.

#include "designflow/domain.hpp"

#include <nlohmann/json.hpp>

namespace designflow {

void to_json(nlohmann::json& j, const RequirementEntry& e);
void from_json(const nlohmann::json& j, RequirementEntry& e);

void to_json(nlohmann::json& j, const RequirementCardSet& set);
void from_json(const nlohmann::json& j, RequirementCardSet& set);

void to_json(nlohmann::json& j, const ImageRef& ref);
void from_json(const nlohmann::json& j, ImageRef& ref);

void to_json(nlohmann::json& j, const ElementCard& card);
void from_json(const nlohmann::json& j, ElementCard& card);

void to_json(nlohmann::json& j, const SelectionSet& sel);
void from_json(const nlohmann::json& j, SelectionSet& sel);

void to_json(nlohmann::json& j, const ValidatedSelection& sel);

void to_json(nlohmann::json& j, const SelectedElementSnapshot& s);
void from_json(const nlohmann::json& j, SelectedElementSnapshot& s);

void to_json(nlohmann::json& j, const SelectionSnapshot& s);
void from_json(const nlohmann::json& j, SelectionSnapshot& s);

void to_json(nlohmann::json& j, const IntegratedPrompt& p);
void from_json(const nlohmann::json& j, IntegratedPrompt& p);

void to_json(nlohmann::json& j, const DesignArtifact& a);
void from_json(const nlohmann::json& j, DesignArtifact& a);

void to_json(nlohmann::json& j, const DeliverableContext& c);
void from_json(const nlohmann::json& j, DeliverableContext& c);

void to_json(nlohmann::json& j, const Session& s);
void from_json(const nlohmann::json& j, Session& s);

}  // namespace designflow
