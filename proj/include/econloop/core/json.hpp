#pragma once

// JSON mappings for every domain type. Field names are the persisted schema
// of state.json, review_v{n}.json and questions/round_{r}.json.

#include <nlohmann/json.hpp>

#include "econloop/core/run_state.hpp"

namespace econloop {

using nlohmann::json;

void to_json(json& j, const VariableInfo& v);
void from_json(const json& j, VariableInfo& v);
void to_json(json& j, const PanelStructure& v);
void from_json(const json& j, PanelStructure& v);
void to_json(json& j, const DatasetAudit& v);
void from_json(const json& j, DatasetAudit& v);

void to_json(json& j, const VariableProfile& v);
void from_json(const json& j, VariableProfile& v);
void to_json(json& j, const Correlation& v);
void from_json(const json& j, Correlation& v);
void to_json(json& j, const EndogeneityFlag& v);
void from_json(const json& j, EndogeneityFlag& v);
void to_json(json& j, const TransformSuggestion& v);
void from_json(const json& j, TransformSuggestion& v);
void to_json(json& j, const MissingnessNote& v);
void from_json(const json& j, MissingnessNote& v);
void to_json(json& j, const DataProfile& v);
void from_json(const json& j, DataProfile& v);

void to_json(json& j, const ResearchQuestion& v);
void from_json(const json& j, ResearchQuestion& v);
void to_json(json& j, const FeasibilityReport& v);
void from_json(const json& j, FeasibilityReport& v);
void to_json(json& j, const ScreenedCandidate& v);
void from_json(const json& j, ScreenedCandidate& v);
void to_json(json& j, const QuestionRound& v);
void from_json(const json& j, QuestionRound& v);

void to_json(json& j, const Specification& v);
void from_json(const json& j, Specification& v);
void to_json(json& j, const AnalysisPlan& v);
void from_json(const json& j, AnalysisPlan& v);
void to_json(json& j, const Coefficient& v);
void from_json(const json& j, Coefficient& v);
void to_json(json& j, const AnalysisResult& v);
void from_json(const json& j, AnalysisResult& v);

void to_json(json& j, const Draft& v);
void from_json(const json& j, Draft& v);
void to_json(json& j, const RevisionRequest& v);
void from_json(const json& j, RevisionRequest& v);
void to_json(json& j, const ReviewReport& v);
void from_json(const json& j, ReviewReport& v);
void to_json(json& j, const CritiqueNote& v);
void from_json(const json& j, CritiqueNote& v);

void to_json(json& j, const RunEvent& v);
void from_json(const json& j, RunEvent& v);
void to_json(json& j, const GateDecision& v);
void from_json(const json& j, GateDecision& v);
void to_json(json& j, const LedgerEntry& v);
void from_json(const json& j, LedgerEntry& v);
void to_json(json& j, const CostLedger& v);
void from_json(const json& j, CostLedger& v);
void to_json(json& j, const SampleReport& v);
void from_json(const json& j, SampleReport& v);
void to_json(json& j, const RunState& v);
void from_json(const json& j, RunState& v);

}  // namespace econloop
