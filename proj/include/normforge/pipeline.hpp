// Staged compliance evaluation: §112, then §102/103, then §101. A stage runs
// only when every earlier stage passed.
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "normforge/date.hpp"
#include "normforge/engine.hpp"
#include "normforge/fact_model.hpp"
#include "normforge/norm_ir.hpp"

namespace normforge {

enum class StageId { S112, S102_103, S101 };

std::string_view to_string(StageId id) noexcept;        // "S112"
std::string_view stage_constant(StageId id) noexcept;   // "s112", used in stage_passed/2

struct StageSpec {
    StageId stage_id;
    std::string goal_predicate;
    std::vector<std::string> provision_filter;
};

using StagePlan = std::vector<StageSpec>;

StagePlan default_stages();

// Sources equal to this are visible to every stage.
inline constexpr std::string_view kCommonSource = "common";

// True when `source` starts with `prefix` and the prefix ends on a token
// boundary ("35 USC §102" matches "35 USC §102(a)" but not "35 USC §1021").
bool provision_matches(std::string_view source, std::string_view prefix);

enum class StageStatus { Passed, Failed, Skipped };
std::string_view to_string(StageStatus s) noexcept;

struct StageResult {
    StageId stage;
    StageStatus status = StageStatus::Skipped;
    Literal goal;
    TagSet tags;
    std::optional<ProofTree> proof;
    std::vector<Atom> inconsistencies;
};

struct ComplianceReport {
    std::string claim;
    Date as_of;
    std::vector<StageResult> stages;
    bool eligible = false;
};

// A stage passes when its goal is +d and its conclusions hold no strict
// conflict. Extra facts: discretization_gap(id) for every discretization violation and
// stage_passed(stage, claim) for every earlier passed stage. Throws
// Error{Precondition} on an empty or malformed plan; rulebase validation and
// stratification errors are rethrown with the stage named.
ComplianceReport run_pipeline(const Rulebase& rb, const ReferenceSet& rs, const Date& as_of,
                              const StagePlan& plan);

// Canonical JSON: claim, as_of, stages, inconsistencies, eligible.
std::string serialize_report(const ComplianceReport& report);
std::string format_report_text(const ComplianceReport& report);

} // namespace normforge
