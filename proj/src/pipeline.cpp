#include "normforge/pipeline.hpp"

#include <cctype>
#include <set>
#include <sstream>

#include "json.hpp"
#include "normforge/error.hpp"

namespace normforge {

std::string_view to_string(StageId id) noexcept {
    switch (id) {
    case StageId::S112: return "S112";
    case StageId::S102_103: return "S102_103";
    case StageId::S101: return "S101";
    }
    return "?";
}

std::string_view stage_constant(StageId id) noexcept {
    switch (id) {
    case StageId::S112: return "s112";
    case StageId::S102_103: return "s102_103";
    case StageId::S101: return "s101";
    }
    return "?";
}

std::string_view to_string(StageStatus s) noexcept {
    switch (s) {
    case StageStatus::Passed: return "passed";
    case StageStatus::Failed: return "failed";
    case StageStatus::Skipped: return "skipped";
    }
    return "?";
}

StagePlan default_stages() {
    return {
        {StageId::S112, "compliant_112", {"35 USC §112"}},
        {StageId::S102_103, "patentable_102_103", {"35 USC §102", "35 USC §103"}},
        {StageId::S101, "eligible_101", {"35 USC §101"}},
    };
}

bool provision_matches(std::string_view source, std::string_view prefix) {
    if (prefix.empty() || source.substr(0, prefix.size()) != prefix) return false;
    if (source.size() == prefix.size()) return true;
    auto next = static_cast<unsigned char>(source[prefix.size()]);
    return !std::isalnum(next);
}

namespace {

Rulebase stage_rulebase(const Rulebase& rb, const StageSpec& entry) {
    Rulebase out;
    out.jurisdiction = rb.jurisdiction;
    std::set<std::string> rules;
    for (const auto& n : rb.norms) {
        bool visible = n.source == kCommonSource;
        for (const auto& p : entry.provision_filter) visible = visible || provision_matches(n.source, p);
        if (!visible) continue;
        out.norms.push_back(n);
        rules.insert(n.rule.id);
    }
    for (const auto& o : rb.overrides)
        if (rules.count(o.first) && rules.count(o.second)) out.overrides.push_back(o);
    return out;
}

std::string stage_prefix(StageId id) { return "stage " + std::string(to_string(id)) + ": "; }

} // namespace

ComplianceReport run_pipeline(const Rulebase& rb, const ReferenceSet& rs, const Date& as_of, const StagePlan& plan) {
    if (plan.empty()) throw Error(ErrorKind::Precondition, "empty stage plan");
    std::set<StageId> seen;
    for (const auto& s : plan) {
        if (!seen.insert(s.stage_id).second)
            throw Error(ErrorKind::Precondition, "stage listed twice", std::string(to_string(s.stage_id)));
        if (s.goal_predicate.empty())
            throw Error(ErrorKind::Precondition, "stage without goal", std::string(to_string(s.stage_id)));
    }

    ComplianceReport report;
    report.claim = rs.patent.claim_id;
    report.as_of = as_of;

    FactBase base = ground_atoms(rs, close_taxonomy(rs));
    for (const auto& v : validate_discretization(rs)) base.insert(make_ground_atom("discretization_gap", {v.id}));

    std::vector<StageId> passed;
    bool blocked = false;
    for (const auto& entry : plan) {
        StageResult result;
        result.stage = entry.stage_id;
        result.goal.atom = make_ground_atom(entry.goal_predicate, {rs.patent.claim_id});
        if (blocked) {
            report.stages.push_back(std::move(result));
            continue;
        }

        Rulebase srb = stage_rulebase(rb, entry);
        auto violations = validate_rulebase(srb);
        if (!violations.empty())
            throw Error(ErrorKind::Validation,
                        stage_prefix(entry.stage_id) + violations.front().subject + ": " + violations.front().message,
                        violations.front().subject);

        FactBase facts = base;
        for (auto p : passed)
            facts.insert(make_ground_atom("stage_passed", {std::string(stage_constant(p)), rs.patent.claim_id}));

        ConclusionSet cs;
        GroundProgram gp;
        try {
            gp = ground(translate_to_core(srb, as_of), facts);
            cs = infer(gp);
        } catch (const Error& e) {
            throw Error(e.kind(), stage_prefix(entry.stage_id) + e.what(), e.token());
        }

        result.tags = cs.in_vocabulary(result.goal) ? query(cs, result.goal)
                                                    : TagSet{ProofTag::MinusDelta, ProofTag::MinusPartial};
        result.inconsistencies = cs.inconsistencies();
        if (result.tags.contains(ProofTag::PlusPartial) && result.inconsistencies.empty()) {
            result.status = StageStatus::Passed;
            result.proof = explain(gp, cs, result.goal);
            passed.push_back(entry.stage_id);
        } else {
            result.status = StageStatus::Failed;
            blocked = true;
        }
        report.stages.push_back(std::move(result));
    }
    report.eligible = !blocked;
    return report;
}

std::string serialize_report(const ComplianceReport& report) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["claim"] = report.claim;
    j["as_of"] = report.as_of.to_string();
    j["stages"] = ordered_json::array();
    j["inconsistencies"] = ordered_json::array();
    for (const auto& s : report.stages) {
        ordered_json st;
        st["stage"] = std::string(to_string(s.stage));
        st["status"] = std::string(to_string(s.status));
        st["goal"] = format_literal(s.goal);
        st["tags"] = ordered_json::array();
        for (auto t : s.tags.list()) st["tags"].push_back(std::string(to_string(t)));
        if (s.proof) st["proof"] = ordered_json::parse(export_proof_json(*s.proof));
        j["stages"].push_back(std::move(st));
        for (const auto& a : s.inconsistencies)
            j["inconsistencies"].push_back({{"stage", std::string(to_string(s.stage))}, {"literal", format_atom(a)}});
    }
    j["eligible"] = report.eligible;
    return j.dump(2) + "\n";
}

std::string format_report_text(const ComplianceReport& report) {
    std::ostringstream out;
    out << "claim " << report.claim << " as of " << report.as_of.to_string() << "\n";
    for (const auto& s : report.stages) {
        out << to_string(s.stage) << " " << to_string(s.status) << " " << format_literal(s.goal);
        if (s.status != StageStatus::Skipped) out << " " << format_tags(s.tags);
        out << "\n";
        if (s.proof) {
            std::istringstream lines(export_proof(*s.proof));
            for (std::string line; std::getline(lines, line);) out << "    " << line << "\n";
        }
        for (const auto& a : s.inconsistencies) out << "  inconsistent: " << format_atom(a) << "\n";
    }
    out << "eligible: " << (report.eligible ? "yes" : "no") << "\n";
    return out.str();
}

} // namespace normforge
