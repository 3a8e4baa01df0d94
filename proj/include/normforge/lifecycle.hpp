// Versioned norm store. Each commit appends one changeset; repeal closes a
// norm's validity interval and never deletes it, so historical as-of queries
// keep working. The on-disk form is an append-only JSON-lines log that is
// replayed on open.
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "normforge/date.hpp"
#include "normforge/norm_ir.hpp"

namespace normforge {

using VersionId = std::uint64_t;  // 0 is the empty store

struct AddNorm {
    Norm norm;
    friend bool operator==(const AddNorm&, const AddNorm&) = default;
};
struct RepealNorm {
    std::string norm_id;
    Date end;
    friend bool operator==(const RepealNorm&, const RepealNorm&) = default;
};
// Closes the target at replacement.valid_from and adds the replacement, which
// inherits the target's provision.
struct AmendNorm {
    std::string norm_id;
    Norm replacement;
    friend bool operator==(const AmendNorm&, const AmendNorm&) = default;
};
struct AddOverride {
    OverridePair pair;
    friend bool operator==(const AddOverride&, const AddOverride&) = default;
};

struct ChangeOp {
    std::variant<AddNorm, RepealNorm, AmendNorm, AddOverride> op;
    std::string citation;  // the decision or statute change behind this op
    friend bool operator==(const ChangeOp&, const ChangeOp&) = default;
};

using ChangeSet = std::vector<ChangeOp>;

enum class ChangeKind { Add, Repeal, Amend, AddOverride };
std::string_view to_string(ChangeKind kind) noexcept;
ChangeKind kind_of(const ChangeOp& op) noexcept;

// {"ops": [...]}; embedded rules use the LRML-S <rule> markup.
std::string serialize_changeset(const ChangeSet& cs);
ChangeSet parse_changeset(std::string_view input);

// Applies ops in order. Throws Error{UnknownTarget} for repeal/amend of a
// missing norm and Error{Precondition} for malformed ops. Does not run
// rulebase validation.
Rulebase apply_changeset(Rulebase rb, const ChangeSet& cs);

struct Revision {
    VersionId version = 0;
    ChangeSet changes;
    std::string timestamp;
    friend bool operator==(const Revision&, const Revision&) = default;
};

struct ProvenanceEvent {
    VersionId version = 0;
    ChangeKind kind = ChangeKind::Add;
    std::string citation;
    friend bool operator==(const ProvenanceEvent&, const ProvenanceEvent&) = default;
};

struct ProvenanceChain {
    std::string norm_id;
    std::string provision;
    std::vector<ProvenanceEvent> events;
    std::optional<std::string> predecessor;  // norm this one amended
    std::optional<std::string> successor;    // norm that amended this one
};

class VersionedStore {
public:
    // Empty in-memory store.
    VersionedStore();
    // Opens (or creates on first commit) the log at `path`. A corrupt line
    // stops replay: the store opens read-only at the last good version and
    // open_warning() describes the problem.
    explicit VersionedStore(std::filesystem::path path);

    VersionedStore(const VersionedStore&) = delete;
    VersionedStore& operator=(const VersionedStore&) = delete;

    VersionId head_version() const;
    Rulebase head() const;
    std::vector<Revision> revisions() const;

    bool read_only() const;
    std::string open_warning() const;

    // Atomic: on any error the store (and its log) is unchanged.
    VersionId commit(const ChangeSet& cs, std::string timestamp = {});

    Rulebase as_of(const Date& d) const;
    // Changesets (v1, v2]. Error{Precondition} if v1 > v2,
    // Error{UnknownVersion} past the head.
    ChangeSet diff(VersionId v1, VersionId v2) const;
    // Error{UnknownNorm} for a norm id that never existed.
    ProvenanceChain trace(std::string_view norm_id) const;
    // Replay of the first v changesets onto an empty rulebase.
    Rulebase materialize(VersionId v) const;

    // Extra post-commit check, run after validate_rulebase; throwing rejects
    // the commit.
    void set_commit_hook(std::function<void(const Rulebase&)> hook);

private:
    void replay_log();

    mutable std::shared_mutex mutex_;
    std::optional<std::filesystem::path> path_;
    std::vector<Revision> revisions_;
    Rulebase head_;
    bool read_only_ = false;
    std::string warning_;
    std::function<void(const Rulebase&)> hook_;
};

std::string format_provenance(const ProvenanceChain& chain);

// UTC timestamp, "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp_now();

} // namespace normforge
