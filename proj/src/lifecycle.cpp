#include "normforge/lifecycle.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <mutex>
#include <sstream>

#include "json.hpp"
#include "normforge/error.hpp"

namespace normforge {

using nlohmann::ordered_json;

std::string_view to_string(ChangeKind kind) noexcept {
    switch (kind) {
    case ChangeKind::Add: return "add";
    case ChangeKind::Repeal: return "repeal";
    case ChangeKind::Amend: return "amend";
    case ChangeKind::AddOverride: return "add_override";
    }
    return "?";
}

ChangeKind kind_of(const ChangeOp& op) noexcept {
    switch (op.op.index()) {
    case 0: return ChangeKind::Add;
    case 1: return ChangeKind::Repeal;
    case 2: return ChangeKind::Amend;
    default: return ChangeKind::AddOverride;
    }
}

namespace {

ordered_json norm_json(const Norm& n) {
    ordered_json j;
    j["id"] = n.id;
    j["source"] = n.source;
    j["jurisdiction"] = n.jurisdiction;
    j["from"] = n.valid_from.to_string();
    if (n.valid_to) j["to"] = n.valid_to->to_string();
    j["rule"] = serialize_rule_xml(n.rule);
    return j;
}

ordered_json op_json(const ChangeOp& op) {
    ordered_json j;
    std::visit(
        [&](const auto& o) {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, AddNorm>) {
                j["op"] = "add_norm";
                j["citation"] = op.citation;
                j["norm"] = norm_json(o.norm);
            } else if constexpr (std::is_same_v<T, RepealNorm>) {
                j["op"] = "repeal_norm";
                j["citation"] = op.citation;
                j["norm_id"] = o.norm_id;
                j["end"] = o.end.to_string();
            } else if constexpr (std::is_same_v<T, AmendNorm>) {
                j["op"] = "amend_norm";
                j["citation"] = op.citation;
                j["norm_id"] = o.norm_id;
                j["replacement"] = norm_json(o.replacement);
            } else {
                j["op"] = "add_override";
                j["citation"] = op.citation;
                j["sup"] = o.pair.first;
                j["inf"] = o.pair.second;
            }
        },
        op.op);
    return j;
}

void expect_keys(const ordered_json& j, std::initializer_list<std::string_view> required,
                 std::initializer_list<std::string_view> optional, const std::string& where) {
    if (!j.is_object()) throw Error(ErrorKind::Schema, where + ": expected an object", where);
    for (auto k : required)
        if (!j.contains(std::string(k)))
            throw Error(ErrorKind::Schema, where + ": missing key '" + std::string(k) + "'", std::string(k));
    for (const auto& [k, v] : j.items()) {
        bool known = std::find(required.begin(), required.end(), k) != required.end() ||
                     std::find(optional.begin(), optional.end(), k) != optional.end();
        if (!known) throw Error(ErrorKind::Schema, where + ": unknown key '" + k + "'", k);
    }
}

std::string text(const ordered_json& j, std::string_view key, const std::string& where) {
    const auto& v = j.at(std::string(key));
    if (!v.is_string())
        throw Error(ErrorKind::Schema, where + ": '" + std::string(key) + "' must be a string", std::string(key));
    return v.get<std::string>();
}

Norm parse_norm(const ordered_json& j, const std::string& where) {
    expect_keys(j, {"id", "from", "rule"}, {"source", "jurisdiction", "to"}, where);
    Norm n;
    n.id = text(j, "id", where);
    if (n.id.empty()) throw Error(ErrorKind::Schema, where + ": empty norm id", "id");
    if (j.contains("source")) n.source = text(j, "source", where);
    if (j.contains("jurisdiction")) n.jurisdiction = text(j, "jurisdiction", where);
    n.valid_from = Date::parse(text(j, "from", where));
    if (j.contains("to")) n.valid_to = Date::parse(text(j, "to", where));
    n.rule = parse_rule_xml(text(j, "rule", where));
    return n;
}

ChangeOp parse_op(const ordered_json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("op") || !j["op"].is_string())
        throw Error(ErrorKind::Schema, where + ": missing op", "op");
    const auto kind = j["op"].get<std::string>();
    ChangeOp op;
    if (kind == "add_norm") {
        expect_keys(j, {"op", "citation", "norm"}, {}, where);
        op.op = AddNorm{parse_norm(j["norm"], where + ".norm")};
    } else if (kind == "repeal_norm") {
        expect_keys(j, {"op", "citation", "norm_id", "end"}, {}, where);
        op.op = RepealNorm{text(j, "norm_id", where), Date::parse(text(j, "end", where))};
    } else if (kind == "amend_norm") {
        expect_keys(j, {"op", "citation", "norm_id", "replacement"}, {}, where);
        op.op = AmendNorm{text(j, "norm_id", where), parse_norm(j["replacement"], where + ".replacement")};
    } else if (kind == "add_override") {
        expect_keys(j, {"op", "citation", "sup", "inf"}, {}, where);
        op.op = AddOverride{{text(j, "sup", where), text(j, "inf", where)}};
    } else {
        throw Error(ErrorKind::Schema, where + ": unknown op '" + kind + "'", kind);
    }
    op.citation = text(j, "citation", where);
    if (op.citation.empty()) throw Error(ErrorKind::Schema, where + ": empty citation", "citation");
    return op;
}

ordered_json parse_json(std::string_view input) {
    try {
        return ordered_json::parse(input);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::Syntax, e.what(), std::to_string(e.byte));
    }
}

ordered_json ops_json(const ChangeSet& cs) {
    ordered_json ops = ordered_json::array();
    for (const auto& op : cs) ops.push_back(op_json(op));
    return ops;
}

ChangeSet parse_ops(const ordered_json& ops) {
    if (!ops.is_array()) throw Error(ErrorKind::Schema, "'ops' must be an array", "ops");
    ChangeSet cs;
    for (std::size_t i = 0; i < ops.size(); ++i) cs.push_back(parse_op(ops[i], "ops[" + std::to_string(i) + "]"));
    return cs;
}

Norm* find_norm_mut(Rulebase& rb, std::string_view id) {
    for (auto& n : rb.norms)
        if (n.id == id) return &n;
    return nullptr;
}

} // namespace

std::string serialize_changeset(const ChangeSet& cs) {
    ordered_json j;
    j["ops"] = ops_json(cs);
    return j.dump(2) + "\n";
}

ChangeSet parse_changeset(std::string_view input) {
    auto j = parse_json(input);
    expect_keys(j, {"ops"}, {}, "changeset");
    return parse_ops(j["ops"]);
}

Rulebase apply_changeset(Rulebase rb, const ChangeSet& cs) {
    for (const auto& op : cs) {
        std::visit(
            [&](const auto& o) {
                using T = std::decay_t<decltype(o)>;
                if constexpr (std::is_same_v<T, AddNorm>) {
                    Norm n = o.norm;
                    if (n.jurisdiction.empty()) n.jurisdiction = rb.jurisdiction;
                    if (rb.jurisdiction.empty()) rb.jurisdiction = n.jurisdiction;
                    rb.norms.push_back(std::move(n));
                } else if constexpr (std::is_same_v<T, RepealNorm>) {
                    Norm* target = find_norm_mut(rb, o.norm_id);
                    if (!target) throw Error(ErrorKind::UnknownTarget, "repeal of unknown norm " + o.norm_id, o.norm_id);
                    if (!(o.end > target->valid_from))
                        throw Error(ErrorKind::Precondition, "repeal of " + o.norm_id + " before it takes effect",
                                    o.norm_id);
                    if (target->valid_to && o.end > *target->valid_to)
                        throw Error(ErrorKind::Precondition, "repeal of " + o.norm_id + " after it already ended",
                                    o.norm_id);
                    target->valid_to = o.end;
                } else if constexpr (std::is_same_v<T, AmendNorm>) {
                    Norm* target = find_norm_mut(rb, o.norm_id);
                    if (!target) throw Error(ErrorKind::UnknownTarget, "amendment of unknown norm " + o.norm_id, o.norm_id);
                    Norm n = o.replacement;
                    if (!n.source.empty() && n.source != target->source)
                        throw Error(ErrorKind::Precondition, "replacement changes the provision of " + o.norm_id,
                                    n.id);
                    if (n.rule.id == target->rule.id)
                        throw Error(ErrorKind::Precondition, "replacement reuses rule id " + n.rule.id, n.rule.id);
                    if (!(n.valid_from > target->valid_from))
                        throw Error(ErrorKind::Precondition, "amendment of " + o.norm_id + " before it takes effect",
                                    o.norm_id);
                    if (target->valid_to && n.valid_from > *target->valid_to)
                        throw Error(ErrorKind::Precondition, "amendment of " + o.norm_id + " after it already ended",
                                    o.norm_id);
                    n.source = target->source;
                    if (n.jurisdiction.empty()) n.jurisdiction = target->jurisdiction;
                    target->valid_to = n.valid_from;
                    rb.norms.push_back(std::move(n));
                } else {
                    if (std::find(rb.overrides.begin(), rb.overrides.end(), o.pair) == rb.overrides.end())
                        rb.overrides.push_back(o.pair);
                }
            },
            op.op);
    }
    return rb;
}

std::string utc_timestamp_now() {
    auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
    auto day = std::chrono::floor<std::chrono::days>(now);
    std::chrono::hh_mm_ss hms(now - day);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", Date(std::chrono::year_month_day(day)).to_string().c_str(),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

VersionedStore::VersionedStore() = default;

VersionedStore::VersionedStore(std::filesystem::path path) : path_(std::move(path)) { replay_log(); }

void VersionedStore::replay_log() {
    std::ifstream in(*path_);
    if (!in) return;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            auto j = parse_json(line);
            expect_keys(j, {"version", "timestamp", "ops"}, {}, "log");
            if (!j["version"].is_number_unsigned() || j["version"].get<VersionId>() != revisions_.size() + 1)
                throw Error(ErrorKind::Schema, "unexpected version", "version");
            Revision rev{j["version"].get<VersionId>(), parse_ops(j["ops"]), text(j, "timestamp", "log")};
            Rulebase next = apply_changeset(head_, rev.changes);
            check_rulebase_invariants(next);
            head_ = std::move(next);
            revisions_.push_back(std::move(rev));
        } catch (const std::exception& e) {
            read_only_ = true;
            warning_ = path_->string() + ":" + std::to_string(lineno) + ": corrupt log entry (" + e.what() +
                       "); store opened read-only at version " + std::to_string(revisions_.size());
            return;
        }
    }
}

VersionId VersionedStore::head_version() const {
    std::shared_lock lock(mutex_);
    return revisions_.size();
}

Rulebase VersionedStore::head() const {
    std::shared_lock lock(mutex_);
    return head_;
}

std::vector<Revision> VersionedStore::revisions() const {
    std::shared_lock lock(mutex_);
    return revisions_;
}

bool VersionedStore::read_only() const {
    std::shared_lock lock(mutex_);
    return read_only_;
}

std::string VersionedStore::open_warning() const {
    std::shared_lock lock(mutex_);
    return warning_;
}

void VersionedStore::set_commit_hook(std::function<void(const Rulebase&)> hook) {
    std::unique_lock lock(mutex_);
    hook_ = std::move(hook);
}

VersionId VersionedStore::commit(const ChangeSet& cs, std::string timestamp) {
    std::unique_lock lock(mutex_);
    if (read_only_) throw Error(ErrorKind::ReadOnly, "store is read-only: " + warning_);
    if (cs.empty()) throw Error(ErrorKind::Precondition, "empty changeset");
    for (const auto& op : cs)
        if (op.citation.empty()) throw Error(ErrorKind::Precondition, "op without citation");

    Rulebase next = apply_changeset(head_, cs);
    check_rulebase_invariants(next);
    for (const auto& n : next.norms)
        if (n.jurisdiction != next.jurisdiction)
            throw Error(ErrorKind::PostValidation,
                        "norm " + n.id + " belongs to jurisdiction " + n.jurisdiction + ", store is " + next.jurisdiction,
                        n.id);
    auto violations = validate_rulebase(next);
    if (!violations.empty())
        throw Error(ErrorKind::PostValidation, violations.front().subject + ": " + violations.front().message,
                    violations.front().subject);
    if (hook_) {
        try {
            hook_(next);
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw Error(ErrorKind::PostValidation, std::string("commit check failed: ") + e.what());
        }
    }

    Revision rev{revisions_.size() + 1, cs, timestamp.empty() ? utc_timestamp_now() : std::move(timestamp)};
    if (path_) {
        ordered_json j;
        j["version"] = rev.version;
        j["timestamp"] = rev.timestamp;
        j["ops"] = ops_json(rev.changes);
        std::string line = j.dump() + "\n";
        std::error_code ec;
        if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path(), ec);
        std::ofstream out(*path_, std::ios::app | std::ios::binary);
        out << line;
        out.flush();
        if (!out) throw Error(ErrorKind::Io, "cannot append to " + path_->string(), path_->string());
    }
    head_ = std::move(next);
    revisions_.push_back(std::move(rev));
    return revisions_.size();
}

Rulebase VersionedStore::as_of(const Date& d) const {
    std::shared_lock lock(mutex_);
    return restrict_in_force(head_, d);
}

ChangeSet VersionedStore::diff(VersionId v1, VersionId v2) const {
    std::shared_lock lock(mutex_);
    if (v1 > v2)
        throw Error(ErrorKind::Precondition, "diff range is reversed: " + std::to_string(v1) + " > " + std::to_string(v2));
    if (v2 > revisions_.size())
        throw Error(ErrorKind::UnknownVersion, "unknown version " + std::to_string(v2), std::to_string(v2));
    ChangeSet out;
    for (VersionId v = v1; v < v2; ++v) out.insert(out.end(), revisions_[v].changes.begin(), revisions_[v].changes.end());
    return out;
}

Rulebase VersionedStore::materialize(VersionId v) const {
    std::shared_lock lock(mutex_);
    if (v > revisions_.size())
        throw Error(ErrorKind::UnknownVersion, "unknown version " + std::to_string(v), std::to_string(v));
    Rulebase rb;
    for (VersionId i = 0; i < v; ++i) rb = apply_changeset(std::move(rb), revisions_[i].changes);
    return rb;
}

ProvenanceChain VersionedStore::trace(std::string_view norm_id) const {
    std::shared_lock lock(mutex_);
    ProvenanceChain chain;
    chain.norm_id = std::string(norm_id);
    for (const auto& rev : revisions_) {
        for (const auto& op : rev.changes) {
            std::visit(
                [&](const auto& o) {
                    using T = std::decay_t<decltype(o)>;
                    if constexpr (std::is_same_v<T, AddNorm>) {
                        if (o.norm.id == norm_id) chain.events.push_back({rev.version, ChangeKind::Add, op.citation});
                    } else if constexpr (std::is_same_v<T, RepealNorm>) {
                        if (o.norm_id == norm_id) chain.events.push_back({rev.version, ChangeKind::Repeal, op.citation});
                    } else if constexpr (std::is_same_v<T, AmendNorm>) {
                        if (o.norm_id == norm_id) {
                            chain.events.push_back({rev.version, ChangeKind::Amend, op.citation});
                            chain.successor = o.replacement.id;
                        } else if (o.replacement.id == norm_id) {
                            chain.events.push_back({rev.version, ChangeKind::Amend, op.citation});
                            chain.predecessor = o.norm_id;
                        }
                    }
                },
                op.op);
        }
    }
    const Norm* n = head_.find_norm(norm_id);
    if (!n || chain.events.empty())
        throw Error(ErrorKind::UnknownNorm, "unknown norm " + std::string(norm_id), std::string(norm_id));
    chain.provision = n->source;
    return chain;
}

std::string format_provenance(const ProvenanceChain& chain) {
    std::ostringstream out;
    out << "norm " << chain.norm_id << " (" << chain.provision << ")\n";
    if (chain.predecessor) out << "  amends " << *chain.predecessor << "\n";
    for (const auto& e : chain.events)
        out << "  v" << e.version << " " << to_string(e.kind) << ": " << e.citation << "\n";
    if (chain.successor) out << "  amended by " << *chain.successor << "\n";
    return out.str();
}

} // namespace normforge
