#include "normforge/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "normforge/engine.hpp"
#include "normforge/error.hpp"
#include "normforge/fact_model.hpp"
#include "normforge/lifecycle.hpp"
#include "normforge/norm_ir.hpp"
#include "normforge/pipeline.hpp"

namespace normforge::cli {

namespace {

using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path, path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path, path);
}

FactBase compile_facts(const ReferenceSet& rs) {
    FactBase fb = ground_atoms(rs, close_taxonomy(rs));
    for (const auto& v : validate_discretization(rs)) fb.insert(make_ground_atom("discretization_gap", {v.id}));
    return fb;
}

Date as_of_date(const std::string& text) { return text.empty() ? Date::today() : Date::parse(text); }

std::string store_path(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("NORMFORGE_STORE"); env && *env) return env;
    throw Error(ErrorKind::Precondition, "no store given (use --store or NORMFORGE_STORE)");
}

VersionId parse_version(const std::string& text) {
    VersionId v = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size())
        throw Error(ErrorKind::Syntax, "not a version number: " + text, text);
    return v;
}

struct Options {
    std::string facts, norms, as_of, format, goal, report, changeset, store, date, norm_id, v1, v2, timestamp;
};

struct FormatDefault {
    CLI::App* cmd;
    CLI::Option* option;
    std::string fallback;
};

FormatDefault add_format(CLI::App* cmd, Options& o, std::string fallback) {
    auto* opt = cmd->add_option("--format", o.format, "Output format (default " + fallback + ")")
                    ->check(CLI::IsMember({"text", "json"}));
    return {cmd, opt, std::move(fallback)};
}

int run_validate(const Options& o, std::ostream& out) {
    auto rs = parse_fact_file(read_file(o.facts));
    close_taxonomy(rs);
    auto rb = parse_lrmls(read_file(o.norms));
    auto violations = validate_rulebase(rb);
    try {
        std::vector<Rule> rules;
        for (const auto& n : rb.norms) rules.push_back(n.rule);
        stratify(std::span<const Rule>(rules));
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Stratification) throw;
        violations.push_back({e.token(), "negation-as-failure cycle"});
    }
    auto gaps = validate_discretization(rs);
    if (o.format == "json") {
        ordered_json j;
        j["violations"] = ordered_json::array();
        for (const auto& v : violations) j["violations"].push_back({{"subject", v.subject}, {"message", v.message}});
        j["discretization_gaps"] = ordered_json::array();
        for (const auto& g : gaps) j["discretization_gaps"].push_back({{"id", g.id}, {"message", g.message}});
        out << j.dump(2) << "\n";
    } else {
        for (const auto& v : violations) out << "violation " << v.subject << ": " << v.message << "\n";
        for (const auto& g : gaps) out << "gap " << g.id << ": " << g.message << "\n";
        if (violations.empty()) out << "ok\n";
    }
    return violations.empty() ? kSuccess : kInputError;
}

int run_infer(const Options& o, std::ostream& out) {
    auto rs = parse_fact_file(read_file(o.facts));
    auto rb = parse_lrmls(read_file(o.norms));
    auto gp = ground(translate_to_core(rb, as_of_date(o.as_of)), compile_facts(rs));
    auto cs = infer(gp);
    out << (o.format == "json" ? export_conclusions_json(cs) : export_conclusions(cs));
    return kSuccess;
}

int run_explain(const Options& o, std::ostream& out) {
    auto rs = parse_fact_file(read_file(o.facts));
    auto rb = parse_lrmls(read_file(o.norms));
    auto goal = parse_literal(o.goal);
    auto gp = ground(translate_to_core(rb, as_of_date(o.as_of)), compile_facts(rs));
    auto cs = infer(gp);
    auto tree = explain(gp, cs, goal);
    out << (o.format == "json" ? export_proof_json(tree) : export_proof(tree));
    return kSuccess;
}

int run_pipeline_cmd(const Options& o, std::ostream& out) {
    auto rs = parse_fact_file(read_file(o.facts));
    auto rb = parse_lrmls(read_file(o.norms));
    auto report = run_pipeline(rb, rs, as_of_date(o.as_of), default_stages());
    auto json = serialize_report(report);
    if (!o.report.empty()) write_file(o.report, json);
    out << (o.format == "text" ? format_report_text(report) : json);
    return report.eligible ? kSuccess : kVerdictNegative;
}

void warn_if_read_only(const VersionedStore& store, std::ostream& err) {
    if (store.read_only()) err << "warning: " << store.open_warning() << "\n";
}

int run_kb_commit(const Options& o, std::ostream& out, std::ostream& err) {
    auto cs = parse_changeset(read_file(o.changeset));
    VersionedStore store{std::filesystem::path(store_path(o.store))};
    warn_if_read_only(store, err);
    auto v = store.commit(cs, o.timestamp);
    out << "committed version " << v << "\n";
    return kSuccess;
}

int run_kb_as_of(const Options& o, std::ostream& out, std::ostream& err) {
    VersionedStore store{std::filesystem::path(store_path(o.store))};
    warn_if_read_only(store, err);
    auto rb = store.as_of(Date::parse(o.date));
    if (o.format == "json") {
        ordered_json j;
        j["version"] = store.head_version();
        j["as_of"] = o.date;
        j["jurisdiction"] = rb.jurisdiction;
        j["norms"] = ordered_json::array();
        for (const auto& n : rb.norms) j["norms"].push_back(n.id);
        out << j.dump(2) << "\n";
    } else {
        out << serialize_lrmls(rb);
    }
    return kSuccess;
}

int run_kb_diff(const Options& o, std::ostream& out, std::ostream& err) {
    VersionedStore store{std::filesystem::path(store_path(o.store))};
    warn_if_read_only(store, err);
    auto cs = store.diff(parse_version(o.v1), parse_version(o.v2));
    if (o.format == "json") {
        out << serialize_changeset(cs);
        return kSuccess;
    }
    for (const auto& op : cs) {
        out << to_string(kind_of(op)) << " ";
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, AddNorm>)
                    out << x.norm.id;
                else if constexpr (std::is_same_v<T, RepealNorm>)
                    out << x.norm_id << " at " << x.end.to_string();
                else if constexpr (std::is_same_v<T, AmendNorm>)
                    out << x.norm_id << " -> " << x.replacement.id;
                else
                    out << x.pair.first << " > " << x.pair.second;
            },
            op.op);
        out << " (" << op.citation << ")\n";
    }
    return kSuccess;
}

int run_kb_trace(const Options& o, std::ostream& out, std::ostream& err) {
    VersionedStore store{std::filesystem::path(store_path(o.store))};
    warn_if_read_only(store, err);
    auto chain = store.trace(o.norm_id);
    if (o.format == "json") {
        ordered_json j;
        j["norm_id"] = chain.norm_id;
        j["provision"] = chain.provision;
        j["events"] = ordered_json::array();
        for (const auto& e : chain.events)
            j["events"].push_back(
                {{"version", e.version}, {"kind", std::string(to_string(e.kind))}, {"citation", e.citation}});
        j["predecessor"] = chain.predecessor ? ordered_json(*chain.predecessor) : ordered_json();
        j["successor"] = chain.successor ? ordered_json(*chain.successor) : ordered_json();
        out << j.dump(2) << "\n";
    } else {
        out << format_provenance(chain);
    }
    return kSuccess;
}

} // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Defeasible patent-compliance checking over versioned norms", "normforge"};
    app.require_subcommand(1);
    Options o;
    std::vector<FormatDefault> formats;

    auto* validate = app.add_subcommand("validate", "Check a fact file and a rulebase");
    validate->add_option("facts", o.facts, "Fact file (JSON)")->required();
    validate->add_option("norms", o.norms, "Rulebase (LRML-S XML)")->required();
    formats.push_back(add_format(validate, o, "text"));

    auto* infer_cmd = app.add_subcommand("infer", "Print every conclusion");
    infer_cmd->add_option("facts", o.facts, "Fact file (JSON)")->required();
    infer_cmd->add_option("norms", o.norms, "Rulebase (LRML-S XML)")->required();
    infer_cmd->add_option("--as-of", o.as_of, "Date (YYYY-MM-DD), default today");
    formats.push_back(add_format(infer_cmd, o, "text"));

    auto* pipeline = app.add_subcommand("pipeline", "Run the staged compliance check");
    pipeline->add_option("facts", o.facts, "Fact file (JSON)")->required();
    pipeline->add_option("norms", o.norms, "Rulebase (LRML-S XML)")->required();
    pipeline->add_option("--as-of", o.as_of, "Date (YYYY-MM-DD), default today");
    pipeline->add_option("--report", o.report, "Also write the JSON report here");
    formats.push_back(add_format(pipeline, o, "json"));

    auto* explain_cmd = app.add_subcommand("explain", "Print a proof tree for a goal");
    explain_cmd->add_option("facts", o.facts, "Fact file (JSON)")->required();
    explain_cmd->add_option("norms", o.norms, "Rulebase (LRML-S XML)")->required();
    explain_cmd->add_option("--as-of", o.as_of, "Date (YYYY-MM-DD), default today");
    explain_cmd->add_option("--goal", o.goal, "Ground literal, e.g. novel(cl1)")->required();
    formats.push_back(add_format(explain_cmd, o, "text"));

    auto* kb = app.add_subcommand("kb", "Versioned norm store");
    kb->require_subcommand(1);
    kb->add_option("--store", o.store, "Store log file (default $NORMFORGE_STORE)");
    auto* commit = kb->add_subcommand("commit", "Apply a changeset");
    commit->add_option("changeset", o.changeset, "Changeset (JSON)")->required();
    commit->add_option("--timestamp", o.timestamp, "Override the commit timestamp");
    auto* as_of = kb->add_subcommand("as-of", "Norms in force on a date");
    as_of->add_option("date", o.date, "Date (YYYY-MM-DD)")->required();
    formats.push_back(add_format(as_of, o, "text"));
    auto* diff = kb->add_subcommand("diff", "Changes between two versions");
    diff->add_option("v1", o.v1, "From version")->required();
    diff->add_option("v2", o.v2, "To version")->required();
    formats.push_back(add_format(diff, o, "text"));
    auto* trace = kb->add_subcommand("trace", "Provenance of a norm");
    trace->add_option("norm_id", o.norm_id, "Norm id")->required();
    formats.push_back(add_format(trace, o, "text"));
    for (auto* sub : {commit, as_of, diff, trace}) sub->add_option("--store", o.store, "Store log file");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kInputError;
    }
    for (const auto& f : formats)
        if (*f.cmd && f.option->count() == 0) o.format = f.fallback;

    try {
        if (*validate) return run_validate(o, out);
        if (*infer_cmd) return run_infer(o, out);
        if (*pipeline) return run_pipeline_cmd(o, out);
        if (*explain_cmd) return run_explain(o, out);
        if (*commit) return run_kb_commit(o, out, err);
        if (*as_of) return run_kb_as_of(o, out, err);
        if (*diff) return run_kb_diff(o, out, err);
        if (*trace) return run_kb_trace(o, out, err);
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return e.kind() == ErrorKind::NotProvable ? kVerdictNegative : kInputError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternalError;
    }
    return kInternalError;
}

} // namespace normforge::cli
