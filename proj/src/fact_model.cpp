#include "normforge/fact_model.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <tuple>

#include "json.hpp"
#include "normforge/error.hpp"

namespace normforge {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(AnnotationKind kind) noexcept {
    return kind == AnnotationKind::Linguistic ? "linguistic" : "ontological";
}

bool FactBase::insert(Atom atom) {
    if (!atom.is_ground())
        throw Error(ErrorKind::Precondition, "fact base atoms must be ground: " + format_atom(atom),
                    format_atom(atom));
    return atoms_.insert(std::move(atom)).second;
}

std::size_t FactBase::count(std::string_view predicate) const {
    return static_cast<std::size_t>(std::count_if(
        atoms_.begin(), atoms_.end(), [&](const Atom& a) { return a.predicate == predicate; }));
}

Atom make_ground_atom(std::string predicate, std::vector<std::string> constants) {
    Atom a{std::move(predicate), {}};
    a.args.reserve(constants.size());
    for (auto& c : constants) a.args.push_back(Term::constant(std::move(c)));
    return a;
}

namespace {

// --- reading ---------------------------------------------------------------

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

class Reader {
public:
    void keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
        if (!obj.is_object())
            throw Error(ErrorKind::Schema, std::string(where) + ": expected an object",
                        std::string(where));
        for (const auto& [key, _] : obj.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
                throw Error(ErrorKind::Schema,
                            "unknown key '" + key + "' in " + std::string(where), key);
        }
    }

    std::string text(const json& obj, std::string_view key, std::string_view where,
                     bool required = true) {
        auto it = obj.find(key);
        if (it == obj.end()) {
            if (!required) return {};
            throw Error(ErrorKind::Schema,
                        "missing key '" + std::string(key) + "' in " + std::string(where),
                        std::string(key));
        }
        if (!it->is_string())
            throw Error(ErrorKind::Schema,
                        "key '" + std::string(key) + "' in " + std::string(where) +
                            " must be a string",
                        std::string(key));
        return it->get<std::string>();
    }

    std::string id(const json& obj, std::string_view key, std::string_view where) {
        auto value = text(obj, key, where);
        if (!is_identifier_token(value))
            throw Error(ErrorKind::Schema,
                        "invalid identifier '" + value + "' for '" + std::string(key) + "' in " +
                            std::string(where),
                        value);
        return value;
    }

    const json& array(const json& obj, std::string_view key, std::string_view where) {
        static const json empty = json::array();
        auto it = obj.find(key);
        if (it == obj.end()) return empty;
        if (!it->is_array())
            throw Error(ErrorKind::Schema,
                        "key '" + std::string(key) + "' in " + std::string(where) +
                            " must be an array",
                        std::string(key));
        return *it;
    }

    TechnicalTeaching teaching(const json& obj, std::string_view where) {
        keys(obj, where, {"doc", "claim", "elements"});
        TechnicalTeaching t;
        t.doc_id = id(obj, "doc", where);
        t.claim_id = id(obj, "claim", where);
        for (const auto& e : array(obj, "elements", where)) {
            keys(e, "element", {"id", "label", "attributes"});
            Element el;
            el.id = id(e, "id", "element");
            el.label = text(e, "label", "element", false);
            for (const auto& a : array(e, "attributes", "element " + el.id)) {
                keys(a, "attribute", {"id", "label", "concepts"});
                Attribute attr;
                attr.id = id(a, "id", "attribute");
                attr.label = text(a, "label", "attribute", false);
                for (const auto& c : array(a, "concepts", "attribute " + attr.id)) {
                    if (!c.is_string() || !is_identifier_token(c.get<std::string>()))
                        throw Error(ErrorKind::Schema,
                                    "attribute " + attr.id + ": concepts must be identifiers",
                                    attr.id);
                    attr.concepts.push_back(c.get<std::string>());
                }
                el.attributes.push_back(std::move(attr));
            }
            t.elements.push_back(std::move(el));
        }
        return t;
    }
};

void duplicate(const std::string& what, const std::string& id) {
    throw Error(ErrorKind::DuplicateId, "duplicate " + what + " id '" + id + "'", id);
}

void dangling(const std::string& what, const std::string& id) {
    throw Error(ErrorKind::DanglingReference, "undeclared " + what + " '" + id + "'", id);
}

void check(const ReferenceSet& rs) {
    std::set<std::string> concepts;
    for (const auto& c : rs.concepts)
        if (!concepts.insert(c.id).second) duplicate("concept", c.id);

    std::set<std::string> docs;
    std::set<std::string> subjects(concepts.begin(), concepts.end());
    std::set<std::pair<std::string, std::string>> teachings;

    auto check_teaching = [&](const TechnicalTeaching& t) {
        if (!teachings.emplace(t.doc_id, t.claim_id).second)
            duplicate("teaching", t.doc_id + "/" + t.claim_id);
        docs.insert(t.doc_id);
        std::set<std::string> elements;
        for (const auto& e : t.elements) {
            if (!elements.insert(e.id).second) duplicate("element", e.id);
            subjects.insert(e.id);
            std::set<std::string> attributes;
            for (const auto& a : e.attributes) {
                if (!attributes.insert(a.id).second) duplicate("attribute", a.id);
                subjects.insert(a.id);
                std::set<std::string> seen;
                for (const auto& c : a.concepts) {
                    if (!concepts.count(c)) dangling("concept", c);
                    if (!seen.insert(c).second) duplicate("concept reference", c);
                }
            }
        }
    };

    check_teaching(rs.patent);
    for (const auto& t : rs.prior_art) {
        if (t.doc_id == rs.patent.doc_id)
            throw Error(ErrorKind::DuplicateId,
                        "prior-art document '" + t.doc_id + "' reuses the patent document id",
                        t.doc_id);
        check_teaching(t);
    }
    for (const auto& d : rs.disclosures) {
        if (!docs.count(d.doc_id)) dangling("document", d.doc_id);
        if (!concepts.count(d.concept_id)) dangling("concept", d.concept_id);
    }
    for (const auto& e : rs.taxonomy) {
        if (!concepts.count(e.child)) dangling("concept", e.child);
        if (!concepts.count(e.parent)) dangling("concept", e.parent);
    }
    std::set<std::tuple<std::string, AnnotationKind, std::string>> annotation_keys;
    for (const auto& a : rs.annotations) {
        if (!subjects.count(a.subject)) dangling("annotation subject", a.subject);
        if (!annotation_keys.emplace(a.subject, a.kind, a.key).second)
            duplicate("annotation", a.subject + "/" + std::string(to_string(a.kind)) + "/" + a.key);
    }
}

ordered_json teaching_json(const TechnicalTeaching& t) {
    ordered_json elements = ordered_json::array();
    for (const auto& e : t.elements) {
        ordered_json attributes = ordered_json::array();
        for (const auto& a : e.attributes) {
            ordered_json attr;
            attr["id"] = a.id;
            attr["label"] = a.label;
            attr["concepts"] = a.concepts;
            attributes.push_back(std::move(attr));
        }
        ordered_json el;
        el["id"] = e.id;
        el["label"] = e.label;
        el["attributes"] = std::move(attributes);
        elements.push_back(std::move(el));
    }
    ordered_json out;
    out["doc"] = t.doc_id;
    out["claim"] = t.claim_id;
    out["elements"] = std::move(elements);
    return out;
}

} // namespace

ReferenceSet parse_fact_file(std::string_view input) {
    json doc;
    try {
        doc = json::parse(input.begin(), input.end());
    } catch (const json::parse_error& e) {
        auto [line, col] = line_column(input, e.byte > 0 ? e.byte - 1 : 0);
        throw Error(ErrorKind::Syntax,
                    "fact file syntax error at " + std::to_string(line) + ":" +
                        std::to_string(col) + ": " + e.what(),
                    std::to_string(line) + ":" + std::to_string(col));
    }

    Reader r;
    r.keys(doc, "fact file",
           {"patent", "prior_art", "disclosures", "taxonomy", "annotations", "concepts"});
    if (!doc.contains("patent"))
        throw Error(ErrorKind::Schema, "missing key 'patent' in fact file", "patent");

    ReferenceSet rs;
    rs.patent = r.teaching(doc["patent"], "patent");
    for (const auto& t : r.array(doc, "prior_art", "fact file"))
        rs.prior_art.push_back(r.teaching(t, "prior_art"));
    for (const auto& c : r.array(doc, "concepts", "fact file")) {
        r.keys(c, "concept", {"id", "label"});
        rs.concepts.push_back({r.id(c, "id", "concept"), r.text(c, "label", "concept", false)});
    }
    for (const auto& d : r.array(doc, "disclosures", "fact file")) {
        r.keys(d, "disclosure", {"doc", "concept"});
        rs.disclosures.push_back({r.id(d, "doc", "disclosure"), r.id(d, "concept", "disclosure")});
    }
    for (const auto& e : r.array(doc, "taxonomy", "fact file")) {
        r.keys(e, "taxonomy edge", {"child", "parent"});
        rs.taxonomy.push_back({r.id(e, "child", "taxonomy edge"), r.id(e, "parent", "taxonomy edge")});
    }
    for (const auto& a : r.array(doc, "annotations", "fact file")) {
        r.keys(a, "annotation", {"subject", "kind", "key", "value"});
        Annotation ann;
        ann.subject = r.id(a, "subject", "annotation");
        auto kind = r.text(a, "kind", "annotation");
        if (kind == "linguistic")
            ann.kind = AnnotationKind::Linguistic;
        else if (kind == "ontological")
            ann.kind = AnnotationKind::Ontological;
        else
            throw Error(ErrorKind::Schema, "unknown annotation kind '" + kind + "'", kind);
        ann.key = r.text(a, "key", "annotation");
        ann.value = r.text(a, "value", "annotation");
        rs.annotations.push_back(std::move(ann));
    }
    check(rs);
    return rs;
}

std::string serialize_fact_file(const ReferenceSet& rs) {
    ordered_json doc;
    doc["patent"] = teaching_json(rs.patent);
    doc["prior_art"] = ordered_json::array();
    for (const auto& t : rs.prior_art) doc["prior_art"].push_back(teaching_json(t));
    doc["disclosures"] = ordered_json::array();
    for (const auto& d : rs.disclosures)
        doc["disclosures"].push_back(ordered_json{{"doc", d.doc_id}, {"concept", d.concept_id}});
    doc["taxonomy"] = ordered_json::array();
    for (const auto& e : rs.taxonomy)
        doc["taxonomy"].push_back(ordered_json{{"child", e.child}, {"parent", e.parent}});
    doc["annotations"] = ordered_json::array();
    for (const auto& a : rs.annotations)
        doc["annotations"].push_back(ordered_json{{"subject", a.subject},
                                                  {"kind", std::string(to_string(a.kind))},
                                                  {"key", a.key},
                                                  {"value", a.value}});
    doc["concepts"] = ordered_json::array();
    for (const auto& c : rs.concepts)
        doc["concepts"].push_back(ordered_json{{"id", c.id}, {"label", c.label}});
    return doc.dump(2) + "\n";
}

std::vector<DiscretizationViolation> validate_discretization(const ReferenceSet& rs) {
    std::vector<DiscretizationViolation> out;
    auto visit = [&](const TechnicalTeaching& t) {
        for (const auto& e : t.elements) {
            if (e.attributes.empty()) out.push_back({e.id, "element without attributes"});
            for (const auto& a : e.attributes)
                if (a.concepts.empty()) out.push_back({a.id, "attribute without concepts"});
        }
    };
    visit(rs.patent);
    for (const auto& t : rs.prior_art) visit(t);
    return out;
}

SubsumptionRelation close_taxonomy(const std::vector<ConceptId>& concepts,
                                   const std::vector<TaxonomyEdge>& edges) {
    std::map<ConceptId, std::vector<ConceptId>> parents;
    for (const auto& c : concepts) parents[c];
    for (const auto& e : edges) {
        parents[e.child].push_back(e.parent);
        parents[e.parent];
    }

    // Cycle detection, visiting concepts in declaration order.
    enum class Mark { White, Grey, Black };
    std::map<ConceptId, Mark> mark;
    std::vector<ConceptId> stack;
    std::function<void(const ConceptId&)> dfs = [&](const ConceptId& c) {
        mark[c] = Mark::Grey;
        stack.push_back(c);
        for (const auto& p : parents[c]) {
            if (mark[p] == Mark::Grey) {
                auto from = std::find(stack.begin(), stack.end(), p);
                std::string cycle;
                for (auto it = from; it != stack.end(); ++it)
                    cycle += (cycle.empty() ? "" : ",") + *it;
                throw Error(ErrorKind::Cycle, "taxonomy cycle: " + cycle, cycle);
            }
            if (mark[p] == Mark::White) dfs(p);
        }
        stack.pop_back();
        mark[c] = Mark::Black;
    };
    for (const auto& c : concepts)
        if (mark[c] == Mark::White) dfs(c);
    for (const auto& [c, _] : parents)
        if (mark[c] == Mark::White) dfs(c);

    SubsumptionRelation closure;
    for (const auto& [c, _] : parents) {
        std::vector<ConceptId> todo{c};
        while (!todo.empty()) {
            auto x = todo.back();
            todo.pop_back();
            if (!closure.emplace(c, x).second) continue;
            for (const auto& p : parents[x]) todo.push_back(p);
        }
    }
    return closure;
}

SubsumptionRelation close_taxonomy(const ReferenceSet& rs) {
    std::vector<ConceptId> ids;
    ids.reserve(rs.concepts.size());
    for (const auto& c : rs.concepts) ids.push_back(c.id);
    return close_taxonomy(ids, rs.taxonomy);
}

FactBase ground_atoms(const ReferenceSet& rs, const SubsumptionRelation& closure) {
    FactBase fb;
    auto teaching = [&](const TechnicalTeaching& t) {
        fb.insert(make_ground_atom("teaching", {t.doc_id, t.claim_id}));
        for (const auto& e : t.elements) {
            fb.insert(make_ground_atom("element", {e.id, t.doc_id, t.claim_id}));
            for (const auto& a : e.attributes) {
                fb.insert(make_ground_atom("attribute_of", {a.id, e.id}));
                for (const auto& c : a.concepts) {
                    fb.insert(make_ground_atom("refers_to", {a.id, c}));
                    fb.insert(make_ground_atom("concept_of", {t.doc_id, t.claim_id, c}));
                }
            }
        }
    };
    teaching(rs.patent);
    fb.insert(make_ground_atom("patent_doc", {rs.patent.doc_id}));
    for (const auto& t : rs.prior_art) {
        teaching(t);
        fb.insert(make_ground_atom("prior_doc", {t.doc_id}));
    }
    for (const auto& d : rs.disclosures)
        fb.insert(make_ground_atom("discloses", {d.doc_id, d.concept_id}));
    for (const auto& [a, b] : closure) fb.insert(make_ground_atom("subconcept_of", {a, b}));
    for (const auto& an : rs.annotations)
        fb.insert(make_ground_atom("annot", {an.subject, std::string(to_string(an.kind)), an.key,
                                             an.value}));
    return fb;
}

} // namespace normforge
