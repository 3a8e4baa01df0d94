// Discretized technical teachings (elements -> attributes -> concepts), their
// prior-art reference set, and the compilation of both into ground atoms.
#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "normforge/logic.hpp"

namespace normforge {

using ConceptId = std::string;

struct Concept {
    ConceptId id;
    std::string label;
    friend bool operator==(const Concept&, const Concept&) = default;
};

struct Attribute {
    std::string id;
    std::string label;
    std::vector<ConceptId> concepts;
    friend bool operator==(const Attribute&, const Attribute&) = default;
};

struct Element {
    std::string id;
    std::string label;
    std::vector<Attribute> attributes;
    friend bool operator==(const Element&, const Element&) = default;
};

struct TechnicalTeaching {
    std::string doc_id;
    std::string claim_id;
    std::vector<Element> elements;
    friend bool operator==(const TechnicalTeaching&, const TechnicalTeaching&) = default;
};

enum class AnnotationKind { Linguistic, Ontological };

struct Annotation {
    std::string subject;
    AnnotationKind kind = AnnotationKind::Linguistic;
    std::string key;
    std::string value;
    friend bool operator==(const Annotation&, const Annotation&) = default;
};

std::string_view to_string(AnnotationKind kind) noexcept;

struct Disclosure {
    std::string doc_id;
    ConceptId concept_id;
    friend bool operator==(const Disclosure&, const Disclosure&) = default;
};

struct TaxonomyEdge {
    ConceptId child;
    ConceptId parent;
    friend bool operator==(const TaxonomyEdge&, const TaxonomyEdge&) = default;
};

// The patent's teaching plus its prior art. All vectors keep file order.
struct ReferenceSet {
    TechnicalTeaching patent;
    std::vector<TechnicalTeaching> prior_art;
    std::vector<Disclosure> disclosures;
    std::vector<Annotation> annotations;
    std::vector<TaxonomyEdge> taxonomy;
    std::vector<Concept> concepts;
    friend bool operator==(const ReferenceSet&, const ReferenceSet&) = default;
};

// Ground atoms, set semantics.
class FactBase {
public:
    FactBase() = default;

    // Throws Error{Precondition} when the atom has variables.
    bool insert(Atom atom);
    bool contains(const Atom& atom) const { return atoms_.count(atom) != 0; }
    std::size_t size() const noexcept { return atoms_.size(); }
    bool empty() const noexcept { return atoms_.empty(); }

    // Number of atoms with the given predicate.
    std::size_t count(std::string_view predicate) const;

    auto begin() const { return atoms_.begin(); }
    auto end() const { return atoms_.end(); }

    friend bool operator==(const FactBase&, const FactBase&) = default;

private:
    std::set<Atom> atoms_;
};

// Parses the JSON fact file. Throws Error with kind Syntax (message carries
// line:column), Schema, DuplicateId or DanglingReference; token() names the
// offending id or key.
ReferenceSet parse_fact_file(std::string_view input);

// Canonical JSON rendering accepted by parse_fact_file.
std::string serialize_fact_file(const ReferenceSet& rs);

struct DiscretizationViolation {
    std::string id;
    std::string message;
    friend bool operator==(const DiscretizationViolation&, const DiscretizationViolation&) = default;
};

// One record per element without attributes / attribute without concepts, in
// document order (patent first, then prior art).
std::vector<DiscretizationViolation> validate_discretization(const ReferenceSet& rs);

// Reflexive-transitive subsumption closure: (a, b) means a is subsumed by b.
using SubsumptionRelation = std::set<std::pair<ConceptId, ConceptId>>;

// Throws Error{Cycle} whose token lists one cycle's concepts, comma separated.
SubsumptionRelation close_taxonomy(const std::vector<ConceptId>& concepts,
                                   const std::vector<TaxonomyEdge>& edges);
SubsumptionRelation close_taxonomy(const ReferenceSet& rs);

// Emits exactly the families teaching/2, patent_doc/1, prior_doc/1,
// element/3, attribute_of/2, refers_to/2, concept_of/3, discloses/2,
// subconcept_of/2 and annot/4.
FactBase ground_atoms(const ReferenceSet& rs, const SubsumptionRelation& closure);

Atom make_ground_atom(std::string predicate, std::vector<std::string> constants);

} // namespace normforge
