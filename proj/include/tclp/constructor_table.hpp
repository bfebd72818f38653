#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tclp/type_term.hpp"

namespace tclp {

struct ConDecl {
    std::string name;
    std::size_t arity = 0;
    int line = 0;
};

/// `sub Lower < Upper.` between flat types; shared parameters encode the index map.
struct SubDecl {
    TypeTerm lower;
    TypeTerm upper;
    int line = 0;
};

struct HierarchyDecls {
    std::vector<ConDecl> constructors;
    std::vector<SubDecl> edges;

    void append(const HierarchyDecls& other);
};

enum class TableErrorKind {
    ReservedName,
    DuplicateConstructor,
    UnknownConstructor,
    MalformedEdge,
    ArityIncrease,
    NonInjectiveIota,
    IotaIncoherent,
    CyclicOrder,
    NoComponentMaximum,
    NotALattice,
};

std::string_view to_string(TableErrorKind kind);

class TableError : public std::runtime_error {
public:
    TableError(TableErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    TableErrorKind kind() const { return kind_; }

private:
    TableErrorKind kind_;
};

/// For K <= K': entry j is the (0-based) argument position of K that becomes
/// argument j of K'. Its size is arity(K').
using IotaMap = std::vector<std::uint32_t>;

enum class LatticeMode {
    Auto,      // complete to a lattice when possible, otherwise poset only
    Required,  // NotALattice is an error
    Off,
};

/// Validated constructor hierarchy: reflexive-transitive order with composed
/// index maps, component maxima, and (when it is one) the lattice tables with
/// synthetic top and bottom.
class ConstructorTable {
public:
    static ConstructorTable validate(const HierarchyDecls& decls, LatticeMode mode = LatticeMode::Auto);

    bool contains(Symbol k) const;
    std::size_t arity(Symbol k) const;

    /// Constructor order, including the synthetic top/bottom.
    bool leq(Symbol a, Symbol b) const;
    /// Index map for a <= b, or nullptr. Maps involving top/bottom are empty.
    const IotaMap* iota(Symbol a, Symbol b) const;

    Symbol max_of(Symbol k) const;

    bool is_lattice() const { return lattice_; }
    Symbol glb(Symbol a, Symbol b) const;
    Symbol lub(Symbol a, Symbol b) const;

    /// The root of the only component, when there is exactly one.
    std::optional<Symbol> unique_root() const;
    std::vector<Symbol> constructors() const;
    const HierarchyDecls& declarations() const { return decls_; }
    LatticeMode lattice_mode() const { return mode_; }

    /// Adds rank-0 constants placed directly below `term` (or as their own
    /// roots when there is no `term`), comparable with nothing else.
    ConstructorTable with_constants(std::span<const std::string> names) const;

private:
    int local(Symbol k) const;

    HierarchyDecls decls_;
    LatticeMode mode_ = LatticeMode::Auto;
    std::vector<Symbol> symbols_;
    std::vector<std::size_t> arities_;
    std::vector<int> local_of_;  // indexed by Symbol::id
    std::vector<std::optional<IotaMap>> order_;  // n*n
    std::vector<int> max_of_;
    bool lattice_ = false;
    std::vector<Symbol> glb_, lub_;  // n*n
};

/// s <= t by the parameter and constructor rules (covariant).
bool subtype_check(const TypeTerm& s, const TypeTerm& t, const ConstructorTable& table);

/// The maximum supertype of t.
TypeTerm max_type(const TypeTerm& t, const ConstructorTable& table);

/// Constructors known and applied at their declared arity.
bool well_formed(const TypeTerm& t, const ConstructorTable& table);

/// Structural meet and join over the lattice (parameters only meet/join themselves;
/// distinct parameters give bottom/top).
TypeTerm type_glb(const TypeTerm& a, const TypeTerm& b, const ConstructorTable& table);
TypeTerm type_lub(const TypeTerm& a, const TypeTerm& b, const ConstructorTable& table);

/// Replaces top by the component root when that root is unique and nullary.
TypeTerm render_top(const TypeTerm& t, const ConstructorTable& table);

}  // namespace tclp
