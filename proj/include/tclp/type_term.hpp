#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tclp {

/// Interned constructor name. Comparison and hashing are by id.
class Symbol {
public:
    Symbol() = default;
    static Symbol intern(std::string_view name);

    std::string_view str() const;
    std::uint32_t id() const { return id_; }

    friend bool operator==(Symbol, Symbol) = default;
    friend auto operator<=>(Symbol a, Symbol b) { return a.id_ <=> b.id_; }

private:
    explicit Symbol(std::uint32_t id) : id_(id) {}
    std::uint32_t id_ = 0;
};

/// Synthetic lattice extremes. Never produced by user declarations.
Symbol top_symbol();
Symbol bottom_symbol();

using ParamId = std::uint32_t;

/// A type: either a parameter or a constructor applied to argument types.
class TypeTerm {
public:
    TypeTerm() = default;

    static TypeTerm param(ParamId id);
    static TypeTerm ctor(Symbol name, std::vector<TypeTerm> args = {});
    static TypeTerm ctor(std::string_view name, std::vector<TypeTerm> args = {});
    static TypeTerm top() { return ctor(top_symbol()); }
    static TypeTerm bottom() { return ctor(bottom_symbol()); }

    bool is_param() const { return is_param_; }
    bool is_ctor() const { return !is_param_; }
    ParamId param_id() const { return param_; }
    Symbol name() const { return name_; }
    std::span<const TypeTerm> args() const { return args_; }
    std::size_t arity() const { return args_.size(); }

    bool is_top() const { return !is_param_ && name_ == top_symbol(); }
    bool is_bottom() const { return !is_param_ && name_ == bottom_symbol(); }

    friend bool operator==(const TypeTerm&, const TypeTerm&) = default;
    friend std::strong_ordering operator<=>(const TypeTerm& a, const TypeTerm& b);

private:
    bool is_param_ = true;
    ParamId param_ = 0;
    Symbol name_;
    std::vector<TypeTerm> args_;
};

/// Idempotent finite map from parameters to types.
using TypeSubstitution = std::map<ParamId, TypeTerm>;

std::size_t type_size(const TypeTerm& t);
std::set<ParamId> vars_of(const TypeTerm& t);
void collect_vars(const TypeTerm& t, std::set<ParamId>& out);
bool occurs(ParamId a, const TypeTerm& t);
bool is_ground(const TypeTerm& t);

TypeTerm apply_subst(const TypeTerm& t, const TypeSubstitution& theta);
/// Replace a single parameter.
TypeTerm replace_param(const TypeTerm& t, ParamId a, const TypeTerm& by);

/// Compose so that the result applied to t equals apply(second, apply(first, t)).
TypeSubstitution compose(const TypeSubstitution& first, const TypeSubstitution& second);
bool is_idempotent(const TypeSubstitution& theta);

/// Monotone supply of parameter identifiers; reset per run for deterministic output.
class ParamSupply {
public:
    explicit ParamSupply(ParamId first = 1000) : next_(first) {}
    ParamId fresh() { return next_++; }
    TypeTerm fresh_term() { return TypeTerm::param(fresh()); }
    ParamId peek() const { return next_; }

private:
    ParamId next_;
};

/// Prints parameters as A, B, C, ... in order of first appearance. One namer
/// per printed report keeps names stable across several types.
class ParamNamer {
public:
    std::string name(ParamId p);
    void preset(ParamId p, std::string name);

private:
    std::map<ParamId, std::string> names_;
    std::size_t used_ = 0;
};

/// Renders bottom/top as `bottom`/`top`; parameters through the namer.
std::string to_string(const TypeTerm& t, ParamNamer& namer);
std::string to_string(const TypeTerm& t);

}  // namespace tclp
