#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tclp/ast.hpp"
#include "tclp/constructor_table.hpp"
#include "tclp/type_term.hpp"

namespace tclp {

/// Declared type scheme over local parameters 0..n-1. Predicates have result `pred`.
struct Scheme {
    std::vector<TypeTerm> args;
    TypeTerm result;
    std::vector<std::string> param_names;  // indexed by local parameter id
    std::string file;
    int line = 0;
};

using SymbolKey = std::pair<std::string, std::size_t>;

class SignatureSet {
public:
    /// Throws FrontendError when the name/arity is already declared.
    void add_fun(const std::string& name, Scheme s);
    void add_pred(const std::string& name, Scheme s);

    const Scheme* fun(const std::string& name, std::size_t arity) const;
    const Scheme* pred(const std::string& name, std::size_t arity) const;

    const std::map<SymbolKey, Scheme>& funs() const { return funs_; }
    const std::map<SymbolKey, Scheme>& preds() const { return preds_; }

    /// Adds every entry of `other`, replacing existing ones of the same name/arity.
    void override_with(const SignatureSet& other);
    void set_pred(const std::string& name, Scheme s) { preds_[{name, s.args.size()}] = std::move(s); }
    void erase_pred(const SymbolKey& key) { preds_.erase(key); }

private:
    std::map<SymbolKey, Scheme> funs_;
    std::map<SymbolKey, Scheme> preds_;
};

struct TypeDeclarations {
    HierarchyDecls hierarchy;
    SignatureSet signatures;
};

/// Interprets `con`, `sub`, `fun`, `pred` and `foreign` directive bodies.
void load_declarations(const std::vector<Directive>& directives, const std::string& file, TypeDeclarations& into);

/// Parses a `.typ` text made of signature directives.
TypeDeclarations parse_signatures(std::string_view text, const std::string& file = {});

/// term, pred, atom, float, int, list/1 with int < float and everything else below term.
HierarchyDecls reference_hierarchy();

/// Equality, arithmetic, comparison, list constructors and a few control predicates.
SignatureSet builtin_signatures();

/// Converts a declaration term to a type; variables map to local parameters through `names`.
TypeTerm type_from_term(const Term& t, std::vector<std::string>& names, const std::string& file);

/// Fresh renaming of a scheme: returns (argument types, result type).
std::pair<std::vector<TypeTerm>, TypeTerm> instantiate(const Scheme& s, ParamSupply& supply);

/// Constructor names and arities used by the schemes that the table does not know.
std::vector<Diagnostic> check_against(const SignatureSet& sigs, const ConstructorTable& table);

/// `name : t1, t2 -> result` with parameters named A, B, ...
std::string to_string(const std::string& name, const Scheme& s);

/// Whether t is K(a1..an) with distinct parameters.
bool is_flat(const TypeTerm& t);

}  // namespace tclp
