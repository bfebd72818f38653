#pragma once

#include <map>
#include <string>
#include <vector>

#include "tclp/ast.hpp"
#include "tclp/inequality.hpp"
#include "tclp/signatures.hpp"

namespace tclp {

/// Mapping from program variables to types.
using VariableTyping = std::map<std::string, TypeTerm>;

/// Where an inequality came from: argument `index` of `symbol`.
struct Origin {
    SourceSpan span;
    std::string symbol;  // name/arity
    std::size_t index = 0;  // 1-based
    std::string term;       // source text of the argument
    std::string variable;   // set when the argument is a variable
    bool head = false;
};

/// Name prefixes of the constants used by the checker. They cannot be written
/// as unquoted atoms, so they never clash with declared constructors.
inline constexpr std::string_view kKappaPrefix = "%k:";
inline constexpr std::string_view kFrozenPrefix = "%f:";
inline constexpr std::string_view kProbePrefix = "%c:";

/// Strips the checker prefixes, so that constants print as the parameter they stand for.
std::string display(const TypeTerm& t, ParamNamer& namer);

/// An inequality system together with the provenance of each inequality.
struct Generated {
    InequalitySystem system;
    std::vector<Origin> origins;
    VariableTyping vars;                 // program variable -> its type
    std::vector<std::string> var_order;  // first occurrence order
    std::size_t nodes = 0;               // term and atom nodes visited
    std::string head;                    // name/arity of the clause head, if any
};

/// Builds the premises of the syntax-directed rules with a fresh renaming of
/// every scheme occurrence.
class Generator {
public:
    Generator(const SignatureSet& sigs, const ConstructorTable& table, ParamSupply& supply, std::string file);

    /// Type of a term, adding σi <= τiΘ for each argument. Unknown variables
    /// get a fresh parameter unless already present in `out.vars`.
    TypeTerm term(const Term& t, Generated& out);

    /// σi <= expected[i] for every argument of `a`.
    void arguments(const Term& a, const std::vector<TypeTerm>& expected, bool head, Generated& out);

    /// Body atom through a fresh instance of the declared predicate scheme.
    void atom(const Term& a, Generated& out);

    /// Head atom with each scheme parameter replaced by its kappa constant.
    void head(const Term& a, Generated& out);

    /// Kappa constant names needed for the heads of the given signatures.
    static std::vector<std::string> kappa_constants(const SignatureSet& sigs);

private:
    [[noreturn]] void fail(const Term& at, const std::string& message) const;
    TypeTerm variable(const std::string& name, Generated& out);

    const SignatureSet& sigs_;
    const ConstructorTable& table_;
    ParamSupply& supply_;
    std::string file_;
};

/// The printed name of a variable (`_` for anonymous ones).
std::string variable_name(const std::string& name);

}  // namespace tclp
