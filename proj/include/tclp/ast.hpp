#pragma once

#include <string>
#include <vector>

#include "tclp/diagnostics.hpp"

namespace tclp {

/// A program term. Atoms and numbers are compounds of arity 0; list syntax is
/// desugared to nil/0 and cons/2.
struct Term {
    enum class Kind { Var, Compound };
    enum class Literal { None, Int, Float };

    Kind kind = Kind::Compound;
    std::string name;
    std::vector<Term> args;
    Literal literal = Literal::None;
    SourceSpan span;

    static Term var(std::string name, SourceSpan span = {});
    static Term atom(std::string name, SourceSpan span = {});
    static Term compound(std::string name, std::vector<Term> args, SourceSpan span = {});
    static Term number(std::string text, Literal kind, SourceSpan span = {});

    bool is_var() const { return kind == Kind::Var; }
    bool is_number() const { return literal != Literal::None; }
    std::size_t arity() const { return args.size(); }

    /// Structural equality; spans are ignored.
    friend bool operator==(const Term& a, const Term& b);
};

struct Clause {
    Term head;
    /// Body atoms in order; control constructs (`,`, `;`, `->`, `\+`) are dissolved.
    std::vector<Term> body;
    SourceSpan span;
};

struct Query {
    std::vector<Term> goals;
    SourceSpan span;
};

/// Signature directive kept for the signature loader (`con`, `sub`, `fun`, `pred`, `foreign`).
struct Directive {
    Term body;
    SourceSpan span;
};

struct Program {
    std::string file;
    std::vector<Clause> clauses;
    std::vector<Query> queries;
    std::vector<Directive> declarations;
    std::vector<Diagnostic> warnings;
};

/// Canonical source text: functional notation, quoted atoms where needed.
std::string to_source(const Term& t);
std::string to_source(const Clause& c);

/// Variables in order of first occurrence.
void collect_variables(const Term& t, std::vector<std::string>& out);
std::vector<std::string> clause_variables(const Clause& c);
std::vector<std::string> query_variables(const Query& q);

}  // namespace tclp
