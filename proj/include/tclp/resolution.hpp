#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tclp/typechecker.hpp"

namespace tclp {

struct Equation {
    Term lhs;
    Term rhs;
};

/// `term : type`; parameters of `type` are free and shared across a state.
struct TypeConstraint {
    Term term;
    TypeTerm type;
};

/// A query `c | A1, ..., An` where c is a conjunction of equations and, in the
/// typed execution model, type constraints.
struct QueryState {
    std::vector<Equation> store;
    std::vector<TypeConstraint> types;
    std::vector<Term> goals;
};

/// Idempotent most general unifier, keyed by variable name.
using Unifier = std::map<std::string, Term>;

/// Unification with occurs check; nullopt when the equations have no solution.
std::optional<Unifier> unify(const std::vector<Equation>& eqs);
Term apply_unifier(const Unifier& u, const Term& t);

/// Copy of `c` with every variable suffixed by `#stamp`.
Clause rename_apart(const Clause& c, std::size_t stamp);

/// The resolvent of `q` at goal `k` with an already renamed clause, or nullopt
/// when the equations become unsatisfiable. Throws std::invalid_argument when
/// the goal and the head have different predicates.
std::optional<QueryState> csld_step(const QueryState& q, const Clause& c, std::size_t k);

/// Eliminates the first equation X = t (or t = X): X is replaced by t in the
/// goals and the remaining store. Type constraints are kept, and t : tau is
/// added for each X : tau.
QueryState substitute_step(const QueryState& q);

/// Applies substitute_step until no equation has a variable side.
QueryState substitute_all(const QueryState& q);

/// One line per part: `X = f(Y), Y : int | p(X)`.
std::string to_string(const QueryState& q);

/// Whether the equations, goals and type constraints are typable together; the
/// parameters of the constraints are shared and may be instantiated.
bool well_typed(const QueryState& q, const SignatureSet& sigs, const ConstructorTable& table);

/// Whether the equations have a unifier under which every type constraint is
/// satisfiable for one choice of the parameters.
bool consistent(const QueryState& q, const SignatureSet& sigs, const ConstructorTable& table);

/// A variable typing for a well-typed clause or query (the maximal solution),
/// with head constants turned back into parameters; nullopt if ill-typed.
std::optional<VariableTyping> clause_typing(const Clause& c, const SignatureSet& sigs, const ConstructorTable& table);
std::optional<VariableTyping> query_typing(const Query& q, const SignatureSet& sigs, const ConstructorTable& table);

enum class ReductionMode {
    Csld,          // constraints accumulate, resolvents must be typable
    Substitution,  // plain execution: equations are substituted away
    Tclp,          // typed constraints are carried and checked, then substituted
};

struct SrOptions {
    ReductionMode mode = ReductionMode::Csld;
    std::size_t depth = 5;
    std::size_t max_states = 100000;
    /// Resolve every selectable goal, not only the leftmost one.
    bool every_goal = false;
    /// Refuse programs and queries the checker rejects.
    bool require_well_typed = true;
};

struct SrReport {
    bool ok = true;
    bool rejected = false;  // TCLP query with unsatisfiable typed constraints
    std::string reason;     // set when the input is not well-typed
    std::size_t states = 0;
    std::size_t resolvents = 0;
    std::size_t failures = 0;
    bool truncated = false;
    /// Query states from the initial query to the first ill-typed one.
    std::vector<std::string> counterexample;
};

/// Explores every derivation of `q` up to the given depth and checks that each
/// state reached is well-typed.
SrReport subject_reduction_check(const Program& p, const Query& q, const SignatureSet& sigs,
                                 const ConstructorTable& table, const SrOptions& options = {});

}  // namespace tclp
