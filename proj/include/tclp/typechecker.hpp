#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tclp/constraint_gen.hpp"
#include "tclp/lattice_solver.hpp"
#include "tclp/lla_solver.hpp"

namespace tclp {

/// Verdict of whichever solver applies to a system.
struct SolveOutcome {
    enum class Solver { Lla, Lattice, None };
    Solver solver = Solver::None;
    bool satisfiable = false;
    std::string reason;  // set when no solver applies or on failure
    std::optional<LlaResult> lla;
    std::optional<LatticeResult> lattice;

    /// Upper (max) and lower (min) value of a parameter; the parameter itself
    /// when unconstrained in that direction or unknown to the solver.
    TypeTerm upper(ParamId p, const ConstructorTable& table) const;
    TypeTerm lower(ParamId p, const ConstructorTable& table) const;
    /// t with every parameter replaced by its upper/lower value.
    TypeTerm upper_of(const TypeTerm& t, const ConstructorTable& table) const;
    TypeTerm lower_of(const TypeTerm& t, const ConstructorTable& table) const;
};

struct SolveOptions {
    std::size_t max_steps = 200000;
    bool prefer_lla = true;
    /// Parameters that must not be bottom in the solution (the types of program variables).
    std::vector<ParamId> nonempty;
};

/// solve_lla when the system is left-linear and acyclic (and preferred),
/// otherwise the lattice solver; satisfiability is over finite types without
/// top and bottom.
SolveOutcome solve_system(const InequalitySystem& sys, const ConstructorTable& table, const SolveOptions& options = {});

/// Raises each parameter of `vars` whose lower bound is bottom to a minimal
/// constructor below its upper bound, keeping `r` satisfiable; false when some
/// parameter only admits bottom.
bool inhabit(LatticeResult& r, const std::vector<ParamId>& vars, const ConstructorTable& table,
             const LatticeOptions& options = {});

/// Finds the first inequality that makes the system unsatisfiable and turns it
/// into a diagnostic naming the conflicting types.
Diagnostic explain_failure(const Generated& g, const ConstructorTable& table, const std::string& file,
                           const SolveOptions& options = {});

struct VariableBounds {
    std::string name;
    std::string lower;
    std::string upper;
};

struct ClauseReport {
    enum class Kind { Clause, Query };
    Kind kind = Kind::Clause;
    SourceSpan span;
    std::string text;
    bool ok = false;
    std::size_t constraints = 0;
    std::size_t nodes = 0;
    std::string solver;
    std::vector<Diagnostic> diagnostics;
    std::vector<VariableBounds> typing;
};

struct CheckReport {
    std::vector<ClauseReport> entries;
    std::vector<Diagnostic> warnings;
    bool ok() const;
    std::size_t errors() const;
};

struct CheckOptions {
    SolveOptions solve;
};

/// Type checker for clauses and queries against declared signatures.
class Checker {
public:
    Checker(const ConstructorTable& table, const SignatureSet& sigs, CheckOptions options = {});

    /// Generates the clause system. With `declared`, variable types are taken
    /// from it and its parameters are frozen to constants.
    Generated generate(const Clause& c, const std::string& file, const VariableTyping* declared = nullptr);
    Generated generate(const Query& q, const std::string& file, const VariableTyping* declared = nullptr);

    ClauseReport check_clause(const Clause& c, const std::string& file, const VariableTyping* declared = nullptr);
    ClauseReport check_query(const Query& q, const std::string& file, const VariableTyping* declared = nullptr);
    CheckReport check_program(const Program& p);

    /// The table extended with the kappa constants (and frozen constants, if any).
    const ConstructorTable& table() const { return table_; }

private:
    ClauseReport finish(ClauseReport r, const Generated& g, const std::string& file, const ConstructorTable& table);
    const ConstructorTable& table_for(const VariableTyping* declared);

    ConstructorTable table_;
    std::optional<ConstructorTable> frozen_table_;
    const SignatureSet& sigs_;
    CheckOptions options_;
    ParamSupply supply_;
};

/// Frozen constant standing for parameter p of a declared variable typing.
TypeTerm frozen(ParamId p);
VariableTyping freeze(const VariableTyping& u);

}  // namespace tclp
