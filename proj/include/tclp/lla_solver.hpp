#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tclp/constructor_table.hpp"
#include "tclp/inequality.hpp"

namespace tclp {

struct LlaOptions {
    /// Re-classify the pending system after every rewrite and throw
    /// std::logic_error if left-linearity or acyclicity is lost.
    bool check_invariants = false;
    std::size_t trace_limit = 10;
};

struct LlaResult {
    bool satisfiable = false;
    /// Maximal solution read off the solved form.
    TypeSubstitution solution;
    /// Irreducible inequality left in the normal form.
    std::optional<Inequality> failing;
    std::string reason;
    std::size_t steps = 0;
    /// Last rule applications, oldest first.
    std::vector<std::string> trace;
};

/// Rewrites a left-linear acyclic system to normal form with the
/// decomposition, trivial, variable-left and variable-right rules.
/// Throws std::invalid_argument when the system is not left-linear and acyclic.
LlaResult solve_lla(const InequalitySystem& sys, const ConstructorTable& table, const LlaOptions& options = {});

}  // namespace tclp
