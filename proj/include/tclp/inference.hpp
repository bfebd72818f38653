#pragma once

#include <string>
#include <vector>

#include "tclp/typechecker.hpp"

namespace tclp {

struct PredicateType {
    SymbolKey key;
    std::vector<TypeTerm> min_type;   // may contain bottom
    std::vector<TypeTerm> heuristic;  // parameters are local: 0, 1, ...
    std::vector<std::string> notes;

    /// The heuristic type as a declaration.
    Scheme scheme() const;
};

struct GroupResult {
    std::vector<SymbolKey> preds;
    bool ok = false;
    std::vector<PredicateType> types;
    std::vector<Diagnostic> diagnostics;
    std::size_t constraints = 0;
    bool acyclic = true;
};

struct InferenceReport {
    std::vector<GroupResult> groups;
    /// Input signatures plus the installed heuristic types.
    SignatureSet signatures;
    bool ok() const;
};

struct InferOptions {
    /// Also infer predicates that already have a declaration.
    bool reinfer_declared = false;
    SolveOptions solve;
};

/// Strongly connected components of the call graph between defined
/// predicates, callees before callers.
std::vector<std::vector<SymbolKey>> dependency_sccs(const Program& p);

/// Minimum and heuristic types for the predicates of one group.
GroupResult infer_group(const std::vector<SymbolKey>& group, const Program& p, const SignatureSet& sigs,
                        const ConstructorTable& table, const SolveOptions& options = {});

/// Infers every undeclared defined predicate, group by group, installing each
/// heuristic type before the callers are inferred.
InferenceReport infer_program(const Program& p, const SignatureSet& sigs, const ConstructorTable& table,
                              const InferOptions& options = {});

/// `sigs` without the predicates that `p` defines.
SignatureSet shadow_defined(const SignatureSet& sigs, const Program& p);

/// `list(A), int -> pred`
std::string format_type(const std::vector<TypeTerm>& args, ParamNamer& namer);

/// The two result lines for a predicate.
std::string format_result(const PredicateType& t);

}  // namespace tclp
