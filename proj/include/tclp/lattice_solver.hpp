#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tclp/constructor_table.hpp"
#include "tclp/inequality.hpp"

namespace tclp {

/// A flat bound K(a1..an) over flat-parameter indices; top/bottom have no arguments.
struct FlatBound {
    Symbol head;
    std::vector<std::size_t> args;

    friend bool operator==(const FlatBound&, const FlatBound&) = default;
};

struct FlatParam {
    ParamId id = 0;          // original parameter, or a fresh one
    bool original = false;
    FlatBound lower{bottom_symbol(), {}};
    FlatBound upper{top_symbol(), {}};
    std::size_t lower_origin = kNoOrigin;
    std::size_t upper_origin = kNoOrigin;
};

/// Parameter-only inequalities plus one lower and one upper flat bound per parameter.
struct FlatSystem {
    std::vector<FlatParam> params;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::map<ParamId, std::size_t> index_of;  // original parameter -> index
    ParamId next_fresh = 0;

    std::size_t add_param(ParamId id, bool original);
};

/// Introduces a fresh parameter per nested argument position.
FlatSystem flatten(const InequalitySystem& sys);

enum class LatticeStatus { Solved, Clash, StepLimit };

struct LatticeClash {
    ParamId param = 0;
    Symbol lower;
    Symbol upper;
    std::size_t lower_origin = kNoOrigin;
    std::size_t upper_origin = kNoOrigin;
};

/// Saturated flat system; `bounds.params[i].lower/upper` are lb/ub.
struct LatticeResult {
    LatticeStatus status = LatticeStatus::Solved;
    FlatSystem bounds;
    std::optional<LatticeClash> clash;
    std::size_t steps = 0;
    std::vector<std::string> trace;

    bool solved() const { return status == LatticeStatus::Solved; }
    /// Solved and, as needed over finite types without top/bottom,
    /// no upper bound is bottom and no lower bound is top.
    bool satisfiable_over_types() const;
    /// First index whose upper bound is bottom, if any.
    std::optional<std::size_t> bottom_upper() const;
};

struct LatticeOptions {
    std::size_t max_steps = 200000;
    std::size_t trace_limit = 10;
};

/// Saturates with Trans, Clash, Dec, Glb and Lub. Requires a lattice table.
LatticeResult solve_lattice(FlatSystem flat, const ConstructorTable& table, const LatticeOptions& options = {});
LatticeResult solve_lattice(const InequalitySystem& sys, const ConstructorTable& table, const LatticeOptions& options = {});

enum class ExtractMode { Min, Max };
enum class ExtractError { None, NotFinite, InvalidBottom };

struct Extraction {
    ExtractError error = ExtractError::None;
    TypeSubstitution solution;

    bool ok() const { return error == ExtractError::None; }
};

/// Identifies each original parameter with its lower (Min) or upper (Max)
/// bound, unfolded through the fresh parameters. In Max mode a top upper bound
/// is replaced by the maximum of the lower bound when there is one; remaining
/// tops are rendered with render_top. With `no_bottom`, any bottom upper bound
/// is an InvalidBottom error.
Extraction extract_solution(const FlatSystem& bounds, ExtractMode mode, const ConstructorTable& table,
                            bool no_bottom = false);

/// Min or max type of a single flat index (unfolded), or nullopt on a cycle.
std::optional<TypeTerm> extract_one(const FlatSystem& bounds, std::size_t index, ExtractMode mode,
                                    const ConstructorTable& table);

}  // namespace tclp
