// Brute-force reference checks used by the unit and acceptance tests.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tclp/constructor_table.hpp"
#include "tclp/inequality.hpp"

namespace oracle {

using tclp::ConstructorTable;
using tclp::InequalitySystem;
using tclp::ParamId;
using tclp::TypeSubstitution;
using tclp::TypeTerm;

/// term, float, int, atom, list/1, nelist/1 with int<float<term, atom<term,
/// nelist(A)<list(A)<term.
ConstructorTable small_lattice();

/// All ground types over the table's constructors with size <= max_size.
std::vector<TypeTerm> ground_universe(const ConstructorTable& table, std::size_t max_size);

/// Exhaustive search over assignments of the system's parameters into a universe.
class BruteForce {
public:
    BruteForce(const ConstructorTable& table, std::vector<TypeTerm> universe);

    /// Some solution, or nullopt when none exists inside the universe.
    std::optional<TypeSubstitution> find(const InequalitySystem& sys) const;

    /// For each parameter, every universe value it takes in at least one solution.
    std::map<ParamId, std::vector<TypeTerm>> projections(const InequalitySystem& sys) const;

    const std::vector<TypeTerm>& universe() const { return universe_; }

private:
    bool search(const InequalitySystem& sys, const std::vector<ParamId>& order, std::size_t depth,
                TypeSubstitution& theta, const std::vector<std::vector<std::size_t>>& ready) const;

    const ConstructorTable& table_;
    std::vector<TypeTerm> universe_;
};

/// Random type over the table with parameters 0..params-1 and bounded depth.
TypeTerm random_type(std::mt19937& rng, const ConstructorTable& table, std::uint32_t params, int depth);

/// Random system; when `lla` is set, rejection-samples until left-linear and acyclic.
InequalitySystem random_system(std::mt19937& rng, const ConstructorTable& table, std::size_t max_ineqs,
                               std::uint32_t params, bool lla);

/// Replace every parameter by `by`.
TypeTerm ground_with(const TypeTerm& t, const TypeTerm& by);

}  // namespace oracle

namespace oracle {

/// Outcome of running both solvers on one system against the brute-force search.
struct Comparison {
    bool acyclic = false;
    bool lla_applicable = false;
    bool oracle_sat = false;
    bool solver_sat = false;
    /// Solver found a verified solution that only exists outside the bounded universe.
    bool beyond_bound = false;
    std::size_t lla_steps = 0;
    std::size_t lhs_size = 0;
    /// Empty when no check failed.
    std::string problem;
};

Comparison compare(const InequalitySystem& sys, const ConstructorTable& table, const BruteForce& bf);

}  // namespace oracle
