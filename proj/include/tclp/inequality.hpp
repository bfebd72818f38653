#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tclp/constructor_table.hpp"
#include "tclp/type_term.hpp"

namespace tclp {

inline constexpr std::size_t kNoOrigin = static_cast<std::size_t>(-1);

/// lhs <= rhs. `origin` indexes caller-side provenance (e.g. a source span).
struct Inequality {
    TypeTerm lhs;
    TypeTerm rhs;
    std::size_t origin = kNoOrigin;

    friend bool operator==(const Inequality& a, const Inequality& b) {
        return a.lhs == b.lhs && a.rhs == b.rhs;
    }
};

struct InequalitySystem {
    std::vector<Inequality> inequalities;

    void add(TypeTerm lhs, TypeTerm rhs, std::size_t origin = kNoOrigin) {
        inequalities.push_back({std::move(lhs), std::move(rhs), origin});
    }
    std::size_t size() const { return inequalities.size(); }
    bool empty() const { return inequalities.empty(); }
    /// Sum of the sizes of the left-hand sides.
    std::size_t lhs_size() const;
    std::size_t symbol_count() const;
};

struct Classification {
    bool left_linear = true;
    bool acyclic = true;
};

/// Left-linear: every parameter occurs at most once on the left of <=.
/// Acyclic: the graph V(lhs) -> V(rhs) over all inequalities has no cycle.
Classification classify(const InequalitySystem& sys);

/// Every inequality holds under theta.
bool satisfies(const InequalitySystem& sys, const TypeSubstitution& theta, const ConstructorTable& table);

std::string to_string(const Inequality& ineq, ParamNamer& namer);

}  // namespace tclp
