#pragma once

#include <string_view>
#include <vector>

#include "tclp/constructor_table.hpp"
#include "tclp/inequality.hpp"

namespace testing {

inline tclp::TypeTerm T(std::string_view k, std::vector<tclp::TypeTerm> args = {}) {
    return tclp::TypeTerm::ctor(k, std::move(args));
}
inline tclp::TypeTerm P(tclp::ParamId id) { return tclp::TypeTerm::param(id); }

inline tclp::InequalitySystem sys(std::initializer_list<std::pair<tclp::TypeTerm, tclp::TypeTerm>> ineqs) {
    tclp::InequalitySystem s;
    for (const auto& [l, r] : ineqs) s.add(l, r);
    return s;
}

}  // namespace testing
