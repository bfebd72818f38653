#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tclp/ast.hpp"

namespace tclp {

/// Reads every `.`-terminated term of a Prolog text with the fixed operator
/// table. Throws FrontendError on syntax errors.
std::vector<Term> read_terms(std::string_view text, const std::string& file = {});

/// Parses a single term without the terminating `.` (used for types and tests).
Term read_term(std::string_view text, const std::string& file = {});

/// Splits a text into clauses, queries and signature declarations.
/// `:- op(...)` is rejected; mode/module-style directives are skipped with a warning.
Program parse_program(std::string_view text, const std::string& file = {});

}  // namespace tclp
