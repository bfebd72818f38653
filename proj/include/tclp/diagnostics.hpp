#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tclp {

struct SourceSpan {
    int line = 0;
    int col = 0;
};

enum class Severity { Error, Warning, Note };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string file;
    SourceSpan span;
    std::string message;
    std::vector<std::string> notes;
};

/// `file:line:col: error: message`, followed by one `note:` line per note.
std::string format(const Diagnostic& d);

/// Thrown by the frontend for syntax and declaration errors.
class FrontendError : public std::runtime_error {
public:
    explicit FrontendError(Diagnostic d) : std::runtime_error(format(d)), diag_(std::move(d)) {}
    const Diagnostic& diagnostic() const { return diag_; }

private:
    Diagnostic diag_;
};

}  // namespace tclp
