#include "tclp/diagnostics.hpp"

namespace tclp {

namespace {

const char* label(Severity s) {
    switch (s) {
        case Severity::Error: return "error";
        case Severity::Warning: return "warning";
        case Severity::Note: return "note";
    }
    return "error";
}

}  // namespace

std::string format(const Diagnostic& d) {
    std::string out = d.file.empty() ? "<input>" : d.file;
    if (d.span.line > 0) {
        out += ":" + std::to_string(d.span.line);
        if (d.span.col > 0) out += ":" + std::to_string(d.span.col);
    }
    out += ": ";
    out += label(d.severity);
    out += ": " + d.message;
    for (const auto& n : d.notes) out += "\n  note: " + n;
    return out;
}

}  // namespace tclp
