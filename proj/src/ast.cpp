#include "tclp/ast.hpp"

#include <algorithm>
#include <cctype>

namespace tclp {

Term Term::var(std::string name, SourceSpan span) {
    Term t;
    t.kind = Kind::Var;
    t.name = std::move(name);
    t.span = span;
    return t;
}

Term Term::atom(std::string name, SourceSpan span) { return compound(std::move(name), {}, span); }

Term Term::compound(std::string name, std::vector<Term> args, SourceSpan span) {
    Term t;
    t.name = std::move(name);
    t.args = std::move(args);
    t.span = span;
    return t;
}

Term Term::number(std::string text, Literal kind, SourceSpan span) {
    Term t;
    t.name = std::move(text);
    t.literal = kind;
    t.span = span;
    return t;
}

bool operator==(const Term& a, const Term& b) {
    return a.kind == b.kind && a.literal == b.literal && a.name == b.name && a.args == b.args;
}

namespace {

bool symbol_char(char c) { return std::string_view("+-*/\\^<>=~:.?@#&$").find(c) != std::string_view::npos; }

bool needs_quotes(const std::string& name) {
    if (name.empty()) return true;
    if (name == "!" || name == ";" || name == "{}") return false;
    if (std::islower(static_cast<unsigned char>(name[0])))
        return !std::all_of(name.begin(), name.end(),
                            [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
    return !std::all_of(name.begin(), name.end(), symbol_char);
}

std::string quoted(const std::string& name) {
    if (!needs_quotes(name)) return name;
    std::string out = "'";
    for (char c : name) {
        if (c == '\'' || c == '\\') out += '\\';
        out += c;
    }
    return out + "'";
}

}  // namespace

std::string to_source(const Term& t) {
    if (t.is_var() || t.is_number()) return t.name;
    std::string out = quoted(t.name);
    if (t.args.empty()) return out;
    out += '(';
    for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) out += ", ";
        out += to_source(t.args[i]);
    }
    return out + ')';
}

std::string to_source(const Clause& c) {
    std::string out = to_source(c.head);
    for (std::size_t i = 0; i < c.body.size(); ++i) {
        out += i == 0 ? " :- " : ", ";
        out += to_source(c.body[i]);
    }
    return out + ".";
}

void collect_variables(const Term& t, std::vector<std::string>& out) {
    if (t.is_var()) {
        if (std::find(out.begin(), out.end(), t.name) == out.end()) out.push_back(t.name);
        return;
    }
    for (const auto& a : t.args) collect_variables(a, out);
}

std::vector<std::string> clause_variables(const Clause& c) {
    std::vector<std::string> out;
    collect_variables(c.head, out);
    for (const auto& b : c.body) collect_variables(b, out);
    return out;
}

std::vector<std::string> query_variables(const Query& q) {
    std::vector<std::string> out;
    for (const auto& g : q.goals) collect_variables(g, out);
    return out;
}

}  // namespace tclp
