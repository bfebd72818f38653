#include "tclp/signatures.hpp"

#include <algorithm>
#include <set>

#include "tclp/parser.hpp"

namespace tclp {

namespace {

constexpr std::string_view kHierarchy = R"(
:- con term/0.
:- con pred/0.
:- con atom/0.
:- con float/0.
:- con int/0.
:- con list/1.
:- sub pred < term.
:- sub atom < term.
:- sub float < term.
:- sub int < float.
:- sub list(A) < term.
)";

constexpr std::string_view kBuiltins = R"(
:- fun nil : list(A).
:- fun cons(A, list(A)) : list(A).
:- fun true : pred.
:- fun fail : pred.
:- fun '+'(float, float) : float.
:- fun '-'(float, float) : float.
:- fun '*'(float, float) : float.
:- fun '/'(float, float) : float.
:- fun '-'(float) : float.
:- fun '//'(int, int) : int.
:- fun mod(int, int) : int.
:- fun rem(int, int) : int.
:- fun abs(float) : float.
:- fun min(float, float) : float.
:- fun max(float, float) : float.

:- pred '='(U, U).
:- pred '\\='(U, U).
:- pred '=='(term, term).
:- pred '\\=='(term, term).
:- pred is(float, float).
:- pred '<'(float, float).
:- pred '>'(float, float).
:- pred '=<'(float, float).
:- pred '>='(float, float).
:- pred '=:='(float, float).
:- pred '=\\='(float, float).
:- pred length(list(A), int).
:- pred true.
:- pred fail.
:- pred !.
:- pred var(term).
:- pred nonvar(term).
:- pred atom(term).
:- pred number(term).
:- pred integer(term).
:- pred call(pred).
:- pred functor(term, atom, int).
:- pred arg(int, term, term).
:- pred write(term).
:- pred nl.
)";

[[noreturn]] void decl_error(const std::string& file, SourceSpan at, std::string msg) {
    throw FrontendError(Diagnostic{Severity::Error, file, at, std::move(msg), {}});
}

Scheme make_scheme(const std::vector<Term>& arg_terms, const Term* result_term, const std::string& file,
                   SourceSpan at) {
    Scheme s;
    s.file = file;
    s.line = at.line;
    for (const auto& a : arg_terms) s.args.push_back(type_from_term(a, s.param_names, file));
    s.result = result_term ? type_from_term(*result_term, s.param_names, file) : TypeTerm::ctor("pred");
    return s;
}

TypeTerm foreign_type(const Term& spec, const std::string& file) {
    const Term* t = &spec;
    if (!t->is_var() && t->arity() == 1 && (t->name == "+" || t->name == "-")) t = &t->args[0];
    static const std::map<std::string, std::string> names = {
        {"integer", "int"}, {"float", "float"}, {"number", "float"}, {"atom", "atom"},
        {"string", "atom"}, {"term", "term"},   {"address", "term"},
    };
    if (t->is_var() || t->arity() != 0 || !names.count(t->name))
        decl_error(file, spec.span, "unsupported foreign argument specification " + to_source(spec));
    return TypeTerm::ctor(names.at(t->name));
}

void load_one(const Term& body, const std::string& file, TypeDeclarations& into) {
    SourceSpan at = body.span;
    const std::string& kind = body.name;
    if (kind == "foreign") {
        if (body.arity() != 2 || body.args[1].is_var())
            decl_error(file, at, "foreign declarations have the form foreign(Name, Name(Spec, ...))");
        const Term& spec = body.args[1];
        Scheme s;
        s.file = file;
        s.line = at.line;
        for (const auto& a : spec.args) s.args.push_back(foreign_type(a, file));
        s.result = TypeTerm::ctor("pred");
        into.signatures.add_pred(spec.name, std::move(s));
        return;
    }
    if (body.arity() != 1) decl_error(file, at, "malformed " + kind + " declaration");
    const Term& arg = body.args[0];
    if (kind == "con") {
        if (arg.is_var() || arg.name != "/" || arg.arity() != 2 || arg.args[0].is_var() ||
            arg.args[0].arity() != 0 || arg.args[1].literal != Term::Literal::Int || arg.args[1].name[0] == '-')
            decl_error(file, at, "constructor declarations have the form con Name/Arity");
        into.hierarchy.constructors.push_back({arg.args[0].name, std::stoul(arg.args[1].name), at.line});
    } else if (kind == "sub") {
        if (arg.is_var() || arg.name != "<" || arg.arity() != 2)
            decl_error(file, at, "subtype declarations have the form sub Lower < Upper");
        std::vector<std::string> names;
        TypeTerm lower = type_from_term(arg.args[0], names, file);
        TypeTerm upper = type_from_term(arg.args[1], names, file);
        into.hierarchy.edges.push_back({std::move(lower), std::move(upper), at.line});
    } else if (kind == "fun") {
        if (arg.is_var() || arg.name != ":" || arg.arity() != 2 || arg.args[0].is_var())
            decl_error(file, at, "function declarations have the form fun f(T1, ..., Tn) : T");
        const Term& sym = arg.args[0];
        Scheme s = make_scheme(sym.args, &arg.args[1], file, at);
        if (!is_flat(s.result))
            decl_error(file, at,
                       "result type of " + sym.name + "/" + std::to_string(sym.arity()) + " must be a flat type");
        into.signatures.add_fun(sym.name, std::move(s));
    } else if (kind == "pred") {
        if (arg.is_var() || arg.is_number()) decl_error(file, at, "predicate declarations have the form pred p(T1, ..., Tn)");
        into.signatures.add_pred(arg.name, make_scheme(arg.args, nullptr, file, at));
    } else {
        decl_error(file, at, "unknown declaration " + kind);
    }
}

}  // namespace

void SignatureSet::add_fun(const std::string& name, Scheme s) {
    SymbolKey key{name, s.args.size()};
    if (funs_.count(key))
        decl_error(s.file, {s.line, 0}, "duplicate signature for function " + name + "/" + std::to_string(key.second));
    funs_.emplace(key, std::move(s));
}

void SignatureSet::add_pred(const std::string& name, Scheme s) {
    SymbolKey key{name, s.args.size()};
    if (preds_.count(key))
        decl_error(s.file, {s.line, 0}, "duplicate signature for predicate " + name + "/" + std::to_string(key.second));
    preds_.emplace(key, std::move(s));
}

const Scheme* SignatureSet::fun(const std::string& name, std::size_t arity) const {
    auto it = funs_.find({name, arity});
    return it == funs_.end() ? nullptr : &it->second;
}

const Scheme* SignatureSet::pred(const std::string& name, std::size_t arity) const {
    auto it = preds_.find({name, arity});
    return it == preds_.end() ? nullptr : &it->second;
}

void SignatureSet::override_with(const SignatureSet& other) {
    for (const auto& [k, s] : other.funs_) funs_[k] = s;
    for (const auto& [k, s] : other.preds_) preds_[k] = s;
}

void load_declarations(const std::vector<Directive>& directives, const std::string& file, TypeDeclarations& into) {
    for (const auto& d : directives) load_one(d.body, file, into);
}

TypeDeclarations parse_signatures(std::string_view text, const std::string& file) {
    Program p = parse_program(text, file);
    if (!p.clauses.empty())
        decl_error(file, p.clauses.front().span, "type files may only contain declarations");
    if (!p.queries.empty())
        decl_error(file, p.queries.front().span, "unknown declaration " + to_source(p.queries.front().goals.front()));
    TypeDeclarations out;
    load_declarations(p.declarations, file, out);
    return out;
}

HierarchyDecls reference_hierarchy() { return parse_signatures(kHierarchy, "<reference>").hierarchy; }

SignatureSet builtin_signatures() { return parse_signatures(kBuiltins, "<builtin>").signatures; }

TypeTerm type_from_term(const Term& t, std::vector<std::string>& names, const std::string& file) {
    if (t.is_var()) {
        auto it = std::find(names.begin(), names.end(), t.name);
        if (it != names.end()) return TypeTerm::param(static_cast<ParamId>(it - names.begin()));
        names.push_back(t.name);
        return TypeTerm::param(static_cast<ParamId>(names.size() - 1));
    }
    if (t.is_number()) decl_error(file, t.span, "a number is not a type: " + t.name);
    if (t.name == "top" || t.name == "bottom")
        decl_error(file, t.span, "'" + t.name + "' is reserved and cannot be used in declarations");
    std::vector<TypeTerm> args;
    for (const auto& a : t.args) args.push_back(type_from_term(a, names, file));
    return TypeTerm::ctor(t.name, std::move(args));
}

std::pair<std::vector<TypeTerm>, TypeTerm> instantiate(const Scheme& s, ParamSupply& supply) {
    TypeSubstitution rename;
    for (std::size_t i = 0; i < s.param_names.size(); ++i) rename[static_cast<ParamId>(i)] = supply.fresh_term();
    std::vector<TypeTerm> args;
    for (const auto& a : s.args) args.push_back(apply_subst(a, rename));
    return {std::move(args), apply_subst(s.result, rename)};
}

std::vector<Diagnostic> check_against(const SignatureSet& sigs, const ConstructorTable& table) {
    std::vector<Diagnostic> out;
    auto check = [&](const std::string& kind, const SymbolKey& key, const Scheme& s) {
        auto bad = [&](const TypeTerm& t) { return !well_formed(t, table) || t.is_top() || t.is_bottom(); };
        bool wrong = bad(s.result) || std::any_of(s.args.begin(), s.args.end(), bad);
        if (wrong)
            out.push_back(Diagnostic{Severity::Error, s.file, {s.line, 0},
                                     "signature of " + kind + " " + key.first + "/" + std::to_string(key.second) +
                                         " uses an undeclared type constructor or a wrong arity",
                                     {}});
    };
    for (const auto& [k, s] : sigs.funs()) check("function", k, s);
    for (const auto& [k, s] : sigs.preds()) check("predicate", k, s);
    return out;
}

std::string to_string(const std::string& name, const Scheme& s) {
    ParamNamer namer;
    std::string out = name + " : ";
    for (std::size_t i = 0; i < s.args.size(); ++i) {
        if (i) out += ", ";
        out += to_string(s.args[i], namer);
    }
    if (!s.args.empty()) out += " -> ";
    return out + to_string(s.result, namer);
}

bool is_flat(const TypeTerm& t) {
    if (t.is_param()) return false;
    std::set<ParamId> seen;
    for (const auto& a : t.args())
        if (!a.is_param() || !seen.insert(a.param_id()).second) return false;
    return true;
}

}  // namespace tclp
