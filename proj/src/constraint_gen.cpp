#include "tclp/constraint_gen.hpp"

#include <set>

namespace tclp {

namespace {

TypeTerm strip_prefixes(const TypeTerm& t) {
    if (t.is_param()) return t;
    std::string_view name = t.name().str();
    for (auto prefix : {kKappaPrefix, kFrozenPrefix, kProbePrefix})
        if (name.substr(0, prefix.size()) == prefix) name.remove_prefix(prefix.size());
    std::vector<TypeTerm> args;
    for (const auto& a : t.args()) args.push_back(strip_prefixes(a));
    return TypeTerm::ctor(name, std::move(args));
}

std::string key_text(const std::string& name, std::size_t arity) { return name + "/" + std::to_string(arity); }

}  // namespace

std::string display(const TypeTerm& t, ParamNamer& namer) { return to_string(strip_prefixes(t), namer); }

std::string variable_name(const std::string& name) {
    if (name.size() > 2 && name.compare(0, 2, "_G") == 0 &&
        name.find_first_not_of("0123456789", 2) == std::string::npos)
        return "_";
    return name;
}

Generator::Generator(const SignatureSet& sigs, const ConstructorTable& table, ParamSupply& supply, std::string file)
    : sigs_(sigs), table_(table), supply_(supply), file_(std::move(file)) {}

void Generator::fail(const Term& at, const std::string& message) const {
    throw FrontendError(Diagnostic{Severity::Error, file_, at.span, message, {}});
}

TypeTerm Generator::variable(const std::string& name, Generated& out) {
    auto it = out.vars.find(name);
    if (it != out.vars.end()) return it->second;
    out.var_order.push_back(name);
    return out.vars.emplace(name, supply_.fresh_term()).first->second;
}

TypeTerm Generator::term(const Term& t, Generated& out) {
    ++out.nodes;
    if (t.is_var()) return variable(t.name, out);
    if (t.is_number()) {
        const char* k = t.literal == Term::Literal::Int ? "int" : "float";
        if (!table_.contains(Symbol::intern(k)))
            fail(t, std::string("number ") + t.name + " needs the type constructor " + k);
        return TypeTerm::ctor(k);
    }
    const Scheme* s = sigs_.fun(t.name, t.arity());
    if (!s) {
        if (t.arity() == 0 && table_.contains(Symbol::intern("atom"))) return TypeTerm::ctor("atom");
        fail(t, "undeclared function symbol " + key_text(t.name, t.arity()));
    }
    auto [args, result] = instantiate(*s, supply_);
    arguments(t, args, false, out);
    return result;
}

void Generator::arguments(const Term& a, const std::vector<TypeTerm>& expected, bool head, Generated& out) {
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        const Term& arg = a.args[i];
        TypeTerm sigma = term(arg, out);
        Origin o{arg.span, key_text(a.name, a.arity()), i + 1, to_source(arg), {}, head};
        if (arg.is_var()) o.variable = variable_name(arg.name);
        out.origins.push_back(std::move(o));
        out.system.add(std::move(sigma), expected[i], out.origins.size() - 1);
    }
}

void Generator::atom(const Term& a, Generated& out) {
    ++out.nodes;
    const Scheme* s = sigs_.pred(a.name, a.arity());
    if (!s) fail(a, "undeclared predicate " + key_text(a.name, a.arity()));
    auto inst = instantiate(*s, supply_);
    arguments(a, inst.first, false, out);
}

void Generator::head(const Term& a, Generated& out) {
    ++out.nodes;
    const Scheme* s = sigs_.pred(a.name, a.arity());
    if (!s) fail(a, "undeclared predicate " + key_text(a.name, a.arity()));
    out.head = key_text(a.name, a.arity());
    TypeSubstitution kappa;
    for (std::size_t i = 0; i < s->param_names.size(); ++i)
        kappa[static_cast<ParamId>(i)] = TypeTerm::ctor(std::string(kKappaPrefix) + s->param_names[i]);
    std::vector<TypeTerm> expected;
    for (const auto& t : s->args) expected.push_back(apply_subst(t, kappa));
    arguments(a, expected, true, out);
}

std::vector<std::string> Generator::kappa_constants(const SignatureSet& sigs) {
    std::set<std::string> names;
    for (const auto& [key, s] : sigs.preds())
        for (const auto& n : s.param_names) names.insert(std::string(kKappaPrefix) + n);
    return {names.begin(), names.end()};
}

}  // namespace tclp
