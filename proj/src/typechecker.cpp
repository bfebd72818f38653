#include "tclp/typechecker.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace tclp {

namespace {

constexpr int kUnfoldDepth = 12;

TypeTerm unfold(const FlatSystem& f, std::size_t i, bool upper, int depth) {
    const FlatParam& p = f.params[i];
    const FlatBound& b = upper ? p.upper : p.lower;
    Symbol open = upper ? top_symbol() : bottom_symbol();
    if (b.head == open || depth > kUnfoldDepth) return TypeTerm::param(p.id);
    std::vector<TypeTerm> args;
    for (auto a : b.args) args.push_back(unfold(f, a, upper, depth + 1));
    return TypeTerm::ctor(b.head, std::move(args));
}

TypeTerm map_params(const TypeTerm& t, const std::function<TypeTerm(ParamId)>& f) {
    if (t.is_param()) return f(t.param_id());
    std::vector<TypeTerm> args;
    for (const auto& a : t.args()) args.push_back(map_params(a, f));
    return TypeTerm::ctor(t.name(), std::move(args));
}

bool mentions_kappa(const TypeTerm& t) {
    if (t.is_param()) return false;
    if (t.name().str().substr(0, kKappaPrefix.size()) == kKappaPrefix) return true;
    return std::any_of(t.args().begin(), t.args().end(), mentions_kappa);
}

InequalitySystem prefix(const InequalitySystem& sys, std::size_t k) {
    InequalitySystem out;
    out.inequalities.assign(sys.inequalities.begin(), sys.inequalities.begin() + static_cast<std::ptrdiff_t>(k));
    return out;
}

std::string where(const Origin& o) {
    return std::string(o.head ? "head " : "") + "argument " + std::to_string(o.index) + " of " + o.symbol;
}

}  // namespace

TypeTerm SolveOutcome::upper(ParamId p, const ConstructorTable&) const {
    if (lattice) {
        auto it = lattice->bounds.index_of.find(p);
        if (it != lattice->bounds.index_of.end()) return unfold(lattice->bounds, it->second, true, 0);
    } else if (lla) {
        auto it = lla->solution.find(p);
        if (it != lla->solution.end()) return it->second;
    }
    return TypeTerm::param(p);
}

TypeTerm SolveOutcome::lower(ParamId p, const ConstructorTable& table) const {
    if (lattice) {
        auto it = lattice->bounds.index_of.find(p);
        if (it != lattice->bounds.index_of.end()) return unfold(lattice->bounds, it->second, false, 0);
        return TypeTerm::param(p);
    }
    return upper(p, table);
}

TypeTerm SolveOutcome::upper_of(const TypeTerm& t, const ConstructorTable& table) const {
    return map_params(t, [&](ParamId p) { return upper(p, table); });
}

TypeTerm SolveOutcome::lower_of(const TypeTerm& t, const ConstructorTable& table) const {
    return map_params(t, [&](ParamId p) { return lower(p, table); });
}

SolveOutcome solve_system(const InequalitySystem& sys, const ConstructorTable& table, const SolveOptions& options) {
    SolveOutcome out;
    auto shape = classify(sys);
    bool lla_ok = shape.left_linear && shape.acyclic;
    if (lla_ok && (options.prefer_lla || !table.is_lattice())) {
        out.solver = SolveOutcome::Solver::Lla;
        out.lla = solve_lla(sys, table);
        out.satisfiable = out.lla->satisfiable;
        out.reason = out.lla->reason;
        return out;
    }
    if (!table.is_lattice()) {
        out.reason = "the type hierarchy is not a lattice, so systems where a variable occurs more than once "
                     "cannot be solved";
        return out;
    }
    out.solver = SolveOutcome::Solver::Lattice;
    LatticeOptions lo;
    lo.max_steps = options.max_steps;
    out.lattice = solve_lattice(sys, table, lo);
    const auto& r = *out.lattice;
    if (r.status == LatticeStatus::StepLimit) {
        out.reason = "solver step limit reached";
        return out;
    }
    out.satisfiable = r.satisfiable_over_types();
    if (out.satisfiable && !options.nonempty.empty() && !inhabit(*out.lattice, options.nonempty, table, lo)) {
        out.satisfiable = false;
        out.reason = "a variable can only have the empty type";
    }
    if (out.satisfiable && !shape.acyclic &&
        !extract_solution(r.bounds, ExtractMode::Max, table, true).ok()) {
        out.satisfiable = false;
        out.reason = "only infinite types satisfy the constraints";
    }
    if (!out.satisfiable && out.reason.empty()) out.reason = r.clash ? "constructor clash" : "empty type required";
    return out;
}

bool inhabit(LatticeResult& r, const std::vector<ParamId>& vars, const ConstructorTable& table,
             const LatticeOptions& options) {
    std::vector<Symbol> minimal;
    auto ks = table.constructors();
    for (Symbol k : ks) {
        if (k == bottom_symbol() || k == top_symbol()) continue;
        bool least = std::none_of(ks.begin(), ks.end(), [&](Symbol d) {
            return d != k && d != bottom_symbol() && table.leq(d, k);
        });
        if (least) minimal.push_back(k);
    }
    for (ParamId p : vars) {
        auto it = r.bounds.index_of.find(p);
        if (it == r.bounds.index_of.end()) continue;
        std::size_t i = it->second;
        const FlatParam& fp = r.bounds.params[i];
        // A parameter without an upper bound can take the value of anything above it.
        if (fp.lower.head != bottom_symbol() || fp.upper.head == top_symbol()) continue;
        Symbol above = fp.upper.head;
        bool done = false;
        for (Symbol m : minimal) {
            if (!table.leq(m, above)) continue;
            FlatSystem f = r.bounds;
            FlatBound b{m, {}};
            for (std::size_t j = 0; j < table.arity(m); ++j) b.args.push_back(f.add_param(f.next_fresh++, false));
            std::size_t q = f.add_param(f.next_fresh++, false);
            f.params[q].lower = b;
            f.params[q].upper = b;
            f.edges.emplace_back(q, i);
            LatticeResult next = solve_lattice(f, table, options);
            if (next.satisfiable_over_types()) {
                r = std::move(next);
                done = true;
                break;
            }
        }
        if (!done) return false;
    }
    return true;
}

Diagnostic explain_failure(const Generated& g, const ConstructorTable& table, const std::string& file,
                           const SolveOptions& options) {
    SolveOptions opts = options;
    opts.prefer_lla = !table.is_lattice();
    const auto& ineqs = g.system.inequalities;
    std::size_t lo = 0, hi = ineqs.size();  // prefix lo is satisfiable, prefix hi is not
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (solve_system(prefix(g.system, mid), table, opts).satisfiable)
            lo = mid;
        else
            hi = mid;
    }
    Diagnostic d{Severity::Error, file, {}, "type error", {}};
    if (ineqs.empty()) return d;
    const Inequality& q = ineqs[hi - 1];
    const Origin* o = q.origin < g.origins.size() ? &g.origins[q.origin] : nullptr;
    if (o) d.span = o->span;
    SolveOutcome prior = solve_system(prefix(g.system, hi - 1), table, opts);
    ParamNamer names;
    TypeTerm expected = prior.upper_of(q.rhs, table);
    bool kappa = mentions_kappa(expected);

    TypeTerm before = q.lhs.is_param() ? prior.upper(q.lhs.param_id(), table) : q.lhs;
    if (o && !o->variable.empty() && !before.is_param()) {
        kappa = kappa || mentions_kappa(before);
        d.message = "variable " + o->variable + " is used with incompatible types " + display(before, names) +
                    " and " + display(expected, names);
        for (std::size_t j = 0; j + 1 < hi; ++j) {
            const auto& e = ineqs[j];
            if (e.lhs == q.lhs && e.origin < g.origins.size()) {
                d.notes.push_back(o->variable + " has type " + display(prior.upper_of(e.rhs, table), names) + " in " +
                                  where(g.origins[e.origin]));
                break;
            }
        }
        d.notes.push_back(o->variable + " has type " + display(expected, names) + " in " + where(*o));
    } else {
        TypeTerm actual = prior.lower_of(q.lhs, table);
        d.message = (o ? where(*o) + ": " : std::string()) + display(actual, names) + " is not a subtype of " +
                    display(expected, names);
    }
    if (kappa) {
        std::string pred = g.head.empty() ? "the head predicate" : g.head;
        d.notes.push_back("parameters of the declared type of " + pred +
                          " may only be renamed in a clause head, not instantiated");
    }
    return d;
}

bool CheckReport::ok() const {
    return std::all_of(entries.begin(), entries.end(), [](const ClauseReport& r) { return r.ok; });
}

std::size_t CheckReport::errors() const {
    return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const auto& r) { return !r.ok; }));
}

TypeTerm frozen(ParamId p) { return TypeTerm::ctor(std::string(kFrozenPrefix) + std::to_string(p)); }

VariableTyping freeze(const VariableTyping& u) {
    VariableTyping out;
    for (const auto& [x, t] : u) out[x] = map_params(t, frozen);
    return out;
}

Checker::Checker(const ConstructorTable& table, const SignatureSet& sigs, CheckOptions options)
    : table_(table.with_constants(Generator::kappa_constants(sigs))), sigs_(sigs), options_(options) {}

const ConstructorTable& Checker::table_for(const VariableTyping* declared) {
    if (!declared) return table_;
    std::set<ParamId> ps;
    for (const auto& [x, t] : *declared) collect_vars(t, ps);
    if (ps.empty()) return table_;
    std::vector<std::string> names;
    for (auto p : ps) names.push_back(std::string(frozen(p).name().str()));
    frozen_table_ = table_.with_constants(names);
    return *frozen_table_;
}

Generated Checker::generate(const Clause& c, const std::string& file, const VariableTyping* declared) {
    Generated g;
    if (declared) g.vars = freeze(*declared);
    for (const auto& v : clause_variables(c))
        if (g.vars.count(v)) g.var_order.push_back(v);
    Generator gen(sigs_, declared ? table_for(declared) : table_, supply_, file);
    gen.head(c.head, g);
    for (const auto& a : c.body) gen.atom(a, g);
    return g;
}

Generated Checker::generate(const Query& q, const std::string& file, const VariableTyping* declared) {
    Generated g;
    if (declared) g.vars = freeze(*declared);
    for (const auto& v : query_variables(q))
        if (g.vars.count(v)) g.var_order.push_back(v);
    Generator gen(sigs_, declared ? table_for(declared) : table_, supply_, file);
    for (const auto& a : q.goals) gen.atom(a, g);
    return g;
}

ClauseReport Checker::finish(ClauseReport r, const Generated& g, const std::string& file,
                             const ConstructorTable& table) {
    r.constraints = g.system.size();
    r.nodes = g.nodes;
    SolveOptions opts = options_.solve;
    for (const auto& v : g.var_order)
        if (g.vars.at(v).is_param()) opts.nonempty.push_back(g.vars.at(v).param_id());
    SolveOutcome out = solve_system(g.system, table, opts);
    r.solver = out.solver == SolveOutcome::Solver::Lla       ? "lla"
               : out.solver == SolveOutcome::Solver::Lattice ? "lattice"
                                                             : "none";
    r.ok = out.satisfiable;
    if (!r.ok) {
        if (out.solver == SolveOutcome::Solver::None)
            r.diagnostics.push_back(Diagnostic{Severity::Error, file, r.span, out.reason, {}});
        else
            r.diagnostics.push_back(explain_failure(g, table, file, opts));
        return r;
    }
    if (table.is_lattice() && !out.lattice) {
        SolveOptions o = opts;
        o.prefer_lla = false;
        out = solve_system(g.system, table, o);
    }
    ParamNamer names;
    for (const auto& v : g.var_order) {
        const TypeTerm& t = g.vars.at(v);
        VariableBounds b{variable_name(v), {}, {}};
        if (out.lattice) {
            const auto& bounds = out.lattice->bounds;
            auto bound = [&](const TypeTerm& x, ExtractMode mode) {
                return map_params(x, [&](ParamId p) {
                    auto it = bounds.index_of.find(p);
                    if (it == bounds.index_of.end()) return TypeTerm::param(p);
                    return extract_one(bounds, it->second, mode, table).value_or(TypeTerm::param(p));
                });
            };
            b.lower = display(bound(t, ExtractMode::Min), names);
            b.upper = display(bound(t, ExtractMode::Max), names);
        } else {
            b.upper = display(out.upper_of(t, table), names);
        }
        r.typing.push_back(std::move(b));
    }
    return r;
}

ClauseReport Checker::check_clause(const Clause& c, const std::string& file, const VariableTyping* declared) {
    ClauseReport r;
    r.span = c.span;
    r.text = to_source(c);
    Generated g;
    try {
        g = generate(c, file, declared);
    } catch (const FrontendError& e) {
        r.diagnostics.push_back(e.diagnostic());
        return r;
    }
    return finish(std::move(r), g, file, declared ? table_for(declared) : table_);
}

ClauseReport Checker::check_query(const Query& q, const std::string& file, const VariableTyping* declared) {
    ClauseReport r;
    r.kind = ClauseReport::Kind::Query;
    r.span = q.span;
    for (std::size_t i = 0; i < q.goals.size(); ++i) r.text += (i ? ", " : ":- ") + to_source(q.goals[i]);
    r.text += ".";
    Generated g;
    try {
        g = generate(q, file, declared);
    } catch (const FrontendError& e) {
        r.diagnostics.push_back(e.diagnostic());
        return r;
    }
    return finish(std::move(r), g, file, declared ? table_for(declared) : table_);
}

CheckReport Checker::check_program(const Program& p) {
    CheckReport report;
    report.warnings = p.warnings;
    for (const auto& c : p.clauses) report.entries.push_back(check_clause(c, p.file));
    for (const auto& q : p.queries) report.entries.push_back(check_query(q, p.file));
    return report;
}

}  // namespace tclp
