#include "tclp/resolution.hpp"

#include <functional>
#include <set>
#include <stdexcept>

namespace tclp {

namespace {

bool occurs(const std::string& x, const Term& t) {
    if (t.is_var()) return t.name == x;
    return std::any_of(t.args.begin(), t.args.end(), [&](const Term& a) { return occurs(x, a); });
}

bool same_functor(const Term& a, const Term& b) {
    return a.name == b.name && a.args.size() == b.args.size() && a.literal == b.literal;
}

Term rename(const Term& t, const std::string& suffix) {
    if (t.is_var()) return Term::var(t.name + suffix, t.span);
    Term out = t;
    for (auto& a : out.args) a = rename(a, suffix);
    return out;
}

Term replace(const Term& t, const std::string& x, const Term& by) {
    if (t.is_var()) return t.name == x ? by : t;
    Term out = t;
    for (auto& a : out.args) a = replace(a, x, by);
    return out;
}

bool is_equality(const Term& a) { return a.name == "=" && a.arity() == 2; }

TypeTerm map_params(const TypeTerm& t, const std::function<TypeTerm(ParamId)>& f) {
    if (t.is_param()) return f(t.param_id());
    std::vector<TypeTerm> args;
    for (const auto& a : t.args()) args.push_back(map_params(a, f));
    return TypeTerm::ctor(t.name(), std::move(args));
}

/// Renames every parameter of the constraint types to a fresh one, consistently.
class Fresh {
public:
    explicit Fresh(ParamSupply& supply) : supply_(supply) {}
    TypeTerm operator()(const TypeTerm& t) {
        return map_params(t, [&](ParamId p) {
            auto it = map_.find(p);
            if (it == map_.end()) it = map_.emplace(p, supply_.fresh_term()).first;
            return it->second;
        });
    }

private:
    ParamSupply& supply_;
    std::map<ParamId, TypeTerm> map_;
};

std::optional<VariableTyping> typing_of(Generated g, const ConstructorTable& table) {
    SolveOptions o;
    o.prefer_lla = !table.is_lattice();
    SolveOutcome out = solve_system(g.system, table, o);
    if (!out.satisfiable) return std::nullopt;
    TypeSubstitution theta;
    if (out.lattice) {
        auto e = extract_solution(out.lattice->bounds, ExtractMode::Max, table, true);
        if (e.error != ExtractError::None) return std::nullopt;
        theta = std::move(e.solution);
    } else {
        theta = out.lla->solution;
    }
    // Head constants and leftover parameters are numbered 0, 1, ... in order.
    std::map<std::string, ParamId> kappas;
    std::map<ParamId, ParamId> params;
    ParamId next = 0;
    std::function<TypeTerm(const TypeTerm&)> local = [&](const TypeTerm& t) -> TypeTerm {
        if (t.is_param()) {
            auto [it, fresh] = params.emplace(t.param_id(), next);
            if (fresh) ++next;
            return TypeTerm::param(it->second);
        }
        std::string_view n = t.name().str();
        if (n.substr(0, kKappaPrefix.size()) == kKappaPrefix) {
            auto [it, fresh] = kappas.emplace(std::string(n), next);
            if (fresh) ++next;
            return TypeTerm::param(it->second);
        }
        std::vector<TypeTerm> args;
        for (const auto& a : t.args()) args.push_back(local(a));
        return TypeTerm::ctor(t.name(), std::move(args));
    };
    VariableTyping u;
    for (const auto& v : g.var_order) u[v] = local(apply_subst(g.vars.at(v), theta));
    return u;
}

}  // namespace

std::optional<Unifier> unify(const std::vector<Equation>& eqs) {
    Unifier u;
    std::vector<std::pair<Term, Term>> todo;
    for (const auto& e : eqs) todo.emplace_back(e.lhs, e.rhs);
    while (!todo.empty()) {
        auto [l, r] = std::move(todo.back());
        todo.pop_back();
        l = apply_unifier(u, l);
        r = apply_unifier(u, r);
        if (!l.is_var() && r.is_var()) std::swap(l, r);
        if (l.is_var()) {
            if (r.is_var() && r.name == l.name) continue;
            if (occurs(l.name, r)) return std::nullopt;
            for (auto& [x, t] : u) t = replace(t, l.name, r);
            u[l.name] = r;
            continue;
        }
        if (!same_functor(l, r)) return std::nullopt;
        for (std::size_t i = 0; i < l.args.size(); ++i) todo.emplace_back(l.args[i], r.args[i]);
    }
    return u;
}

Term apply_unifier(const Unifier& u, const Term& t) {
    if (t.is_var()) {
        auto it = u.find(t.name);
        return it == u.end() ? t : it->second;
    }
    Term out = t;
    for (auto& a : out.args) a = apply_unifier(u, a);
    return out;
}

Clause rename_apart(const Clause& c, std::size_t stamp) {
    std::string suffix = "#" + std::to_string(stamp);
    Clause out = c;
    out.head = rename(c.head, suffix);
    for (auto& a : out.body) a = rename(a, suffix);
    return out;
}

std::optional<QueryState> csld_step(const QueryState& q, const Clause& c, std::size_t k) {
    if (k >= q.goals.size()) throw std::invalid_argument("no goal at this index");
    const Term& goal = q.goals[k];
    if (goal.name != c.head.name || goal.arity() != c.head.arity())
        throw std::invalid_argument("goal " + goal.name + " does not match the clause head " + c.head.name);
    QueryState out;
    out.store = q.store;
    out.types = q.types;
    for (std::size_t i = 0; i < goal.args.size(); ++i) out.store.push_back({c.head.args[i], goal.args[i]});
    if (!unify(out.store)) return std::nullopt;
    out.goals.assign(q.goals.begin(), q.goals.begin() + static_cast<std::ptrdiff_t>(k));
    out.goals.insert(out.goals.end(), c.body.begin(), c.body.end());
    out.goals.insert(out.goals.end(), q.goals.begin() + static_cast<std::ptrdiff_t>(k) + 1, q.goals.end());
    return out;
}

QueryState substitute_step(const QueryState& q) {
    for (std::size_t i = 0; i < q.store.size(); ++i) {
        Term x = q.store[i].lhs, t = q.store[i].rhs;
        if (!x.is_var()) std::swap(x, t);
        if (!x.is_var() || occurs(x.name, t)) continue;
        QueryState out;
        for (std::size_t j = 0; j < q.store.size(); ++j)
            if (j != i)
                out.store.push_back({replace(q.store[j].lhs, x.name, t), replace(q.store[j].rhs, x.name, t)});
        for (const auto& g : q.goals) out.goals.push_back(replace(g, x.name, t));
        out.types = q.types;
        for (const auto& c : q.types)
            if (c.term.is_var() && c.term.name == x.name) out.types.push_back({t, c.type});
        return out;
    }
    return q;
}

QueryState substitute_all(const QueryState& q) {
    QueryState cur = q;
    for (;;) {
        QueryState next = substitute_step(cur);
        if (next.store.size() == cur.store.size()) return next;
        cur = std::move(next);
    }
}

std::string to_string(const QueryState& q) {
    std::string c;
    for (const auto& e : q.store) c += (c.empty() ? "" : ", ") + to_source(e.lhs) + " = " + to_source(e.rhs);
    ParamNamer names;
    for (const auto& t : q.types) c += (c.empty() ? "" : ", ") + to_source(t.term) + " : " + to_string(t.type, names);
    std::string g;
    for (const auto& a : q.goals) g += (g.empty() ? "" : ", ") + to_source(a);
    return c + " | " + g;
}

bool well_typed(const QueryState& q, const SignatureSet& sigs, const ConstructorTable& table) {
    ParamSupply supply;
    Fresh fresh(supply);
    Generated g;
    Generator gen(sigs, table, supply, {});
    try {
        for (const auto& e : q.store) gen.atom(Term::compound("=", {e.lhs, e.rhs}), g);
        for (const auto& a : q.goals) gen.atom(a, g);
        for (const auto& c : q.types) {
            TypeTerm sigma = gen.term(c.term, g);
            g.system.add(std::move(sigma), fresh(c.type));
        }
    } catch (const FrontendError&) {
        return false;
    }
    SolveOptions o;
    o.prefer_lla = !table.is_lattice();
    for (const auto& [x, t] : g.vars)
        if (t.is_param()) o.nonempty.push_back(t.param_id());
    return solve_system(g.system, table, o).satisfiable;
}

bool consistent(const QueryState& q, const SignatureSet& sigs, const ConstructorTable& table) {
    auto theta = unify(q.store);
    if (!theta) return false;
    ParamSupply supply;
    Fresh fresh(supply);
    Generated g;
    Generator gen(sigs, table, supply, {});
    try {
        for (const auto& c : q.types) {
            TypeTerm sigma = gen.term(apply_unifier(*theta, c.term), g);
            g.system.add(std::move(sigma), fresh(c.type));
        }
    } catch (const FrontendError&) {
        return false;
    }
    SolveOptions o;
    o.prefer_lla = !table.is_lattice();
    return solve_system(g.system, table, o).satisfiable;
}

std::optional<VariableTyping> clause_typing(const Clause& c, const SignatureSet& sigs, const ConstructorTable& table) {
    Checker checker(table, sigs);
    try {
        return typing_of(checker.generate(c, {}), checker.table());
    } catch (const FrontendError&) {
        return std::nullopt;
    }
}

std::optional<VariableTyping> query_typing(const Query& q, const SignatureSet& sigs, const ConstructorTable& table) {
    Checker checker(table, sigs);
    try {
        return typing_of(checker.generate(q, {}), checker.table());
    } catch (const FrontendError&) {
        return std::nullopt;
    }
}

namespace {

constexpr ParamId kStride = 256;

class Explorer {
public:
    Explorer(const Program& p, const SignatureSet& sigs, const ConstructorTable& table, const SrOptions& options,
             SrReport& report)
        : p_(p), sigs_(sigs), table_(table), options_(options), report_(report) {}

    bool prepare() {
        if (options_.mode != ReductionMode::Tclp) return true;
        for (const auto& c : p_.clauses) {
            auto u = clause_typing(c, sigs_, table_);
            if (!u) {
                report_.reason = "clause is not well-typed: " + to_source(c);
                return false;
            }
            typings_.push_back(std::move(*u));
        }
        return true;
    }

    /// Adds `x : tau` for each variable of the typing, renamed with the stamp.
    void constrain(QueryState& q, const VariableTyping& u, std::size_t stamp, const std::string& suffix) const {
        for (const auto& [x, t] : u) {
            TypeTerm shifted = map_params(t, [&](ParamId p) {
                return TypeTerm::param(static_cast<ParamId>(p + kStride * stamp));
            });
            q.types.push_back({Term::var(x + suffix), std::move(shifted)});
        }
    }

    bool typed(const QueryState& q) const { return well_typed(q, sigs_, table_); }

    /// Settles a fresh resolvent according to the mode; false when it fails.
    bool settle(QueryState& q) {
        if (options_.mode == ReductionMode::Tclp) {
            if (!consistent(q, sigs_, table_)) return false;
            if (!typed(q)) {
                fail(q);
                return true;
            }
        }
        if (options_.mode != ReductionMode::Csld) q = substitute_all(q);
        return true;
    }

    void fail(const QueryState& q) {
        if (!report_.ok) return;
        report_.ok = false;
        report_.counterexample = trace_;
        report_.counterexample.push_back(to_string(q));
    }

    void explore(const QueryState& q, std::size_t depth) {
        if (!report_.ok) return;
        if (report_.states >= options_.max_states) {
            report_.truncated = true;
            return;
        }
        ++report_.states;
        if (!typed(q)) {
            fail(q);
            return;
        }
        if (depth == options_.depth) return;
        trace_.push_back(to_string(q));
        for (std::size_t k = 0; k < q.goals.size() && report_.ok; ++k) {
            if (!step(q, k, depth)) continue;
            if (!options_.every_goal) break;
        }
        trace_.pop_back();
    }

    /// Resolves goal k in every possible way; false when the goal is a leaf.
    bool step(const QueryState& q, std::size_t k, std::size_t depth) {
        const Term& goal = q.goals[k];
        auto descend = [&](QueryState next) {
            ++report_.resolvents;
            if (!settle(next)) {
                ++report_.failures;
                return;
            }
            if (report_.ok) explore(next, depth + 1);
        };
        if (is_equality(goal) || ((goal.name == "true" || goal.name == "!") && goal.arity() == 0)) {
            QueryState next = q;
            next.goals.erase(next.goals.begin() + static_cast<std::ptrdiff_t>(k));
            if (is_equality(goal)) {
                next.store.push_back({goal.args[0], goal.args[1]});
                if (!unify(next.store)) {
                    ++report_.resolvents;
                    ++report_.failures;
                    return true;
                }
            }
            descend(std::move(next));
            return true;
        }
        bool defined = false;
        for (std::size_t i = 0; i < p_.clauses.size() && report_.ok; ++i) {
            const Clause& c = p_.clauses[i];
            if (c.head.name != goal.name || c.head.arity() != goal.arity()) continue;
            defined = true;
            std::size_t stamp = ++stamp_;
            auto next = csld_step(q, rename_apart(c, stamp), k);
            if (!next) {
                ++report_.resolvents;
                ++report_.failures;
                continue;
            }
            if (options_.mode == ReductionMode::Tclp) constrain(*next, typings_[i], stamp, "#" + std::to_string(stamp));
            descend(std::move(*next));
        }
        return defined;
    }

    std::optional<QueryState> initial(const Query& query) {
        QueryState q;
        for (const auto& a : query.goals) {
            if (is_equality(a))
                q.store.push_back({a.args[0], a.args[1]});
            else
                q.goals.push_back(a);
        }
        if (options_.mode == ReductionMode::Tclp) {
            auto u = query_typing(query, sigs_, table_);
            if (!u) {
                report_.reason = "query is not well-typed";
                return std::nullopt;
            }
            constrain(q, *u, 0, "");
            if (!consistent(q, sigs_, table_)) {
                report_.rejected = true;
                return std::nullopt;
            }
        }
        if (!unify(q.store)) return std::nullopt;
        if (options_.mode != ReductionMode::Csld) {
            trace_.push_back(to_string(q));
            if (!typed(q)) fail(q);
            trace_.clear();
            q = substitute_all(q);
        }
        return q;
    }

private:
    const Program& p_;
    const SignatureSet& sigs_;
    const ConstructorTable& table_;
    const SrOptions& options_;
    SrReport& report_;
    std::vector<VariableTyping> typings_;
    std::vector<std::string> trace_;
    std::size_t stamp_ = 0;
};

}  // namespace

SrReport subject_reduction_check(const Program& p, const Query& q, const SignatureSet& sigs,
                                 const ConstructorTable& table, const SrOptions& options) {
    SrReport report;
    if (options.require_well_typed) {
        Checker checker(table, sigs);
        for (const auto& c : p.clauses)
            if (!checker.check_clause(c, p.file).ok) {
                report.ok = false;
                report.reason = "clause is not well-typed: " + to_source(c);
                return report;
            }
        if (!checker.check_query(q, p.file).ok) {
            report.ok = false;
            report.reason = "query is not well-typed";
            return report;
        }
    }
    Explorer explorer(p, sigs, table, options, report);
    if (!explorer.prepare()) {
        report.ok = false;
        return report;
    }
    auto start = explorer.initial(q);
    if (!report.reason.empty()) report.ok = false;
    if (start && report.ok) explorer.explore(*start, 0);
    return report;
}

}  // namespace tclp
