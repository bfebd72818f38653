#include "tclp/inference.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace tclp {

namespace {

std::string key_text(const SymbolKey& k) { return k.first + "/" + std::to_string(k.second); }

SymbolKey key_of(const Term& t) { return {t.name, t.arity()}; }

TypeTerm substitute(const TypeTerm& t, const std::map<ParamId, ParamId>& m) {
    if (t.is_param()) {
        auto it = m.find(t.param_id());
        return it == m.end() ? t : TypeTerm::param(it->second);
    }
    std::vector<TypeTerm> args;
    for (const auto& a : t.args()) args.push_back(substitute(a, m));
    return TypeTerm::ctor(t.name(), std::move(args));
}

/// Union-find over parameters; the smaller identifier is the representative.
class Merger {
public:
    ParamId find(ParamId p) const {
        auto it = parent_.find(p);
        return it == parent_.end() ? p : find(it->second);
    }
    void merge(ParamId a, ParamId b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent_[b] = a;
    }
    std::map<ParamId, ParamId> mapping() const {
        std::map<ParamId, ParamId> m;
        for (const auto& [p, q] : parent_) m[p] = find(q);
        return m;
    }

private:
    std::map<ParamId, ParamId> parent_;
};

InequalitySystem rewrite(const InequalitySystem& s, const std::map<ParamId, ParamId>& m) {
    InequalitySystem out;
    for (const auto& q : s.inequalities) {
        TypeTerm l = substitute(q.lhs, m), r = substitute(q.rhs, m);
        if (l != r) out.add(std::move(l), std::move(r), q.origin);
    }
    return out;
}

std::size_t ensure(FlatSystem& f, ParamId p) {
    auto it = f.index_of.find(p);
    if (it != f.index_of.end()) return it->second;
    return f.add_param(p, true);
}

bool usable(const LatticeResult& r) { return r.satisfiable_over_types(); }

/// Adds `target` as both bounds of a new parameter equal to `at`.
void pin(FlatSystem& f, std::size_t at, const FlatBound& target) {
    std::size_t q = f.add_param(f.next_fresh++, false);
    f.params[q].lower = target;
    f.params[q].upper = target;
    f.edges.emplace_back(at, q);
    f.edges.emplace_back(q, at);
}

bool finite_at(const FlatSystem& f, std::size_t i, const ConstructorTable& table) {
    return extract_one(f, i, ExtractMode::Max, table).has_value() &&
           extract_one(f, i, ExtractMode::Min, table).has_value();
}

std::string probe_name(std::size_t k) { return std::string(kProbePrefix) + std::to_string(k); }

bool contains_bottom(const TypeTerm& t) {
    if (t.is_param()) return false;
    if (t.is_bottom()) return true;
    return std::any_of(t.args().begin(), t.args().end(), contains_bottom);
}

/// Renumbers parameters 0, 1, ... in order of appearance.
std::vector<TypeTerm> localize(const std::vector<TypeTerm>& ts) {
    std::map<ParamId, ParamId> m;
    std::function<void(const TypeTerm&)> visit = [&](const TypeTerm& t) {
        if (t.is_param()) {
            m.emplace(t.param_id(), static_cast<ParamId>(m.size()));
            return;
        }
        for (const auto& a : t.args()) visit(a);
    };
    for (const auto& t : ts) visit(t);
    std::vector<TypeTerm> out;
    for (const auto& t : ts) out.push_back(substitute(t, m));
    return out;
}

struct GroupState {
    Generated all;
    std::map<SymbolKey, std::vector<TypeTerm>> unknown;
    std::map<SymbolKey, std::vector<std::vector<ParamId>>> positions;
    std::vector<ParamId> clause_vars;
    std::vector<const Clause*> clauses;
};

void append_generated(Generated& into, Generated&& g) {
    std::size_t offset = into.origins.size();
    for (auto& o : g.origins) into.origins.push_back(std::move(o));
    for (auto& q : g.system.inequalities)
        into.system.add(std::move(q.lhs), std::move(q.rhs), q.origin == kNoOrigin ? kNoOrigin : q.origin + offset);
    into.nodes += g.nodes;
}

}  // namespace

Scheme PredicateType::scheme() const {
    Scheme s;
    s.args = heuristic;
    s.result = TypeTerm::ctor("pred");
    std::set<ParamId> ps;
    for (const auto& t : heuristic) collect_vars(t, ps);
    ParamNamer namer;
    for (ParamId p = 0; p < ps.size(); ++p) s.param_names.push_back(namer.name(p));
    return s;
}

bool InferenceReport::ok() const {
    return std::all_of(groups.begin(), groups.end(), [](const GroupResult& g) { return g.ok; });
}

std::vector<std::vector<SymbolKey>> dependency_sccs(const Program& p) {
    std::vector<SymbolKey> nodes;
    std::map<SymbolKey, std::size_t> id;
    for (const auto& c : p.clauses)
        if (id.emplace(key_of(c.head), nodes.size()).second) nodes.push_back(key_of(c.head));
    std::vector<std::vector<std::size_t>> succ(nodes.size());
    for (const auto& c : p.clauses) {
        std::size_t from = id.at(key_of(c.head));
        for (const auto& a : c.body) {
            auto it = id.find(key_of(a));
            if (it != id.end() &&
                std::find(succ[from].begin(), succ[from].end(), it->second) == succ[from].end())
                succ[from].push_back(it->second);
        }
    }
    std::vector<int> index(nodes.size(), -1), low(nodes.size(), 0);
    std::vector<bool> on_stack(nodes.size(), false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<SymbolKey>> out;
    int counter = 0;
    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (auto w : succ[v]) {
            if (index[w] < 0) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] != index[v]) return;
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        std::vector<SymbolKey> keys;
        for (auto c : comp) keys.push_back(nodes[c]);
        out.push_back(std::move(keys));
    };
    for (std::size_t v = 0; v < nodes.size(); ++v)
        if (index[v] < 0) visit(v);
    return out;
}

namespace {

bool generate_group(const std::vector<SymbolKey>& group, const Program& p, const SignatureSet& sigs,
                    const ConstructorTable& table, ParamSupply& supply, GroupState& st, GroupResult& r) {
    std::set<SymbolKey> members(group.begin(), group.end());
    for (const auto& k : group) {
        auto& v = st.unknown[k];
        for (std::size_t i = 0; i < k.second; ++i) v.push_back(supply.fresh_term());
        st.positions[k].resize(k.second);
    }
    Merger merger;
    for (const auto& c : p.clauses) {
        SymbolKey k = key_of(c.head);
        if (!members.count(k)) continue;
        st.clauses.push_back(&c);
        Generated g;
        Generator gen(sigs, table, supply, p.file);
        const auto& alpha = st.unknown[k];
        auto origin = [&](const Term& owner, std::size_t i, bool head) {
            const Term& arg = owner.args[i];
            Origin o{arg.span, key_text(key_of(owner)), i + 1, to_source(arg), {}, head};
            if (arg.is_var()) o.variable = variable_name(arg.name);
            g.origins.push_back(std::move(o));
            return g.origins.size() - 1;
        };
        try {
            // A variable argument of the head takes the predicate's unknown as its type.
            for (std::size_t i = 0; i < c.head.args.size(); ++i) {
                const Term& arg = c.head.args[i];
                if (!arg.is_var()) continue;
                st.positions[k][i].push_back(alpha[i].param_id());
                auto it = g.vars.find(arg.name);
                if (it == g.vars.end()) {
                    g.vars.emplace(arg.name, alpha[i]);
                    g.var_order.push_back(arg.name);
                } else {
                    merger.merge(it->second.param_id(), alpha[i].param_id());
                }
            }
            for (std::size_t i = 0; i < c.head.args.size(); ++i) {
                if (c.head.args[i].is_var()) continue;
                TypeTerm sigma = gen.term(c.head.args[i], g);
                g.system.add(std::move(sigma), alpha[i], origin(c.head, i, true));
            }
            for (const auto& a : c.body) {
                SymbolKey ak = key_of(a);
                if (!members.count(ak)) {
                    gen.atom(a, g);
                    continue;
                }
                ++g.nodes;
                for (std::size_t j = 0; j < a.args.size(); ++j) {
                    TypeTerm sigma = gen.term(a.args[j], g);
                    if (a.args[j].is_var()) st.positions[ak][j].push_back(sigma.param_id());
                    g.system.add(std::move(sigma), st.unknown[ak][j], origin(a, j, false));
                }
            }
        } catch (const FrontendError& e) {
            r.diagnostics.push_back(e.diagnostic());
            return false;
        }
        for (const auto& v : g.var_order) st.clause_vars.push_back(g.vars.at(v).param_id());
        append_generated(st.all, std::move(g));
    }
    auto m = merger.mapping();
    st.all.system = rewrite(st.all.system, m);
    for (auto& [k, v] : st.unknown)
        for (auto& t : v) t = substitute(t, m);
    for (auto& x : st.clause_vars) x = merger.find(x);
    for (auto& [k, pos] : st.positions)
        for (auto& ps : pos)
            for (auto& x : ps) x = merger.find(x);
    return true;
}

TypeTerm unprobe(const TypeTerm& t) {
    if (t.is_param()) return t;
    std::string_view n = t.name().str();
    if (n.substr(0, kProbePrefix.size()) == kProbePrefix)
        return TypeTerm::param(static_cast<ParamId>(std::stoul(std::string(n.substr(kProbePrefix.size())))));
    std::vector<TypeTerm> args;
    for (const auto& a : t.args()) args.push_back(unprobe(a));
    return TypeTerm::ctor(t.name(), std::move(args));
}

}  // namespace

GroupResult infer_group(const std::vector<SymbolKey>& group, const Program& p, const SignatureSet& sigs,
                        const ConstructorTable& table, const SolveOptions& options) {
    GroupResult r;
    r.preds = group;
    std::string names;
    for (const auto& k : group) names += (names.empty() ? "" : ", ") + key_text(k);
    if (!table.is_lattice()) {
        r.diagnostics.push_back(
            Diagnostic{Severity::Error, p.file, {}, "type inference for " + names + " needs a lattice hierarchy", {}});
        return r;
    }
    ParamSupply supply;
    GroupState st;
    if (!generate_group(group, p, sigs, table, supply, st, r)) return r;
    r.constraints = st.all.system.size();
    r.acyclic = classify(st.all.system).acyclic;

    SolveOptions so = options;
    so.prefer_lla = false;
    SolveOutcome base = solve_system(st.all.system, table, so);
    if (!base.satisfiable) {
        Diagnostic d = explain_failure(st.all, table, p.file, so);
        d.notes.push_back("no type can be inferred for " + names);
        r.diagnostics.push_back(std::move(d));
        return r;
    }

    std::vector<PredicateType> types;
    const FlatSystem& fmin = base.lattice->bounds;
    for (const auto& k : group) {
        PredicateType t;
        t.key = k;
        for (const auto& a : st.unknown[k]) {
            auto it = fmin.index_of.find(a.param_id());
            t.min_type.push_back(it == fmin.index_of.end()
                                     ? TypeTerm::bottom()
                                     : extract_one(fmin, it->second, ExtractMode::Min, table).value_or(TypeTerm::bottom()));
        }
        types.push_back(std::move(t));
    }

    // Variables are identified with the scheme parameters right above them.
    std::set<ParamId> alphas;
    for (const auto& [k, v] : st.unknown)
        for (const auto& a : v) alphas.insert(a.param_id());
    InequalitySystem sr = st.all.system;
    Merger rm;
    for (ParamId u : st.clause_vars) {
        for (const auto& q : st.all.system.inequalities) {
            if (!q.lhs.is_param() || q.lhs.param_id() != u || !q.rhs.is_param()) continue;
            if (alphas.count(q.rhs.param_id())) continue;
            if (rm.find(u) == rm.find(q.rhs.param_id())) continue;
            Merger trial = rm;
            trial.merge(u, q.rhs.param_id());
            auto cand = rewrite(st.all.system, trial.mapping());
            if (solve_system(cand, table, so).satisfiable) {
                rm = trial;
                sr = std::move(cand);
            }
        }
    }
    SolveOutcome merged = solve_system(sr, table, so);
    FlatSystem f = merged.satisfiable ? merged.lattice->bounds : fmin;
    if (!merged.satisfiable) rm = Merger{};

    LatticeOptions lo;
    lo.max_steps = options.max_steps;
    // Heuristic upper type of each argument, kept when the identification is consistent.
    for (std::size_t g = 0; g < group.size(); ++g) {
        const auto& k = group[g];
        for (std::size_t i = 0; i < k.second; ++i) {
            std::size_t a = ensure(f, st.unknown[k][i].param_id());
            std::set<std::size_t> vs;
            for (ParamId x : st.positions[k][i]) vs.insert(ensure(f, rm.find(x)));
            FlatSystem trial = f;
            FlatBound target{top_symbol(), {}};
            if (!vs.empty()) {
                std::size_t z = trial.add_param(trial.next_fresh++, false);
                for (auto v : vs) trial.edges.emplace_back(z, v);
                auto zr = solve_lattice(trial, table, lo);
                if (!zr.solved()) continue;
                trial = std::move(zr.bounds);
                target = trial.params[z].upper;
            }
            if (target.head == top_symbol()) {
                if (trial.params[a].lower.head == bottom_symbol()) continue;
                target = trial.params[a].lower;
            }
            pin(trial, a, target);
            auto res = solve_lattice(trial, table, lo);
            if (usable(res) && finite_at(res.bounds, a, table))
                f = std::move(res.bounds);
            else
                types[g].notes.push_back("argument " + std::to_string(i + 1) + " left at the root type");
        }
    }

    // Parameters bounded only by bottom and top become type parameters when
    // identifying them with a fresh constant keeps the system satisfiable.
    std::vector<std::size_t> cands;
    std::set<std::size_t> seen;
    std::function<void(std::size_t, int)> collect = [&](std::size_t n, int depth) {
        if (depth > 12 || !seen.insert(n).second) return;
        const auto& fp = f.params[n];
        if (fp.lower.head == bottom_symbol() && fp.upper.head == top_symbol()) {
            cands.push_back(n);
            return;
        }
        if (fp.upper.head != top_symbol())
            for (auto x : fp.upper.args) collect(x, depth + 1);
    };
    for (const auto& k : group)
        for (const auto& a : st.unknown[k]) collect(ensure(f, a.param_id()), 0);
    std::vector<std::string> probes;
    for (std::size_t c = 0; c < cands.size(); ++c) probes.push_back(probe_name(c));
    ConstructorTable probed = table.with_constants(probes);
    for (std::size_t c = 0; c < cands.size(); ++c) {
        std::size_t n = cands[c];
        if (f.params[n].lower.head != bottom_symbol() || f.params[n].upper.head != top_symbol()) continue;
        Symbol k = Symbol::intern(probes[c]);
        FlatSystem trial = f;
        pin(trial, n, FlatBound{k, {}});
        std::set<std::size_t> tied{n};
        bool ok = false;
        for (;;) {
            auto res = solve_lattice(trial, probed, lo);
            if (!res.solved()) break;
            trial = std::move(res.bounds);
            bool grew = false;
            for (std::size_t j = 0; j < trial.params.size(); ++j) {
                if (tied.count(j)) continue;
                const auto& fp = trial.params[j];
                if (fp.lower.head != k && fp.upper.head != k) continue;
                tied.insert(j);
                if (fp.lower.head == k && fp.upper.head == k) continue;
                pin(trial, j, FlatBound{k, {}});
                grew = true;
            }
            if (!grew) {
                ok = std::all_of(trial.params.begin(), trial.params.end(), [](const FlatParam& fp) {
                    return fp.upper.head != bottom_symbol() && fp.lower.head != top_symbol();
                });
                break;
            }
        }
        if (ok) f = std::move(trial);
    }

    for (std::size_t g = 0; g < group.size(); ++g) {
        std::vector<TypeTerm> h;
        for (const auto& a : st.unknown[group[g]]) {
            auto t = extract_one(f, ensure(f, a.param_id()), ExtractMode::Max, probed);
            h.push_back(t ? unprobe(*t) : render_top(TypeTerm::top(), table));
        }
        types[g].heuristic = localize(h);
    }

    // The heuristic types must type the group; otherwise fall back to a sound type.
    auto sound = [&](const std::vector<PredicateType>& ts) {
        SignatureSet trial = sigs;
        for (const auto& t : ts) {
            if (std::any_of(t.heuristic.begin(), t.heuristic.end(), contains_bottom)) return false;
            trial.set_pred(t.key.first, t.scheme());
        }
        Checker checker(table, trial, CheckOptions{options});
        return std::all_of(st.clauses.begin(), st.clauses.end(),
                           [&](const Clause* c) { return checker.check_clause(*c, p.file).ok; });
    };
    if (!sound(types)) {
        for (auto& t : types) {
            t.heuristic.assign(t.key.second, render_top(TypeTerm::top(), table));
            t.notes.push_back("heuristic type rejected by the checker; using the root type");
        }
    }
    r.types = std::move(types);
    r.ok = true;
    return r;
}

InferenceReport infer_program(const Program& p, const SignatureSet& sigs, const ConstructorTable& table,
                              const InferOptions& options) {
    InferenceReport report;
    report.signatures = sigs;
    for (const auto& group : dependency_sccs(p)) {
        std::vector<SymbolKey> todo;
        for (const auto& k : group)
            if (options.reinfer_declared || !sigs.pred(k.first, k.second)) todo.push_back(k);
        if (todo.empty()) continue;
        SignatureSet visible = report.signatures;
        for (const auto& k : todo) visible.erase_pred(k);
        GroupResult r = infer_group(todo, p, visible, table, options.solve);
        if (r.ok)
            for (const auto& t : r.types) report.signatures.set_pred(t.key.first, t.scheme());
        report.groups.push_back(std::move(r));
    }
    return report;
}

SignatureSet shadow_defined(const SignatureSet& sigs, const Program& p) {
    SignatureSet out = sigs;
    for (const auto& c : p.clauses) out.erase_pred(key_of(c.head));
    return out;
}

std::string format_type(const std::vector<TypeTerm>& args, ParamNamer& namer) {
    std::string out;
    for (const auto& a : args) out += display(a, namer) + ", ";
    if (!out.empty()) out.replace(out.size() - 2, 2, " -> ");
    return out + "pred";
}

std::string format_result(const PredicateType& t) {
    ParamNamer a, b;
    return key_text(t.key) + "\nMinimum type: " + format_type(t.min_type, a) +
           "\nHeuristic infered type: " + format_type(t.heuristic, b) + "\n";
}

}  // namespace tclp
