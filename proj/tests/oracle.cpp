#include "oracle.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace oracle {

using tclp::ConDecl;
using tclp::HierarchyDecls;
using tclp::SubDecl;

ConstructorTable small_lattice() {
    HierarchyDecls d;
    d.constructors = {{"term", 0}, {"float", 0}, {"int", 0}, {"atom", 0}, {"list", 1}, {"nelist", 1}};
    auto a = TypeTerm::param(0);
    d.edges = {
        {TypeTerm::ctor("int"), TypeTerm::ctor("float")},
        {TypeTerm::ctor("float"), TypeTerm::ctor("term")},
        {TypeTerm::ctor("atom"), TypeTerm::ctor("term")},
        {TypeTerm::ctor("list", {a}), TypeTerm::ctor("term")},
        {TypeTerm::ctor("nelist", {a}), TypeTerm::ctor("list", {a})},
    };
    return ConstructorTable::validate(d, tclp::LatticeMode::Required);
}

std::vector<TypeTerm> ground_universe(const ConstructorTable& table, std::size_t max_size) {
    // by_size[s] holds every ground type of size exactly s.
    std::vector<std::vector<TypeTerm>> by_size(max_size + 1);
    for (std::size_t s = 1; s <= max_size; ++s) {
        for (auto k : table.constructors()) {
            std::size_t n = table.arity(k);
            if (n == 0) {
                if (s == 1) by_size[1].push_back(TypeTerm::ctor(k));
                continue;
            }
            // Distribute s-1 over n arguments, each at least 1.
            std::vector<TypeTerm> args;
            std::function<void(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t left) {
                if (i == n) {
                    if (left == 0) by_size[s].push_back(TypeTerm::ctor(k, args));
                    return;
                }
                for (std::size_t part = 1; part <= left; ++part) {
                    for (const auto& t : by_size[part]) {
                        args.push_back(t);
                        go(i + 1, left - part);
                        args.pop_back();
                    }
                }
            };
            go(0, s - 1);
        }
    }
    std::vector<TypeTerm> out;
    for (auto& v : by_size) out.insert(out.end(), v.begin(), v.end());
    return out;
}

BruteForce::BruteForce(const ConstructorTable& table, std::vector<TypeTerm> universe)
    : table_(table), universe_(std::move(universe)) {}

namespace {

bool holds(const tclp::Inequality& i, const TypeSubstitution& theta, const ConstructorTable& table) {
    return tclp::subtype_check(tclp::apply_subst(i.lhs, theta), tclp::apply_subst(i.rhs, theta), table);
}

std::set<ParamId> params_of(const tclp::Inequality& i) {
    auto s = tclp::vars_of(i.lhs);
    tclp::collect_vars(i.rhs, s);
    return s;
}

// ready[d]: inequalities whose last parameter in `order` is order[d].
std::vector<std::vector<std::size_t>> schedule(const InequalitySystem& sys, const std::vector<ParamId>& order) {
    std::vector<std::vector<std::size_t>> ready(order.size());
    for (std::size_t k = 0; k < sys.size(); ++k) {
        auto ps = params_of(sys.inequalities[k]);
        if (ps.empty()) continue;
        std::size_t last = 0;
        for (std::size_t d = 0; d < order.size(); ++d)
            if (ps.count(order[d])) last = d;
        ready[last].push_back(k);
    }
    return ready;
}

}  // namespace

bool BruteForce::search(const InequalitySystem& sys, const std::vector<ParamId>& order, std::size_t depth,
                        TypeSubstitution& theta, const std::vector<std::vector<std::size_t>>& ready) const {
    if (depth == order.size()) return true;
    for (const auto& v : universe_) {
        theta[order[depth]] = v;
        bool ok = true;
        for (auto k : ready[depth])
            if (!holds(sys.inequalities[k], theta, table_)) {
                ok = false;
                break;
            }
        if (ok && search(sys, order, depth + 1, theta, ready)) return true;
    }
    theta.erase(order[depth]);
    return false;
}

std::optional<TypeSubstitution> BruteForce::find(const InequalitySystem& sys) const {
    TypeSubstitution empty;
    for (const auto& i : sys.inequalities)
        if (params_of(i).empty() && !holds(i, empty, table_)) return std::nullopt;
    std::set<ParamId> all;
    for (const auto& i : sys.inequalities)
        for (auto p : params_of(i)) all.insert(p);
    std::vector<ParamId> order(all.begin(), all.end());
    auto ready = schedule(sys, order);
    TypeSubstitution theta;
    if (!search(sys, order, 0, theta, ready)) return std::nullopt;
    return theta;
}

std::map<ParamId, std::vector<TypeTerm>> BruteForce::projections(const InequalitySystem& sys) const {
    std::map<ParamId, std::vector<TypeTerm>> out;
    if (!find(sys)) return out;
    std::set<ParamId> all;
    for (const auto& i : sys.inequalities)
        for (auto p : params_of(i)) all.insert(p);
    for (auto p : all) {
        // Restrict to the connected component of p; the rest is satisfiable on its own.
        std::set<ParamId> comp{p};
        bool grew = true;
        while (grew) {
            grew = false;
            for (const auto& i : sys.inequalities) {
                auto ps = params_of(i);
                bool touches = std::any_of(ps.begin(), ps.end(), [&](ParamId q) { return comp.count(q); });
                if (!touches) continue;
                for (auto q : ps) grew |= comp.insert(q).second;
            }
        }
        InequalitySystem sub;
        for (const auto& i : sys.inequalities) {
            auto ps = params_of(i);
            if (!ps.empty() && comp.count(*ps.begin())) sub.inequalities.push_back(i);
        }
        std::vector<ParamId> order{p};
        for (auto q : comp)
            if (q != p) order.push_back(q);
        auto ready = schedule(sub, order);
        for (const auto& v : universe_) {
            TypeSubstitution theta{{p, v}};
            bool ok = true;
            for (auto k : ready[0])
                if (!holds(sub.inequalities[k], theta, table_)) {
                    ok = false;
                    break;
                }
            if (ok && search(sub, order, 1, theta, ready)) out[p].push_back(v);
        }
    }
    return out;
}

TypeTerm random_type(std::mt19937& rng, const ConstructorTable& table, std::uint32_t params, int depth) {
    auto ctors = table.constructors();
    std::uniform_int_distribution<int> coin(0, 99);
    if (params > 0 && (depth == 0 || coin(rng) < 40))
        return TypeTerm::param(std::uniform_int_distribution<std::uint32_t>(0, params - 1)(rng));
    std::vector<tclp::Symbol> pick;
    for (auto k : ctors)
        if (depth > 0 || table.arity(k) == 0) pick.push_back(k);
    auto k = pick[std::uniform_int_distribution<std::size_t>(0, pick.size() - 1)(rng)];
    std::vector<TypeTerm> args;
    for (std::size_t i = 0; i < table.arity(k); ++i) args.push_back(random_type(rng, table, params, depth - 1));
    return TypeTerm::ctor(k, std::move(args));
}

InequalitySystem random_system(std::mt19937& rng, const ConstructorTable& table, std::size_t max_ineqs,
                               std::uint32_t params, bool lla) {
    std::uniform_int_distribution<std::size_t> count(1, max_ineqs);
    std::uniform_int_distribution<int> deep(0, 99);
    while (true) {
        InequalitySystem sys;
        std::size_t n = count(rng);
        for (std::size_t i = 0; i < n; ++i) {
            int dl = deep(rng) < 20 ? 2 : 1;
            int dr = deep(rng) < 20 ? 2 : 1;
            sys.add(random_type(rng, table, params, dl), random_type(rng, table, params, dr));
        }
        if (!lla) return sys;
        auto c = tclp::classify(sys);
        if (c.left_linear && c.acyclic) return sys;
    }
}

TypeTerm ground_with(const TypeTerm& t, const TypeTerm& by) {
    if (t.is_param()) return by;
    std::vector<TypeTerm> args;
    for (const auto& a : t.args()) args.push_back(ground_with(a, by));
    return TypeTerm::ctor(t.name(), std::move(args));
}

}  // namespace oracle

#include "tclp/lattice_solver.hpp"
#include "tclp/lla_solver.hpp"

namespace oracle {

namespace {

std::set<ParamId> all_params(const InequalitySystem& sys) {
    std::set<ParamId> out;
    for (const auto& i : sys.inequalities) {
        tclp::collect_vars(i.lhs, out);
        tclp::collect_vars(i.rhs, out);
    }
    return out;
}

// Ground every parameter of the system through theta, sending leftovers to term.
TypeSubstitution grounded(const InequalitySystem& sys, const TypeSubstitution& theta) {
    TypeSubstitution out;
    for (auto p : all_params(sys)) {
        auto it = theta.find(p);
        TypeTerm t = it == theta.end() ? TypeTerm::param(p) : it->second;
        out[p] = ground_with(t, TypeTerm::ctor("term"));
    }
    return out;
}

std::size_t max_size(const TypeSubstitution& theta) {
    std::size_t m = 0;
    for (const auto& [_, t] : theta) m = std::max(m, tclp::type_size(t));
    return m;
}

}  // namespace

Comparison compare(const InequalitySystem& sys, const ConstructorTable& table, const BruteForce& bf) {
    Comparison c;
    auto cls = tclp::classify(sys);
    c.acyclic = cls.acyclic;
    c.lla_applicable = cls.left_linear && cls.acyclic;
    c.lhs_size = sys.lhs_size();
    c.oracle_sat = bf.find(sys).has_value();
    std::size_t bound = 0;
    for (const auto& u : bf.universe()) bound = std::max(bound, tclp::type_size(u));

    std::map<ParamId, std::vector<TypeTerm>> proj;
    if (c.oracle_sat) proj = bf.projections(sys);

    auto fail = [&](std::string why) {
        if (c.problem.empty()) c.problem = std::move(why);
    };

    // Checks a verified solver answer against the oracle verdict.
    auto verdict = [&](const char* who, bool sat, const TypeSubstitution* witness) {
        if (sat) {
            if (!tclp::satisfies(sys, *witness, table)) return fail(std::string(who) + ": solution does not satisfy");
            if (!c.oracle_sat) {
                if (max_size(*witness) <= bound) return fail(std::string(who) + ": oracle missed a bounded solution");
                c.beyond_bound = true;
            }
        } else if (c.oracle_sat) {
            fail(std::string(who) + ": unsat but the oracle found a solution");
        }
    };

    std::optional<bool> lattice_sat;
    if (c.acyclic) {
        auto r = tclp::solve_lattice(sys, table);
        if (r.status == tclp::LatticeStatus::StepLimit) fail("lattice: step limit");
        bool sat = r.satisfiable_over_types();
        lattice_sat = sat;
        if (sat) {
            auto hi = tclp::extract_solution(r.bounds, tclp::ExtractMode::Max, table, true);
            auto lo = tclp::extract_solution(r.bounds, tclp::ExtractMode::Min, table);
            if (!hi.ok() || !lo.ok()) {
                fail("lattice: extraction failed");
            } else {
                auto w = grounded(sys, hi.solution);
                verdict("lattice", true, &w);
                for (const auto& [p, values] : proj) {
                    auto mx = hi.solution.count(p) ? hi.solution.at(p) : TypeTerm::ctor("term");
                    for (const auto& v : values) {
                        if (!tclp::subtype_check(v, mx, table)) fail("lattice: max does not dominate");
                        if (lo.solution.count(p) && !tclp::subtype_check(lo.solution.at(p), v, table))
                            fail("lattice: min is not below an oracle solution");
                    }
                }
            }
        } else {
            verdict("lattice", false, nullptr);
        }
    }

    if (c.lla_applicable) {
        tclp::LlaOptions opt;
        opt.check_invariants = true;
        tclp::LlaResult r;
        try {
            r = tclp::solve_lla(sys, table, opt);
        } catch (const std::logic_error& e) {
            fail(std::string("lla: ") + e.what());
            return c;
        }
        c.lla_steps = r.steps;
        if (r.steps > c.lhs_size) fail("lla: step bound exceeded");
        if (r.satisfiable) {
            auto w = grounded(sys, r.solution);
            verdict("lla", true, &w);
            for (const auto& [p, values] : proj)
                for (const auto& v : values)
                    if (!tclp::subtype_check(v, w.at(p), table)) fail("lla: solution is not maximal");
        } else {
            verdict("lla", false, nullptr);
        }
        if (lattice_sat && *lattice_sat != r.satisfiable) fail("lla and lattice verdicts differ");
        c.solver_sat = r.satisfiable;
    } else if (lattice_sat) {
        c.solver_sat = *lattice_sat;
    }
    return c;
}

}  // namespace oracle
