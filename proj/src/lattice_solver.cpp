#include "tclp/lattice_solver.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

namespace tclp {

std::size_t FlatSystem::add_param(ParamId id, bool original) {
    FlatParam p;
    p.id = id;
    p.original = original;
    params.push_back(std::move(p));
    std::size_t i = params.size() - 1;
    if (original) index_of[id] = i;
    return i;
}

namespace {

class Flattener {
public:
    explicit Flattener(FlatSystem& f) : f_(f) {}

    std::size_t index(ParamId p) {
        auto it = f_.index_of.find(p);
        if (it != f_.index_of.end()) return it->second;
        return f_.add_param(p, true);
    }

    std::size_t fresh() { return f_.add_param(f_.next_fresh++, false); }

    FlatBound bound(const TypeTerm& t, bool lower, std::size_t origin) {
        FlatBound b{t.name(), {}};
        for (const auto& a : t.args()) {
            if (a.is_param()) {
                b.args.push_back(index(a.param_id()));
                continue;
            }
            std::size_t g = fresh();
            FlatBound inner = bound(a, lower, origin);
            if (lower) {
                f_.params[g].lower = std::move(inner);
                f_.params[g].lower_origin = origin;
            } else {
                f_.params[g].upper = std::move(inner);
                f_.params[g].upper_origin = origin;
            }
            b.args.push_back(g);
        }
        return b;
    }

    void set_lower(std::size_t i, FlatBound b, std::size_t origin) {
        if (f_.params[i].lower.head != bottom_symbol()) {
            std::size_t q = fresh();
            f_.edges.emplace_back(q, i);
            i = q;
        }
        f_.params[i].lower = std::move(b);
        f_.params[i].lower_origin = origin;
    }

    void set_upper(std::size_t i, FlatBound b, std::size_t origin) {
        if (f_.params[i].upper.head != top_symbol()) {
            std::size_t q = fresh();
            f_.edges.emplace_back(i, q);
            i = q;
        }
        f_.params[i].upper = std::move(b);
        f_.params[i].upper_origin = origin;
    }

    void add(const Inequality& ineq) {
        const auto& l = ineq.lhs;
        const auto& r = ineq.rhs;
        if ((l.is_ctor() && l.is_bottom()) || (r.is_ctor() && r.is_top())) return;
        if (l.is_param() && r.is_param()) {
            std::size_t a = index(l.param_id());
            std::size_t b = index(r.param_id());
            if (a != b) f_.edges.emplace_back(a, b);
        } else if (r.is_param()) {
            std::size_t b = index(r.param_id());
            set_lower(b, bound(l, true, ineq.origin), ineq.origin);
        } else if (l.is_param()) {
            std::size_t a = index(l.param_id());
            set_upper(a, bound(r, false, ineq.origin), ineq.origin);
        } else {
            std::size_t d = fresh();
            set_lower(d, bound(l, true, ineq.origin), ineq.origin);
            set_upper(d, bound(r, false, ineq.origin), ineq.origin);
        }
    }

private:
    FlatSystem& f_;
};

}  // namespace

FlatSystem flatten(const InequalitySystem& sys) {
    FlatSystem f;
    ParamId top = 0;
    for (const auto& i : sys.inequalities) {
        for (auto p : vars_of(i.lhs)) top = std::max(top, p + 1);
        for (auto p : vars_of(i.rhs)) top = std::max(top, p + 1);
    }
    f.next_fresh = top;
    Flattener fl(f);
    for (const auto& i : sys.inequalities) fl.add(i);
    return f;
}

namespace {

class Saturator {
public:
    Saturator(FlatSystem flat, const ConstructorTable& table, const LatticeOptions& options)
        : f_(std::move(flat)), table_(table), options_(options) {
        succ_.resize(f_.params.size());
        pred_.resize(f_.params.size());
    }

    LatticeResult run() {
        auto initial = f_.edges;
        for (auto [a, b] : initial) add_edge(a, b);
        for (std::size_t i = 0; i < f_.params.size(); ++i) push({Task::Dec, i, i});
        while (!work_.empty()) {
            if (steps_ >= options_.max_steps) return finish(LatticeStatus::StepLimit);
            Task t = work_.front();
            work_.pop_front();
            ++steps_;
            switch (t.kind) {
                case Task::Dec:
                    if (!dec(t.a)) return finish(LatticeStatus::Clash);
                    break;
                case Task::Glb: glb(t.a, t.b); break;
                case Task::Lub: lub(t.a, t.b); break;
            }
        }
        return finish(LatticeStatus::Solved);
    }

private:
    struct Task {
        enum Kind { Dec, Glb, Lub } kind;
        std::size_t a, b;
    };

    void push(Task t) { work_.push_back(t); }

    std::size_t fresh() {
        std::size_t i = f_.add_param(f_.next_fresh++, false);
        succ_.emplace_back();
        pred_.emplace_back();
        return i;
    }

    bool related(std::size_t a, std::size_t b) const { return a == b || succ_[a].count(b); }

    void add_edge(std::size_t a, std::size_t b) {
        std::vector<std::pair<std::size_t, std::size_t>> stack{{a, b}};
        while (!stack.empty()) {
            auto [x, y] = stack.back();
            stack.pop_back();
            if (x == y || succ_[x].count(y)) continue;
            succ_[x].insert(y);
            pred_[y].insert(x);
            note("Trans", x, y);
            push({Task::Glb, x, y});
            push({Task::Lub, x, y});
            for (auto p : pred_[x]) stack.emplace_back(p, y);
            for (auto s : succ_[y]) stack.emplace_back(x, s);
        }
    }

    std::size_t meet(std::size_t x, std::size_t y) {
        if (related(x, y)) return x;
        if (related(y, x)) return y;
        auto key = std::minmax(x, y);
        auto it = meets_.find(key);
        if (it != meets_.end()) return it->second;
        std::size_t z = fresh();
        meets_[key] = z;
        add_edge(z, x);
        add_edge(z, y);
        return z;
    }

    std::size_t join(std::size_t x, std::size_t y) {
        if (related(x, y)) return y;
        if (related(y, x)) return x;
        auto key = std::minmax(x, y);
        auto it = joins_.find(key);
        if (it != joins_.end()) return it->second;
        std::size_t z = fresh();
        joins_[key] = z;
        add_edge(x, z);
        add_edge(y, z);
        return z;
    }

    // Positions of `to` reached from the arguments of `from`, for from <= to.
    static std::vector<std::optional<std::size_t>> spread(const FlatBound& from, const IotaMap* iota,
                                                          std::size_t to_arity, bool from_is_lower) {
        std::vector<std::optional<std::size_t>> out(to_arity);
        if (!iota || iota->empty()) return out;
        if (from_is_lower) {
            // from <= to: arg k of `to` is arg iota[k] of `from`.
            for (std::size_t k = 0; k < to_arity; ++k) out[k] = from.args[(*iota)[k]];
        } else {
            // to <= from: arg i of `from` sits at position iota[i] of `to`.
            for (std::size_t i = 0; i < from.args.size(); ++i) out[(*iota)[i]] = from.args[i];
        }
        return out;
    }

    // ub(a) := glb(ub(a), ub(b)) for a <= b.
    void glb(std::size_t a, std::size_t b) {
        FlatBound x = f_.params[a].upper;
        FlatBound y = f_.params[b].upper;
        if (y.head == top_symbol()) return;
        Symbol k = table_.glb(x.head, y.head);
        FlatBound next{k, {}};
        if (k != bottom_symbol()) {
            std::size_t n = table_.arity(k);
            auto from_x = spread(x, table_.iota(k, x.head), n, false);
            auto from_y = spread(y, table_.iota(k, y.head), n, false);
            for (std::size_t i = 0; i < n; ++i) {
                if (from_x[i] && from_y[i]) next.args.push_back(meet(*from_x[i], *from_y[i]));
                else if (from_x[i]) next.args.push_back(*from_x[i]);
                else if (from_y[i]) next.args.push_back(*from_y[i]);
                else next.args.push_back(fresh());
            }
        }
        if (next == f_.params[a].upper) return;
        if (next.head != x.head) f_.params[a].upper_origin = f_.params[b].upper_origin;
        f_.params[a].upper = std::move(next);
        note("Glb", a, b);
        push({Task::Dec, a, a});
        for (auto p : pred_[a]) push({Task::Glb, p, a});
    }

    // lb(b) := lub(lb(a), lb(b)) for a <= b.
    void lub(std::size_t a, std::size_t b) {
        FlatBound x = f_.params[a].lower;
        FlatBound y = f_.params[b].lower;
        if (x.head == bottom_symbol()) return;
        Symbol k = table_.lub(x.head, y.head);
        FlatBound next{k, {}};
        if (k != top_symbol()) {
            std::size_t n = table_.arity(k);
            auto from_x = spread(x, table_.iota(x.head, k), n, true);
            auto from_y = spread(y, table_.iota(y.head, k), n, true);
            for (std::size_t i = 0; i < n; ++i) {
                if (from_x[i] && from_y[i]) next.args.push_back(join(*from_x[i], *from_y[i]));
                else if (from_x[i]) next.args.push_back(*from_x[i]);
                else if (from_y[i]) next.args.push_back(*from_y[i]);
                else next.args.push_back(fresh());
            }
        }
        if (next == f_.params[b].lower) return;
        if (next.head != y.head) f_.params[b].lower_origin = f_.params[a].lower_origin;
        f_.params[b].lower = std::move(next);
        note("Lub", a, b);
        push({Task::Dec, b, b});
        for (auto s : succ_[b]) push({Task::Lub, b, s});
    }

    bool dec(std::size_t i) {
        const FlatBound lo = f_.params[i].lower;
        const FlatBound hi = f_.params[i].upper;
        if (lo.head == bottom_symbol() || hi.head == top_symbol()) return true;
        const IotaMap* iota = table_.iota(lo.head, hi.head);
        if (!iota) {
            note("Clash", i, i);
            const auto& p = f_.params[i];
            clash_ = LatticeClash{p.id, lo.head, hi.head, p.lower_origin, p.upper_origin};
            return false;
        }
        for (std::size_t j = 0; j < hi.args.size(); ++j) add_edge(lo.args[(*iota)[j]], hi.args[j]);
        return true;
    }

    void note(const char* rule, std::size_t a, std::size_t b) {
        if (options_.trace_limit == 0) return;
        std::string line = std::string(rule) + ": #" + std::to_string(f_.params[a].id);
        if (a != b) line += " <= #" + std::to_string(f_.params[b].id);
        trace_.push_back(std::move(line));
        if (trace_.size() > options_.trace_limit) trace_.pop_front();
    }

    LatticeResult finish(LatticeStatus status) {
        LatticeResult r;
        r.status = status;
        r.clash = clash_;
        r.steps = steps_;
        r.trace = {trace_.begin(), trace_.end()};
        f_.edges.clear();
        for (std::size_t a = 0; a < succ_.size(); ++a)
            for (auto b : succ_[a]) f_.edges.emplace_back(a, b);
        r.bounds = std::move(f_);
        return r;
    }

    FlatSystem f_;
    const ConstructorTable& table_;
    const LatticeOptions& options_;
    std::vector<std::set<std::size_t>> succ_, pred_;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> meets_, joins_;
    std::deque<Task> work_;
    std::size_t steps_ = 0;
    std::optional<LatticeClash> clash_;
    std::deque<std::string> trace_;
};

}  // namespace

bool LatticeResult::satisfiable_over_types() const {
    if (!solved()) return false;
    for (const auto& p : bounds.params)
        if (p.upper.head == bottom_symbol() || p.lower.head == top_symbol()) return false;
    return true;
}

std::optional<std::size_t> LatticeResult::bottom_upper() const {
    for (std::size_t i = 0; i < bounds.params.size(); ++i)
        if (bounds.params[i].upper.head == bottom_symbol()) return i;
    return std::nullopt;
}

LatticeResult solve_lattice(FlatSystem flat, const ConstructorTable& table, const LatticeOptions& options) {
    if (!table.is_lattice()) throw std::invalid_argument("solve_lattice requires a lattice hierarchy");
    return Saturator(std::move(flat), table, options).run();
}

LatticeResult solve_lattice(const InequalitySystem& sys, const ConstructorTable& table, const LatticeOptions& options) {
    return solve_lattice(flatten(sys), table, options);
}

namespace {

class Unfolder {
public:
    Unfolder(const FlatSystem& f, ExtractMode mode, const ConstructorTable& table)
        : f_(f), mode_(mode), table_(table), state_(f.params.size(), 0) {}

    std::optional<TypeTerm> unfold(std::size_t i) {
        if (state_[i] == 2) return memo_.at(i);
        if (state_[i] == 1) return std::nullopt;
        state_[i] = 1;
        std::optional<TypeTerm> out = compute(i);
        if (!out) return std::nullopt;
        state_[i] = 2;
        memo_[i] = *out;
        return out;
    }

private:
    std::optional<TypeTerm> build(const FlatBound& b) {
        std::vector<TypeTerm> args;
        for (auto a : b.args) {
            auto t = unfold(a);
            if (!t) return std::nullopt;
            args.push_back(std::move(*t));
        }
        return TypeTerm::ctor(b.head, std::move(args));
    }

    std::optional<TypeTerm> compute(std::size_t i) {
        const auto& p = f_.params[i];
        if (mode_ == ExtractMode::Min) return build(p.lower);
        if (p.upper.head != top_symbol()) return build(p.upper);
        if (p.lower.head == bottom_symbol() || p.lower.head == top_symbol()) return TypeTerm::top();
        // No upper bound: the maximum above the lower bound, unfolding only
        // the arguments that survive into the root.
        Symbol root = table_.max_of(p.lower.head);
        const IotaMap* iota = table_.iota(p.lower.head, root);
        std::vector<TypeTerm> args;
        for (std::size_t k = 0; iota && k < iota->size(); ++k) {
            auto a = unfold(p.lower.args[(*iota)[k]]);
            if (!a) return std::nullopt;
            args.push_back(max_type(*a, table_));
        }
        return TypeTerm::ctor(root, std::move(args));
    }

    const FlatSystem& f_;
    ExtractMode mode_;
    const ConstructorTable& table_;
    std::vector<int> state_;
    std::map<std::size_t, TypeTerm> memo_;
};

}  // namespace

std::optional<TypeTerm> extract_one(const FlatSystem& bounds, std::size_t index, ExtractMode mode,
                                    const ConstructorTable& table) {
    Unfolder u(bounds, mode, table);
    auto t = u.unfold(index);
    if (t && mode == ExtractMode::Max) return render_top(*t, table);
    return t;
}

Extraction extract_solution(const FlatSystem& bounds, ExtractMode mode, const ConstructorTable& table,
                            bool no_bottom) {
    Extraction out;
    if (no_bottom) {
        for (const auto& p : bounds.params) {
            if (p.upper.head == bottom_symbol()) {
                out.error = ExtractError::InvalidBottom;
                return out;
            }
        }
    }
    Unfolder u(bounds, mode, table);
    for (const auto& [id, index] : bounds.index_of) {
        auto t = u.unfold(index);
        if (!t) {
            out.error = ExtractError::NotFinite;
            out.solution.clear();
            return out;
        }
        out.solution[id] = mode == ExtractMode::Max ? render_top(*t, table) : *t;
    }
    return out;
}

}  // namespace tclp
