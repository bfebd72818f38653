#include "tclp/lla_solver.hpp"

#include <deque>
#include <stdexcept>

namespace tclp {

namespace {

class Rewriter {
public:
    Rewriter(const InequalitySystem& sys, const ConstructorTable& table, const LlaOptions& options)
        : pending_(sys.inequalities), table_(table), options_(options) {}

    LlaResult run() {
        while (true) {
            if (auto clash = decompose_all()) return fail(*clash, clash_reason(*clash));
            if (var_left()) continue;
            if (var_right()) continue;
            break;
        }
        if (pending_.empty()) {
            LlaResult r;
            r.satisfiable = true;
            r.solution = solved_;
            r.steps = steps_;
            r.trace = {trace_.begin(), trace_.end()};
            return r;
        }
        const Inequality& first = pending_.front();
        return fail(first, stuck_reason(first));
    }

private:
    // Exhausts Decomp and Triv. Returns an irreducible constructor pair if one shows up.
    std::optional<Inequality> decompose_all() {
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t i = 0; i < pending_.size(); ++i) {
                Inequality ineq = pending_[i];
                const auto& l = ineq.lhs;
                const auto& r = ineq.rhs;
                if (l.is_param() && r.is_param() && l.param_id() == r.param_id()) {
                    pending_.erase(pending_.begin() + i);
                    record("Triv", ineq);
                    changed = true;
                    break;
                }
                if (l.is_ctor() && r.is_ctor()) {
                    if (l.is_bottom() || r.is_top()) {
                        pending_.erase(pending_.begin() + i);
                        record("Decomp", ineq);
                        changed = true;
                        break;
                    }
                    const IotaMap* iota = table_.iota(l.name(), r.name());
                    if (!iota) return ineq;
                    std::vector<Inequality> parts;
                    for (std::size_t j = 0; j < r.arity(); ++j)
                        parts.push_back({l.args()[(*iota)[j]], r.args()[j], ineq.origin});
                    pending_.erase(pending_.begin() + i);
                    pending_.insert(pending_.begin() + i, parts.begin(), parts.end());
                    record("Decomp", ineq);
                    changed = true;
                    break;
                }
            }
        }
        return std::nullopt;
    }

    bool var_left() {
        for (std::size_t i = 0; i < pending_.size(); ++i) {
            const auto& ineq = pending_[i];
            if (!ineq.lhs.is_param()) continue;
            ParamId a = ineq.lhs.param_id();
            if (ineq.rhs == ineq.lhs || occurs(a, ineq.rhs)) continue;
            Inequality applied = ineq;
            pending_.erase(pending_.begin() + i);
            bind(a, applied.rhs);
            record("VarLeft", applied);
            return true;
        }
        return false;
    }

    bool var_right() {
        for (std::size_t i = 0; i < pending_.size(); ++i) {
            const auto& ineq = pending_[i];
            if (!ineq.rhs.is_param() || ineq.lhs.is_param()) continue;
            ParamId a = ineq.rhs.param_id();
            if (on_some_left(a)) continue;
            TypeTerm top = max_type(ineq.lhs, table_);
            if (occurs(a, top)) continue;
            Inequality applied = ineq;
            pending_.erase(pending_.begin() + i);
            bind(a, top);
            record("VarRight", applied);
            return true;
        }
        return false;
    }

    bool on_some_left(ParamId a) const {
        for (const auto& p : pending_)
            if (occurs(a, p.lhs)) return true;
        return false;
    }

    void bind(ParamId a, const TypeTerm& t) {
        for (auto& p : pending_) {
            p.lhs = replace_param(p.lhs, a, t);
            p.rhs = replace_param(p.rhs, a, t);
        }
        for (auto& [_, image] : solved_) image = replace_param(image, a, t);
        solved_[a] = t;
    }

    void record(const char* rule, const Inequality& ineq) {
        ++steps_;
        trace_.push_back(std::string(rule) + ": " + to_string(ineq, namer_));
        if (trace_.size() > options_.trace_limit) trace_.pop_front();
        if (options_.check_invariants) {
            InequalitySystem now{pending_};
            auto c = classify(now);
            if (!c.left_linear || !c.acyclic)
                throw std::logic_error(std::string("rule ") + rule + " broke left-linearity or acyclicity");
        }
    }

    std::string clash_reason(const Inequality& ineq) {
        return std::string(ineq.lhs.name().str()) + " is not a subtype of " + std::string(ineq.rhs.name().str());
    }

    std::string stuck_reason(const Inequality& ineq) {
        if (ineq.lhs.is_param() && occurs(ineq.lhs.param_id(), ineq.rhs))
            return "parameter occurs strictly inside its own upper bound";
        if (ineq.rhs.is_param() && occurs(ineq.rhs.param_id(), max_type(ineq.lhs, table_)))
            return "parameter occurs in the maximum type of its own lower bound";
        return "irreducible inequality";
    }

    LlaResult fail(const Inequality& ineq, std::string reason) {
        LlaResult r;
        r.satisfiable = false;
        r.failing = ineq;
        r.reason = std::move(reason);
        r.steps = steps_;
        r.trace = {trace_.begin(), trace_.end()};
        return r;
    }

    std::vector<Inequality> pending_;
    TypeSubstitution solved_;
    const ConstructorTable& table_;
    const LlaOptions& options_;
    std::size_t steps_ = 0;
    std::deque<std::string> trace_;
    ParamNamer namer_;
};

}  // namespace

LlaResult solve_lla(const InequalitySystem& sys, const ConstructorTable& table, const LlaOptions& options) {
    auto c = classify(sys);
    if (!c.left_linear || !c.acyclic)
        throw std::invalid_argument("solve_lla requires a left-linear acyclic system");
    return Rewriter(sys, table, options).run();
}

}  // namespace tclp
