#include "tclp/inequality.hpp"

#include <functional>
#include <map>
#include <set>

namespace tclp {

std::size_t InequalitySystem::lhs_size() const {
    std::size_t n = 0;
    for (const auto& i : inequalities) n += type_size(i.lhs);
    return n;
}

std::size_t InequalitySystem::symbol_count() const {
    std::size_t n = 0;
    for (const auto& i : inequalities) n += type_size(i.lhs) + type_size(i.rhs);
    return n;
}

Classification classify(const InequalitySystem& sys) {
    Classification c;
    std::map<ParamId, int> left_count;
    std::map<ParamId, std::set<ParamId>> graph;
    for (const auto& ineq : sys.inequalities) {
        std::vector<ParamId> left;
        std::set<ParamId> seen;
        std::function<void(const TypeTerm&)> count = [&](const TypeTerm& t) {
            if (t.is_param()) {
                if (++left_count[t.param_id()] > 1) c.left_linear = false;
                left.push_back(t.param_id());
                return;
            }
            for (const auto& a : t.args()) count(a);
        };
        count(ineq.lhs);
        auto right = vars_of(ineq.rhs);
        for (auto l : left) {
            auto& succ = graph[l];
            succ.insert(right.begin(), right.end());
        }
    }

    // Iterative DFS cycle detection.
    std::map<ParamId, int> state;  // 0 unvisited, 1 on stack, 2 done
    for (const auto& [root, _] : graph) {
        if (state[root]) continue;
        std::vector<std::pair<ParamId, std::set<ParamId>::const_iterator>> stack;
        state[root] = 1;
        stack.emplace_back(root, graph[root].cbegin());
        while (!stack.empty() && c.acyclic) {
            auto& [node, it] = stack.back();
            const auto& succ = graph[node];
            if (it == succ.cend()) {
                state[node] = 2;
                stack.pop_back();
                continue;
            }
            ParamId next = *it++;
            if (state[next] == 1) {
                c.acyclic = false;
            } else if (state[next] == 0) {
                state[next] = 1;
                stack.emplace_back(next, graph[next].cbegin());
            }
        }
        if (!c.acyclic) break;
    }
    return c;
}

bool satisfies(const InequalitySystem& sys, const TypeSubstitution& theta, const ConstructorTable& table) {
    for (const auto& i : sys.inequalities)
        if (!subtype_check(apply_subst(i.lhs, theta), apply_subst(i.rhs, theta), table)) return false;
    return true;
}

std::string to_string(const Inequality& ineq, ParamNamer& namer) {
    return to_string(ineq.lhs, namer) + " <= " + to_string(ineq.rhs, namer);
}

}  // namespace tclp
