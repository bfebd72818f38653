#pragma once

#include <random>
#include <string>

#include "tclp/parser.hpp"
#include "tclp/typechecker.hpp"

namespace testing {

/// Random well-typed programs and queries over a few list predicates, found
/// by rejection against the checker.
class SrGenerator {
public:
    static constexpr const char* kDecls =
        ":- pred app(list(A), list(A), list(A)).\n"
        ":- pred len(list(A), int).\n"
        ":- pred mem(A, list(A)).\n"
        ":- pred sum(list(float), float).\n"
        ":- pred tag(term, atom).\n";

    explicit SrGenerator(unsigned seed)
        : rng_(seed),
          table_(tclp::ConstructorTable::validate(tclp::reference_hierarchy())),
          sigs_(tclp::builtin_signatures()) {
        sigs_.override_with(tclp::parse_signatures(kDecls).signatures);
    }

    const tclp::ConstructorTable& table() const { return table_; }
    const tclp::SignatureSet& sigs() const { return sigs_; }

    /// Program text with 1 or 2 well-typed clauses per predicate.
    std::string program() {
        std::string out;
        tclp::Checker checker(table_, sigs_);
        for (const char* head : {"app", "len", "mem", "sum", "tag"}) {
            std::size_t want = 1 + pick(2), got = 0;
            for (int attempt = 0; attempt < 400 && got < want; ++attempt) {
                std::string c = clause(head);
                auto p = tclp::parse_program(c);
                if (!checker.check_clause(p.clauses[0], {}).ok) continue;
                out += c + "\n";
                ++got;
            }
        }
        return out;
    }

    /// A well-typed query, as `:- goals.` text.
    std::string query() {
        tclp::Checker checker(table_, sigs_);
        for (;;) {
            std::string q = ":- ";
            for (std::size_t k = 0, n = 1 + pick(2); k < n; ++k) q += (k ? ", " : "") + atom();
            q += ".";
            auto p = tclp::parse_program(q);
            if (checker.check_query(p.queries[0], {}).ok) return q;
        }
    }

private:
    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

    std::string var() { return std::string(1, "XYZW"[pick(4)]); }

    std::string term(int depth = 0) {
        switch (depth > 1 ? pick(4) : pick(8)) {
            case 0:
            case 1: return var();
            case 2: return "[]";
            case 3: return std::to_string(pick(3));
            case 4:
            case 5: return "[" + term(depth + 1) + "|" + term(depth + 1) + "]";
            case 6: return "1.5";
            default: return "a";
        }
    }

    std::string call(const std::string& name) {
        if (name == "app") return "app(" + term() + ", " + term() + ", " + term() + ")";
        if (name == "tag") return "tag(" + term() + ", " + term() + ")";
        return name + "(" + term() + ", " + term() + ")";
    }

    std::string atom() {
        static const char* names[] = {"app", "len", "mem", "sum", "tag"};
        switch (pick(7)) {
            case 0: return var() + " = " + term();
            case 1: return var() + " is " + var() + " + 1";
            default: return call(names[pick(5)]);
        }
    }

    std::string clause(const std::string& head) {
        std::string c = call(head);
        for (std::size_t k = 0, n = pick(3); k < n; ++k) c += (k ? ", " : " :- ") + atom();
        return c + ".";
    }

    std::mt19937 rng_;
    tclp::ConstructorTable table_;
    tclp::SignatureSet sigs_;
};

}  // namespace testing
