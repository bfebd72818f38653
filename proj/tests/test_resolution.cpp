#include <doctest.h>

#include <stdexcept>

#include "sr_gen.hpp"
#include "tclp/parser.hpp"
#include "tclp/resolution.hpp"

using namespace tclp;

namespace {

const ConstructorTable& reference() {
    static const ConstructorTable table = ConstructorTable::validate(reference_hierarchy());
    return table;
}

Term term(std::string_view text) { return parse_program(std::string(text) + ".").clauses.at(0).head; }

Term goal_arg(std::string_view text) { return term("g(" + std::string(text) + ")").args[0]; }

QueryState state(std::vector<std::string> goals) {
    QueryState q;
    for (const auto& g : goals) q.goals.push_back(term(g));
    return q;
}

SignatureSet with(std::string_view decls) {
    SignatureSet sigs = builtin_signatures();
    sigs.override_with(parse_signatures(decls).signatures);
    return sigs;
}

}  // namespace

TEST_CASE("unification with occurs check") {
    auto u = unify({{goal_arg("f(X, b)"), goal_arg("f(a, Y)")}});
    REQUIRE(u);
    CHECK(apply_unifier(*u, goal_arg("g(X, Y)")) == goal_arg("g(a, b)"));
    CHECK_FALSE(unify({{goal_arg("X"), goal_arg("f(X)")}}));
    CHECK_FALSE(unify({{goal_arg("a"), goal_arg("b")}}));
    CHECK_FALSE(unify({{goal_arg("1"), goal_arg("1.0")}}));
    auto chain = unify({{goal_arg("X"), goal_arg("Y")}, {goal_arg("Y"), goal_arg("[Z]")}, {goal_arg("Z"), goal_arg("c")}});
    REQUIRE(chain);
    CHECK(apply_unifier(*chain, goal_arg("X")) == goal_arg("[c]"));
}

TEST_CASE("one CSLD step") {
    Clause fact = parse_program("append([],L,L).").clauses[0];
    auto r = csld_step(state({"append([], [], R)"}), fact, 0);
    REQUIRE(r);
    CHECK(r->goals.empty());
    CHECK(r->store.size() == 3);
    auto u = unify(r->store);
    REQUIRE(u);
    CHECK(apply_unifier(*u, goal_arg("L")) == goal_arg("[]"));
    CHECK(apply_unifier(*u, goal_arg("R")) == goal_arg("[]"));

    Clause rule = parse_program("p(X) :- q(X), r.").clauses[0];
    auto s = csld_step(state({"s", "p(f(Y))", "t"}), rename_apart(rule, 4), 1);
    REQUIRE(s);
    CHECK(to_string(*s) == "X#4 = f(Y) | s, q(X#4), r, t");

    CHECK_THROWS_AS(csld_step(state({"p(a)"}), parse_program("q(X).").clauses[0], 0), std::invalid_argument);
    CHECK_FALSE(csld_step(state({"p(b)"}), parse_program("p(a).").clauses[0], 0));
}

TEST_CASE("substitution steps") {
    QueryState q = state({"p(Y)"});
    q.store.push_back({goal_arg("Y"), goal_arg("true")});
    QueryState s = substitute_step(q);
    CHECK(s.store.empty());
    CHECK(s.goals[0] == term("p(true)"));
    CHECK(to_string(substitute_step(s)) == to_string(s));

    SignatureSet sigs = with(":- pred p(int).");
    QueryState typed = q;
    typed.types.push_back({goal_arg("Y"), TypeTerm::ctor("int")});
    CHECK_FALSE(consistent(typed, sigs, reference()));
    typed.types[0].type = TypeTerm::ctor("term");
    CHECK(consistent(typed, sigs, reference()));
    QueryState after = substitute_step(typed);
    REQUIRE(after.types.size() == 2);
    CHECK(after.types[1].term == goal_arg("true"));
}

TEST_CASE("append derivations stay well-typed") {
    SignatureSet sigs = with(":- pred append(list(A), list(A), list(A)).");
    Program p = parse_program("append([],L,L).\nappend([H|T],L,[H|R]) :- append(T,L,R).\n");
    Query q = parse_program(":- append([], [], R).").queries[0];
    for (auto mode : {ReductionMode::Csld, ReductionMode::Substitution, ReductionMode::Tclp}) {
        SrOptions o;
        o.mode = mode;
        o.depth = 3;
        auto r = subject_reduction_check(p, q, sigs, reference(), o);
        CHECK(r.ok);
        CHECK(r.reason.empty());
        CHECK(r.states == 2);
        CHECK(r.failures == 1);
    }
    Query open = parse_program(":- append(X, Y, [1, 2]).").queries[0];
    SrOptions deep;
    deep.depth = 5;
    auto r = subject_reduction_check(p, open, sigs, reference(), deep);
    CHECK(r.ok);
    CHECK(r.states == 6);
}

TEST_CASE("substitution breaks typing without type constraints") {
    SignatureSet sigs = with(":- pred p(int).");
    Program p = parse_program("p(X).");
    Query q = parse_program(":- Y = true, p(Y).").queries[0];
    CHECK(Checker(reference(), sigs).check_query(q, {}).ok);

    SrOptions plain;
    plain.mode = ReductionMode::Substitution;
    auto r = subject_reduction_check(p, q, sigs, reference(), plain);
    CHECK_FALSE(r.ok);
    REQUIRE_FALSE(r.counterexample.empty());
    CHECK(r.counterexample.back() == " | p(true)");

    SrOptions csld;
    CHECK(subject_reduction_check(p, q, sigs, reference(), csld).ok);

    SrOptions typed;
    typed.mode = ReductionMode::Tclp;
    auto t = subject_reduction_check(p, q, sigs, reference(), typed);
    CHECK(t.ok);
    CHECK(t.rejected);
    CHECK(t.states == 0);
}

TEST_CASE("definitional genericity is needed for subject reduction") {
    auto decls = parse_signatures(
        ":- con ta/0.\n:- con tb/0.\n:- con pred/0.\n"
        ":- fun a : ta.\n:- fun b : tb.\n"
        ":- pred p(A).\n:- pred q(tb).\n:- pred '='(U, U).\n");
    auto table = ConstructorTable::validate(decls.hierarchy);
    Program p = parse_program("p(a).");
    // Herbrand equality rejects b = a outright, so the ill-typed resolvent goes through a variable.
    Query q = parse_program(":- p(Y), q(Y).").queries[0];
    Checker checker(table, decls.signatures);
    CHECK_FALSE(checker.check_clause(p.clauses[0], {}).ok);
    CHECK(checker.check_query(q, {}).ok);

    SrOptions o;
    CHECK_FALSE(subject_reduction_check(p, q, decls.signatures, table, o).ok);
    o.require_well_typed = false;
    auto r = subject_reduction_check(p, q, decls.signatures, table, o);
    CHECK_FALSE(r.ok);
    REQUIRE(r.counterexample.size() == 2);
    CHECK(r.counterexample.back() == "a = Y | q(Y)");
}

TEST_CASE("substituting commutes with accumulating") {
    testing::SrGenerator gen(3);
    std::size_t compared = 0;
    for (int i = 0; i < 100; ++i) {
        Program p = parse_program(gen.program());
        Program query = parse_program(gen.query());
        QueryState q;
        q.goals = query.queries[0].goals;
        // Follow the leftmost derivation through the first matching clause.
        for (std::size_t step = 0; step < 4 && !q.goals.empty(); ++step) {
            const Term& g = q.goals[0];
            std::optional<QueryState> next;
            for (const auto& c : p.clauses)
                if (c.head.name == g.name && c.head.arity() == g.arity()) {
                    next = csld_step(q, rename_apart(c, step + 1), 0);
                    if (next) break;
                }
            if (!next) break;
            q = *next;
            auto acc = unify(q.store);
            REQUIRE(acc);
            QueryState sub = substitute_all(q);
            auto rest = unify(sub.store);
            REQUIRE(rest);
            REQUIRE(sub.goals.size() == q.goals.size());
            for (std::size_t k = 0; k < q.goals.size(); ++k)
                CHECK(apply_unifier(*acc, q.goals[k]) == apply_unifier(*rest, sub.goals[k]));
            ++compared;
        }
    }
    CHECK(compared > 20);
}

TEST_CASE("random well-typed programs reduce to well-typed queries") {
    testing::SrGenerator gen(5);
    std::size_t states = 0;
    for (int i = 0; i < 60; ++i) {
        std::string text = gen.program();
        Program p = parse_program(text);
        Query q = parse_program(gen.query()).queries[0];
        INFO(text);
        for (auto mode : {ReductionMode::Csld, ReductionMode::Tclp}) {
            SrOptions o;
            o.mode = mode;
            o.depth = 4;
            auto r = subject_reduction_check(p, q, gen.sigs(), gen.table(), o);
            CHECK(r.ok);
            CHECK(r.reason.empty());
            states += r.states;
        }
    }
    CHECK(states > 200);
}

TEST_CASE("a variable under several type constraints takes their meet") {
    SignatureSet sigs = with(":- pred app(list(A), list(A), list(A)).");
    QueryState q = state({"app([], [], [Y|Y])"});
    q.types.push_back({goal_arg("Y"), TypeTerm::ctor("term")});
    q.types.push_back({goal_arg("Y"), TypeTerm::ctor("list", {TypeTerm::ctor("term")})});
    CHECK(well_typed(q, sigs, reference()));
    q.types.push_back({goal_arg("Y"), TypeTerm::ctor("int")});
    CHECK_FALSE(well_typed(q, sigs, reference()));

    Program p = parse_program("app(W, [], X).");
    Query start = parse_program(":- W = Y, app([], [], [W|W]).").queries[0];
    SrOptions o;
    o.mode = ReductionMode::Tclp;
    CHECK(subject_reduction_check(p, start, sigs, reference(), o).ok);
}
