#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kData = TCLP_DATA_DIR;

struct Run {
    int status;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int status = tclp::cli::run(args, out, err);
    return {status, out.str(), err.str()};
}

std::string data(const char* dir, const char* file) { return (kData / dir / file).string(); }

}  // namespace

TEST_CASE("check reports the conflicting variable") {
    auto r = run({"check", data("catalog", "inverted_args.pl")});
    CHECK(r.status == tclp::cli::kTypeError);
    CHECK(r.err.find(":4:41: error: variable L3 is used with incompatible types list(A) and int") !=
          std::string::npos);
    CHECK(run({"check", data("infer", "append.pl")}).status == tclp::cli::kOk);
}

TEST_CASE("usage errors") {
    CHECK(run({}).status == tclp::cli::kUsage);
    CHECK(run({"check"}).status == tclp::cli::kUsage);
    CHECK(run({"check", "no/such/file.pl"}).status == tclp::cli::kUsage);
    CHECK(run({"frobnicate", data("infer", "append.pl")}).status == tclp::cli::kUsage);
    CHECK(run({"--help"}).status == tclp::cli::kOk);
}

TEST_CASE("solve") {
    auto empty = run({"solve", data("solve", "empty.ineq")});
    CHECK(empty.status == tclp::cli::kOk);
    CHECK(empty.out == "true\n");
    auto lists = run({"solve", data("solve", "lists.ineq")});
    CHECK(lists.out == "X = list(float)\nY = float\n");
    auto unsat = run({"solve", data("solve", "unsat.ineq")});
    CHECK(unsat.status == tclp::cli::kTypeError);
    CHECK(unsat.out.rfind("UNSAT", 0) == 0);
}

TEST_CASE("output does not depend on the number of jobs") {
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(kData / "catalog")) files.push_back(e.path().string());
    std::sort(files.begin(), files.end());
    std::vector<std::string> one{"--machine", "check"}, many{"--machine", "-j", "4", "check"};
    one.insert(one.end(), files.begin(), files.end());
    many.insert(many.end(), files.begin(), files.end());
    auto a = run(one), b = run(many), c = run(many);
    CHECK(a.status == tclp::cli::kTypeError);
    CHECK(a.out == b.out);
    CHECK(b.out == c.out);
}

TEST_CASE("inferred types check when written back as declarations") {
    fs::path typ = fs::temp_directory_path() / "tclp_test_flatten.typ";
    auto i = run({"infer", "--emit-types", typ.string(), data("infer", "flatten.pl")});
    REQUIRE(i.status == tclp::cli::kOk);
    std::ifstream in(typ);
    std::stringstream text;
    text << in.rdbuf();
    CHECK(text.str() == ":- pred append(list(A), list(A), list(A)).\n:- pred flatten(term, list(term)).\n");
    CHECK(run({"check", "--types", typ.string(), data("infer", "flatten.pl")}).status == tclp::cli::kOk);
    fs::remove(typ);
}

TEST_CASE("sr-test modes") {
    auto plain = run({"sr-test", "--mode", "substitution", data("sr", "substitution.pl")});
    CHECK(plain.status == tclp::cli::kTypeError);
    CHECK(plain.out.find("  | p(true)\n") != std::string::npos);
    CHECK(run({"sr-test", data("sr", "substitution.pl")}).status == tclp::cli::kOk);
    CHECK(run({"sr-test", "--mode", "tclp", data("sr", "append.pl")}).status == tclp::cli::kOk);
    CHECK(run({"sr-test", "--mode", "other", data("sr", "append.pl")}).status == tclp::cli::kUsage);
}
