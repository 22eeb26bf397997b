#include <gtest/gtest.h>

#include <sstream>

#include "cli.hpp"
#include "json.hpp"

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run(std::vector<std::string> args) {
    args.insert(args.begin(), "hfree");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = hfree::cli::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string manifest(std::string_view name) { return std::string(HFREE_MANIFEST_DIR) + "/" + std::string(name); }

TEST(Cli, Eval) {
    const CliResult r = run({"eval", "(1+y^2)*exp(x)", "--at", "x=0,y=0"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "1\n");
    EXPECT_EQ(run({"eval", "1/x", "--at", "x=0"}).code, 1);
    EXPECT_EQ(run({"eval", "1/(x", "--at", "x=0"}).code, 2);
    EXPECT_EQ(run({"eval", "x+y", "--at", "x=1"}).code, 1);
    EXPECT_EQ(run({"eval", "x", "--at", "x=abc"}).code, 2);
    EXPECT_EQ(run({"eval", "2*pi"}).out, "6.283185307179586\n");
}

TEST(Cli, GalleryListAndRun) {
    const CliResult list = run({"gallery", "list"});
    EXPECT_EQ(list.code, 0);
    EXPECT_NE(list.out.find("planar-hamiltonian\n"), std::string::npos);
    EXPECT_NE(list.out.find("contact-2\n"), std::string::npos);

    const CliResult ok = run({"gallery", "run", "planar-hamiltonian", "--samples", "10000", "--seed", "7"});
    EXPECT_EQ(ok.code, 0) << ok.out << ok.err;
    EXPECT_EQ(run({"gallery", "run", "no-such-fixture"}).code, 2);
    EXPECT_EQ(run({"--quiet", "gallery", "run", "contact-1", "--samples", "50"}).out, "pass\n");
}

TEST(Cli, JsonIsDeterministic) {
    auto strip = [](const std::string& s) {
        auto j = nlohmann::ordered_json::parse(s);
        j.erase("wall_time_ms");
        return j.dump();
    };
    const CliResult a = run({"--json", "gallery", "run", "integrable-torus-2", "--samples", "500", "--seed", "9"});
    const CliResult b = run({"gallery", "run", "integrable-torus-2", "--samples", "500", "--seed", "9", "--json"});
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(strip(a.out), strip(b.out));
}

TEST(Cli, CheckExitCodes) {
    EXPECT_EQ(run({"check", manifest("planar-immersion.hfree")}).code, 0);
    EXPECT_EQ(run({"check", manifest("planar-constant.hfree")}).code, 1);
    EXPECT_EQ(run({"check", manifest("below-critical.hfree")}).code, 3);
    EXPECT_EQ(run({"--quiet", "check", manifest("below-critical.hfree")}).out, "below-critical-dimension\n");
    EXPECT_EQ(run({"check", manifest("missing.hfree")}).code, 2);
    EXPECT_EQ(run({"verify-identity", manifest("planar-identity.hfree")}).code, 0);
    EXPECT_EQ(run({"verify-identity", manifest("planar-immersion.hfree")}).code, 0);
}

TEST(Cli, ManifestErrorReportsPosition) {
    const CliResult r = run({"check", std::string(HFREE_TEST_DATA_DIR) + "/bad-expression.hfree"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find(":9:"), std::string::npos) << r.err;
}

TEST(Cli, UsageErrors) {
    const CliResult unknown = run({"frobnicate"});
    EXPECT_EQ(unknown.code, 2);
    EXPECT_NE(unknown.err.find("Usage"), std::string::npos) << unknown.err;
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"gallery"}).code, 2);
    EXPECT_EQ(run({"gallery", "run", "contact-1", "--samples", "0"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

}  // namespace
