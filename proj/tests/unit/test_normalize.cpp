#include "doctest.h"

#include "generators.hpp"

#include "patchprov/errors.hpp"
#include "patchprov/normalize.hpp"

#include <set>

using namespace patchprov;
using testsupport::Rng;

namespace {

std::vector<std::string> norm(const std::vector<std::string>& lines, const FileTypeProfile& p)
{
    return normalize_lines(lines, p).lines;
}

const FileTypeProfile& profile_named(const FileTypeRegistry& registry, const std::string& name)
{
    for (const auto& p : registry.profiles())
        if (p.name == name)
            return p;
    FAIL("no profile named ", name);
    return unsupported_profile();
}

} // namespace

TEST_SUITE("normalize")
{
    TEST_CASE("registry ships well over the minimum profile count")
    {
        FileTypeRegistry registry = FileTypeRegistry::builtin();
        std::set<std::string> names;
        for (const auto& p : registry.profiles()) {
            CHECK(p.supported);
            bool has_selector = !p.extensions.empty() || !p.basenames.empty();
            CHECK(has_selector);
            names.insert(p.name);
        }
        CHECK(names.size() == registry.profiles().size()); // unique names
        CHECK(registry.profiles().size() >= 38);
        CHECK(registry.version() == "builtin-1");

        // the languages the tool must handle out of the box
        for (const char* name : { "shell", "javascript", "html", "typescript", "python",
                 "css", "dockerfile", "makefile", "java", "c", "cpp" })
            CHECK(names.count(name) == 1);
    }

    TEST_CASE("file type detection")
    {
        FileTypeRegistry registry = FileTypeRegistry::builtin();
        CHECK(detect_file_type("src/main.py", registry).name == "python");
        CHECK(detect_file_type("a/b/c/widget.TSX", registry).name == "typescript");
        CHECK(detect_file_type("assets/logo.png", registry).supported == false);
        CHECK(detect_file_type("noextension", registry).supported == false);
        CHECK(detect_file_type("Makefile", registry).name == "makefile");
        CHECK(detect_file_type("deep/path/GNUmakefile", registry).name == "makefile");
        CHECK(detect_file_type("Dockerfile", registry).name == "dockerfile");
        CHECK(detect_file_type("CMakeLists.txt", registry).name == "cmake");
        // longest suffix wins regardless of registry order
        CHECK(detect_file_type("x.d.ts", registry).name == "typescript");
    }

    TEST_CASE("custom registries prepend and can replace")
    {
        FileTypeRegistry registry = FileTypeRegistry::builtin();
        FileTypeProfile custom;
        custom.name = "python-variant";
        custom.extensions = { ".py" };
        custom.line_comment = "#";
        registry.add_front(custom);
        CHECK(detect_file_type("x.py", registry).name == "python-variant");
    }

    TEST_CASE("pipeline order: comments, non-ascii, case, whitespace, blank drop")
    {
        FileTypeRegistry registry = FileTypeRegistry::builtin();
        const FileTypeProfile& c = profile_named(registry, "c");
        const FileTypeProfile& python = profile_named(registry, "python");

        CHECK(norm({ "  int X = 1; // set X" }, c) == std::vector<std::string> { "intx=1;" });
        CHECK(norm({ "caf\xC3\xA9()" }, python) == std::vector<std::string> { "caf()" });

        NormalizedLines blank = normalize_lines({ "   ", "" }, python);
        CHECK(blank.lines.empty());
        CHECK(blank.dropped_count == 2);

        NormalizedLines mixed = normalize_lines({ "A = 1", "# only a comment", "B\t=\t2" }, python);
        CHECK(mixed.lines == std::vector<std::string> { "a=1", "b=2" });
        CHECK(mixed.dropped_count == 1);
    }

    TEST_CASE("block comments span lines and stay stateful")
    {
        FileTypeRegistry registry = FileTypeRegistry::builtin();
        const FileTypeProfile& c = profile_named(registry, "c");

        CHECK(norm({ "a /* x", "y", "z */ b" }, c) == std::vector<std::string> { "a", "b" });
        CHECK(norm({ "keep; /* gone */ kept" }, c) == std::vector<std::string> { "keep;kept" });
        // an unclosed block comment swallows the rest of the unit
        CHECK(norm({ "a /* open", "never closed" }, c) == std::vector<std::string> { "a" });
    }

    TEST_CASE("line marker that prefixes the block marker loses to it")
    {
        FileTypeRegistry registry = FileTypeRegistry::builtin();
        const FileTypeProfile& lua = profile_named(registry, "lua");
        // "--[[" must open a block, not act as a "--" line comment
        CHECK(norm({ "x = 1 --[[ block", "still comment ]] y = 2" }, lua)
            == std::vector<std::string> { "x=1", "y=2" });
        CHECK(norm({ "x = 1 -- plain comment" }, lua) == std::vector<std::string> { "x=1" });
    }

    TEST_CASE("unsupported profile throws the dedicated error")
    {
        CHECK_THROWS_AS(normalize_lines({ "x" }, unsupported_profile()), Error);
        try {
            normalize_lines({ "x" }, unsupported_profile());
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::UnsupportedProfile);
        }
    }

    TEST_CASE("empty markers are rejected")
    {
        FileTypeProfile broken;
        broken.name = "broken";
        broken.extensions = { ".b" };
        broken.line_comment = "";
        try {
            normalize_lines({ "x" }, broken);
            FAIL("expected an invalid-argument error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InvalidArgument);
        }
    }

    TEST_CASE("output invariants on random input across every builtin profile")
    {
        FileTypeRegistry registry = FileTypeRegistry::builtin();
        Rng rng(4242);
        for (const auto& profile : registry.profiles()) {
            std::vector<std::string> lines;
            for (int i = 0; i < 30; ++i)
                lines.push_back(testsupport::random_source_line(rng));
            NormalizedLines result = normalize_lines(lines, profile);
            for (const auto& line : result.lines) {
                CHECK_FALSE(line.empty());
                for (char c : line) {
                    auto b = static_cast<unsigned char>(c);
                    CHECK(b < 0x80);
                    CHECK_FALSE(c == ' ');
                    CHECK_FALSE(c == '\t');
                    bool upper = c >= 'A' && c <= 'Z';
                    CHECK_FALSE(upper);
                }
            }
        }
    }

    TEST_CASE("idempotence and perturbation insensitivity per profile")
    {
        FileTypeRegistry registry = FileTypeRegistry::builtin();
        // profiles whose comment markers ('//', '/*', '#') cannot arise from
        // the generator's marker-free token alphabet
        const std::vector<std::string> tested = { "c", "cpp", "python", "shell", "javascript",
            "typescript", "java", "kotlin", "go", "rust", "scss", "dart" };
        REQUIRE(tested.size() >= 10);

        Rng rng(777);
        for (const auto& name : tested) {
            const FileTypeProfile& profile = profile_named(registry, name);
            for (int trial = 0; trial < 500; ++trial) {
                std::string line = testsupport::random_source_line(rng);
                auto base = norm({ line }, profile);

                // case perturbation
                CHECK(norm({ testsupport::flip_case(rng, line) }, profile) == base);
                // whitespace perturbation
                CHECK(norm({ testsupport::sprinkle_whitespace(rng, line) }, profile) == base);
                // appended line comment
                REQUIRE(profile.line_comment.has_value());
                CHECK(norm({ line + " " + *profile.line_comment + " trailing note" }, profile)
                    == base);

                // idempotence on the normalized text
                CHECK(norm(base, profile) == base);
            }
        }
    }
}
