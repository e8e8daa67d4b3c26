#include "doctest.h"

#include "diff_gen.hpp"

#include "patchprov/diff_model.hpp"

using namespace patchprov;
using testsupport::Rng;

namespace {

const char* kTwoFileDiff = R"(diff --git a/src/app.py b/src/app.py
index 1111111..2222222 100644
--- a/src/app.py
+++ b/src/app.py
@@ -10,3 +10,4 @@ def handler():
 context one
-old line
+new line
+another new line
 context two
diff --git a/README.md b/README.md
index 3333333..4444444 100644
--- a/README.md
+++ b/README.md
@@ -1,2 +1,2 @@
-Old title
+New title
 body
)";

} // namespace

TEST_SUITE("diff_model")
{
    TEST_CASE("hunk header parsing")
    {
        HunkHeader h;
        CHECK(parse_hunk_header("@@ -10,3 +10,4 @@", h));
        CHECK(h == HunkHeader { 10, 3, 10, 4 });

        CHECK(parse_hunk_header("@@ -0,0 +1,31 @@", h));
        CHECK(h == HunkHeader { 0, 0, 1, 31 });

        SUBCASE("omitted length defaults to one")
        {
            CHECK(parse_hunk_header("@@ -3 +4 @@", h));
            CHECK(h == HunkHeader { 3, 1, 4, 1 });
            CHECK(parse_hunk_header("@@ -3,2 +4 @@", h));
            CHECK(h == HunkHeader { 3, 2, 4, 1 });
        }

        SUBCASE("section heading after the closing marker is fine")
        {
            CHECK(parse_hunk_header("@@ -5,2 +5,3 @@ int main()", h));
            CHECK(h == HunkHeader { 5, 2, 5, 3 });
        }

        SUBCASE("garbage is rejected")
        {
            CHECK_FALSE(parse_hunk_header("@@ -a,1 +1,1 @@", h));
            CHECK_FALSE(parse_hunk_header("@@ -1,1 +1,1", h));
            CHECK_FALSE(parse_hunk_header("@@ 1,1 +1,1 @@", h));
            CHECK_FALSE(parse_hunk_header("@@ -1,1 1,1 @@", h));
            CHECK_FALSE(parse_hunk_header("not a header", h));
            CHECK_FALSE(parse_hunk_header("@@ -1,1 +1,1 @X", h));
        }
    }

    TEST_CASE("two-file diff parses with markers stripped")
    {
        PullRequestDiff diff = parse_unified_diff(kTwoFileDiff);
        REQUIRE(diff.files.size() == 2);

        const FileDiff& app = diff.files[0];
        CHECK(app.old_path == "src/app.py");
        CHECK(app.new_path == "src/app.py");
        CHECK_FALSE(app.malformed);
        REQUIRE(app.hunks.size() == 1);
        const Hunk& hunk = app.hunks[0];
        CHECK(hunk.header == HunkHeader { 10, 3, 10, 4 });
        CHECK(hunk.added_lines == std::vector<std::string> { "new line", "another new line" });
        CHECK(hunk.removed_lines == std::vector<std::string> { "old line" });
        CHECK(hunk.context_lines == std::vector<std::string> { "context one", "context two" });

        CHECK(diff.files[1].display_path() == "README.md");
        CHECK(diff.files[1].hunks.size() == 1);
    }

    TEST_CASE("pure addition with a zero-length old side")
    {
        std::string text = "diff --git a/new.py b/new.py\n--- /dev/null\n+++ b/new.py\n"
                           "@@ -0,0 +1,31 @@\n";
        for (int i = 1; i <= 31; ++i)
            text += "+line " + std::to_string(i) + "\n";
        PullRequestDiff diff = parse_unified_diff(text);
        REQUIRE(diff.files.size() == 1);
        CHECK(diff.files[0].old_path == "/dev/null");
        CHECK(diff.files[0].display_path() == "new.py");
        REQUIRE(diff.files[0].hunks.size() == 1);
        CHECK(diff.files[0].hunks[0].header == HunkHeader { 0, 0, 1, 31 });
        CHECK(diff.files[0].hunks[0].added_lines.size() == 31);
        CHECK_FALSE(diff.files[0].malformed);

        // and the canonical form survives a reparse byte for byte
        std::string serialized = serialize_diff(diff);
        CHECK(parse_unified_diff(serialized) == diff);
        CHECK(serialize_diff(parse_unified_diff(serialized)) == serialized);
    }

    TEST_CASE("no-newline marker is metadata, not content")
    {
        std::string text = "--- a/x.txt\n+++ b/x.txt\n@@ -1,1 +1,1 @@\n-old\n+new\n"
                           "\\ No newline at end of file\n";
        PullRequestDiff diff = parse_unified_diff(text);
        REQUIRE(diff.files.size() == 1);
        REQUIRE(diff.files[0].hunks.size() == 1);
        CHECK(diff.files[0].hunks[0].added_lines == std::vector<std::string> { "new" });
        CHECK_FALSE(diff.files[0].malformed);
    }

    TEST_CASE("binary files are flagged, not parsed")
    {
        SUBCASE("binary-files-differ line")
        {
            std::string text = "diff --git a/logo.png b/logo.png\n"
                               "Binary files a/logo.png and b/logo.png differ\n";
            PullRequestDiff diff = parse_unified_diff(text);
            REQUIRE(diff.files.size() == 1);
            CHECK(diff.files[0].is_binary);
            CHECK(diff.files[0].display_path() == "logo.png");
            CHECK(diff.files[0].hunks.empty());
        }
        SUBCASE("git binary patch body is skipped entirely")
        {
            std::string text = "diff --git a/blob.bin b/blob.bin\n"
                               "GIT binary patch\n"
                               "literal 48\n"
                               "zcmZ?w@@ -1,1 +1,1 @@ not a real hunk\n"
                               "diff --git a/after.py b/after.py\n"
                               "--- a/after.py\n+++ b/after.py\n@@ -1,1 +1,1 @@\n-a\n+b\n";
            PullRequestDiff diff = parse_unified_diff(text);
            REQUIRE(diff.files.size() == 2);
            CHECK(diff.files[0].is_binary);
            CHECK(diff.files[0].hunks.empty());
            CHECK(diff.files[1].display_path() == "after.py");
            CHECK(diff.files[1].hunks.size() == 1);
        }
    }

    TEST_CASE("renames")
    {
        std::string text = "diff --git a/old_name.py b/new_name.py\n"
                           "similarity index 97%\n"
                           "rename from old_name.py\n"
                           "rename to new_name.py\n";
        PullRequestDiff diff = parse_unified_diff(text);
        REQUIRE(diff.files.size() == 1);
        CHECK(diff.files[0].is_rename);
        CHECK(diff.files[0].old_path == "old_name.py");
        CHECK(diff.files[0].new_path == "new_name.py");

        SUBCASE("rename with edits keeps its hunks")
        {
            text += "--- a/old_name.py\n+++ b/new_name.py\n@@ -1,1 +1,1 @@\n-x\n+y\n";
            PullRequestDiff with_edits = parse_unified_diff(text);
            REQUIRE(with_edits.files.size() == 1);
            CHECK(with_edits.files[0].is_rename);
            CHECK(with_edits.files[0].hunks.size() == 1);
        }
    }

    TEST_CASE("malformed hunk header flags the file and parsing resumes")
    {
        std::string text = "diff --git a/bad.py b/bad.py\n--- a/bad.py\n+++ b/bad.py\n"
                           "@@ -1,1 +1,1 @@\n-ok\n+ok2\n"
                           "@@ broken header @@\n"
                           "+stray\n"
                           "diff --git a/good.py b/good.py\n--- a/good.py\n+++ b/good.py\n"
                           "@@ -1,1 +1,1 @@\n-p\n+q\n";
        PullRequestDiff diff = parse_unified_diff(text);
        REQUIRE(diff.files.size() == 2);
        CHECK(diff.files[0].malformed);
        CHECK(diff.files[0].hunks.size() == 1); // the good hunk before the bad header survives
        CHECK(diff.files[0].error_note.find("malformed hunk header") != std::string::npos);
        CHECK_FALSE(diff.files[1].malformed);
        CHECK(diff.files[1].hunks.size() == 1);
    }

    TEST_CASE("hunk body cut off at end of input is flagged")
    {
        std::string text = "--- a/t.py\n+++ b/t.py\n@@ -1,5 +1,5 @@\n-one\n+two\n";
        PullRequestDiff diff = parse_unified_diff(text);
        REQUIRE(diff.files.size() == 1);
        CHECK(diff.files[0].malformed);
        CHECK(diff.files[0].error_note == "hunk body ended early");
    }

    TEST_CASE("inconsistent line accounting inside a hunk is flagged")
    {
        // header promises one removed line, body delivers an added one first
        std::string text = "--- a/t.py\n+++ b/t.py\n@@ -1,2 +1,1 @@\n context\n+wrong\n more\n";
        PullRequestDiff diff = parse_unified_diff(text);
        REQUIRE(diff.files.size() == 1);
        CHECK(diff.files[0].malformed);
    }

    TEST_CASE("prose around the diff is ignored")
    {
        std::string text = "From: someone\nSubject: patch\n\n"
                           "--- a/f.c\n+++ b/f.c\n@@ -1,1 +1,1 @@\n-a\n+b\n"
                           "-- \ntrailer\n";
        PullRequestDiff diff = parse_unified_diff(text);
        REQUIRE(diff.files.size() == 1);
        CHECK(diff.files[0].display_path() == "f.c");
    }

    TEST_CASE("crlf input parses like lf input")
    {
        std::string lf = "--- a/f.c\n+++ b/f.c\n@@ -1,1 +1,2 @@\n-a\n+b\n+c\n";
        std::string crlf;
        for (char c : lf)
            crlf += c == '\n' ? std::string("\r\n") : std::string(1, c);
        CHECK(parse_unified_diff(lf) == parse_unified_diff(crlf));
    }

    TEST_CASE("quoted paths with escapes")
    {
        std::string text = "--- \"a/dir with space/f.py\"\n+++ \"b/dir with space/f.py\"\n"
                           "@@ -1,1 +1,1 @@\n-a\n+b\n";
        PullRequestDiff diff = parse_unified_diff(text);
        REQUIRE(diff.files.size() == 1);
        CHECK(diff.files[0].old_path == "dir with space/f.py");
    }

    TEST_CASE("empty input yields an empty diff")
    {
        PullRequestDiff diff = parse_unified_diff("");
        CHECK(diff.files.empty());
        CHECK(serialize_diff(diff).empty());
    }

    TEST_CASE("round trip is a fixed point on random structural diffs")
    {
        Rng rng(20260814);
        for (int trial = 0; trial < 200; ++trial) {
            PullRequestDiff original = testsupport::random_structural_diff(rng);
            std::string first = serialize_diff(original);
            PullRequestDiff reparsed = parse_unified_diff(first);
            REQUIRE(reparsed == original);
            std::string second = serialize_diff(reparsed);
            REQUIRE(second == first);
        }
    }

    TEST_CASE("round trip on a parsed real-world-shaped fixture")
    {
        PullRequestDiff first = parse_unified_diff(kTwoFileDiff);
        std::string canonical = serialize_diff(first);
        PullRequestDiff second = parse_unified_diff(canonical);
        CHECK(first == second);
        CHECK(serialize_diff(second) == canonical);
    }
}
