#include "doctest.h"

#include "patchprov/classify.hpp"
#include "patchprov/errors.hpp"

using namespace patchprov;

namespace {

FileTypeProfile python_profile()
{
    FileTypeProfile p;
    p.name = "python";
    p.extensions = { ".py" };
    p.line_comment = "#";
    return p;
}

SnippetGrams snippet_from(const std::string& id, int block, std::vector<std::string> grams, int n = 1)
{
    SnippetGrams sg;
    sg.ref = SnippetRef { id, block };
    sg.grams.n = n;
    for (auto& g : grams)
        sg.grams.grams.insert(std::move(g));
    return sg;
}

Hunk hunk_adding(std::vector<std::string> lines)
{
    Hunk h;
    h.header = HunkHeader { 1, 0, 1, static_cast<int>(lines.size()) };
    h.added_lines = std::move(lines);
    return h;
}

HunkVerdict verdict_with(HunkLabel label)
{
    HunkVerdict v;
    v.label = label;
    return v;
}

std::vector<HunkVerdict> verdicts(std::initializer_list<HunkLabel> labels)
{
    std::vector<HunkVerdict> out;
    for (HunkLabel l : labels)
        out.push_back(verdict_with(l));
    return out;
}

} // namespace

TEST_SUITE("classify")
{
    TEST_CASE("label names round trip")
    {
        for (HunkLabel l : { HunkLabel::PA, HunkLabel::PN, HunkLabel::NE, HunkLabel::CC, HunkLabel::EE })
            CHECK(hunk_label_from_name(hunk_label_name(l)) == l);
        for (PrLabel l : { PrLabel::PA, PrLabel::PN, PrLabel::NE, PrLabel::CL })
            CHECK(pr_label_from_name(pr_label_name(l)) == l);
        CHECK_THROWS_AS(hunk_label_from_name("XX"), Error);
        CHECK_THROWS_AS(pr_label_from_name("EE"), Error); // hunk-only label
    }

    TEST_CASE("hunk classification")
    {
        FileTypeProfile python = python_profile();

        SUBCASE("unsupported file type wins over everything")
        {
            auto snippets = std::vector<SnippetGrams> { snippet_from("c", 0, { "x" }) };
            HunkVerdict v = classify_hunk(snippets, hunk_adding({ "x = 1" }),
                unsupported_profile(), "logo.png", 1);
            CHECK(v.label == HunkLabel::CC);
            CHECK_FALSE(v.best_match.has_value());
        }
        SUBCASE("no snippets means no example")
        {
            HunkVerdict v = classify_hunk({}, hunk_adding({ "x = 1" }), python, "a.py", 1);
            CHECK(v.label == HunkLabel::NE);
            CHECK_FALSE(v.best_match.has_value());
        }
        SUBCASE("shared gram means applied, with evidence")
        {
            auto snippets = std::vector<SnippetGrams> {
                snippet_from("conv", 2, { "x", "=", "1" }),
            };
            HunkVerdict v = classify_hunk(snippets, hunk_adding({ "x = 1" }), python, "a.py", 1);
            CHECK(v.label == HunkLabel::PA);
            REQUIRE(v.best_match.has_value());
            CHECK(v.best_match->matched);
            CHECK(v.best_match->matched_gram_count == 3);
            REQUIRE(v.matched_snippet.has_value());
            CHECK(v.matched_snippet->conversation_id == "conv");
            CHECK(v.matched_snippet->block_index == 2);
            CHECK(v.file == "a.py");
            CHECK(v.header == HunkHeader { 1, 0, 1, 1 });
        }
        SUBCASE("disjoint grams mean suggested but not applied")
        {
            auto snippets = std::vector<SnippetGrams> { snippet_from("conv", 0, { "zzz" }) };
            HunkVerdict v = classify_hunk(snippets, hunk_adding({ "x = 1" }), python, "a.py", 1);
            CHECK(v.label == HunkLabel::PN);
            REQUIRE(v.best_match.has_value()); // evidence of the closest candidate
            CHECK_FALSE(v.best_match->matched);
            CHECK_FALSE(v.matched_snippet.has_value());
        }
        SUBCASE("the comment-only hunk matches nothing")
        {
            auto snippets = std::vector<SnippetGrams> { snippet_from("conv", 0, { "x" }) };
            HunkVerdict v = classify_hunk(snippets, hunk_adding({ "# x only a comment" }),
                python, "a.py", 1);
            CHECK(v.label == HunkLabel::PN);
        }
        SUBCASE("best match is the snippet with the most shared grams")
        {
            auto snippets = std::vector<SnippetGrams> {
                snippet_from("conv", 0, { "x", "qq" }),
                snippet_from("conv", 1, { "x", "=", "1" }),
            };
            HunkVerdict v = classify_hunk(snippets, hunk_adding({ "x = 1" }), python, "a.py", 1);
            CHECK(v.label == HunkLabel::PA);
            REQUIRE(v.matched_snippet.has_value());
            CHECK(v.matched_snippet->block_index == 1);
            CHECK(v.best_match->matched_gram_count == 3);
        }
        SUBCASE("ties break to the lowest block index regardless of order")
        {
            auto tied_a = snippet_from("conv", 3, { "x" });
            auto tied_b = snippet_from("conv", 1, { "x" });
            for (auto order : { std::vector<SnippetGrams> { tied_a, tied_b },
                     std::vector<SnippetGrams> { tied_b, tied_a } }) {
                HunkVerdict v = classify_hunk(order, hunk_adding({ "x" }), python, "a.py", 1);
                REQUIRE(v.matched_snippet.has_value());
                CHECK(v.matched_snippet->block_index == 1);
            }
        }
        SUBCASE("threshold gates the applied label")
        {
            auto snippets = std::vector<SnippetGrams> {
                snippet_from("conv", 0, { "x", "rare1", "rare2", "rare3" }),
            };
            HunkVerdict strict = classify_hunk(snippets, hunk_adding({ "x = 1" }),
                python, "a.py", 1, 2);
            CHECK(strict.label == HunkLabel::PN);
            CHECK(strict.best_match->matched_gram_count == 1);
        }
        SUBCASE("processing failures become EE verdicts with the note captured")
        {
            FileTypeProfile broken = python_profile();
            broken.line_comment = ""; // empty marker trips validation inside normalize
            auto snippets = std::vector<SnippetGrams> { snippet_from("conv", 0, { "x" }) };
            HunkVerdict v = classify_hunk(snippets, hunk_adding({ "x" }), broken, "a.py", 1);
            CHECK(v.label == HunkLabel::EE);
            CHECK(v.failure_note.has_value());
            CHECK_FALSE(v.best_match.has_value());
            CHECK_FALSE(v.matched_snippet.has_value());
        }
        SUBCASE("zero threshold surfaces as EE, not a crash")
        {
            auto snippets = std::vector<SnippetGrams> { snippet_from("conv", 0, { "x" }) };
            HunkVerdict v = classify_hunk(snippets, hunk_adding({ "x" }), python, "a.py", 1, 0);
            CHECK(v.label == HunkLabel::EE);
        }
    }

    TEST_CASE("pull request aggregation truth table")
    {
        struct Row {
            bool merged;
            std::vector<HunkVerdict> hunks;
            bool snippets_exist;
            PrLabel expected;
        };
        using L = HunkLabel;
        const std::vector<Row> table = {
            // merged, hunk labels, snippets?, expected
            { true, verdicts({}), false, PrLabel::NE },                       // empty diff, no code offered
            { true, verdicts({}), true, PrLabel::PN },                        // empty diff, code offered
            { true, verdicts({ L::PA }), true, PrLabel::PA },
            { true, verdicts({ L::PN }), true, PrLabel::PN },
            { true, verdicts({ L::NE }), false, PrLabel::NE },
            { true, verdicts({ L::PA, L::PN }), true, PrLabel::PA },          // one applied hunk suffices
            { true, verdicts({ L::PN, L::PN, L::NE }), true, PrLabel::PN },
            { true, verdicts({ L::NE, L::CC }), false, PrLabel::NE },         // bookkeeping labels do not steer
            { true, verdicts({ L::CC, L::EE }), true, PrLabel::NE },
            { true, verdicts({ L::PA, L::PA }), true, PrLabel::PA },
            { false, verdicts({}), false, PrLabel::CL },                      // closed overrides everything
            { false, verdicts({ L::PA }), true, PrLabel::CL },
            { false, verdicts({ L::PA, L::PA }), true, PrLabel::CL },
            { false, verdicts({ L::PN }), true, PrLabel::CL },
            { false, verdicts({ L::NE }), false, PrLabel::CL },
            { false, verdicts({ L::CC, L::EE }), true, PrLabel::CL },
        };
        REQUIRE(table.size() == 16);
        for (size_t i = 0; i < table.size(); ++i) {
            CAPTURE(i);
            const Row& row = table[i];
            PullRequestVerdict v = classify_pull_request(row.hunks, row.merged, row.snippets_exist);
            CHECK(v.label == row.expected);
            CHECK(v.merged == row.merged);
        }
    }

    TEST_CASE("aggregation keeps per-label tallies")
    {
        using L = HunkLabel;
        PullRequestVerdict v = classify_pull_request(
            verdicts({ L::PA, L::PN, L::PN, L::NE, L::CC, L::EE, L::EE }), true, true);
        CHECK(v.label == PrLabel::PA);
        CHECK(v.pa_count == 1);
        CHECK(v.pn_count == 2);
        CHECK(v.ne_count == 1);
        CHECK(v.cc_count == 1);
        CHECK(v.ee_count == 2);
        CHECK_FALSE(v.integration_pct.has_value()); // the caller fills this in
    }

    TEST_CASE("pull-request integration ratio")
    {
        auto set_of = [](std::vector<std::string> grams) {
            NGramSet s;
            s.n = 1;
            for (auto& g : grams)
                s.grams.insert(std::move(g));
            return s;
        };

        SUBCASE("union of snippets against union of added grams")
        {
            std::vector<NGramSet> snippets = {
                set_of({ "a", "b" }),
                set_of({ "b", "c", "d" }), // union: a b c d
            };
            NGramSet pr = set_of({ "a", "d", "zz" });
            Percentage p = aggregate_integration(snippets, pr);
            CHECK(p.hits == 2);
            CHECK(p.total == 4);
            CHECK(p.str() == "50.0");
        }
        SUBCASE("spec example scale: 31 grams, 7 present")
        {
            std::vector<std::string> snippet_grams, pr_grams;
            for (int i = 0; i < 31; ++i)
                snippet_grams.push_back("g" + std::to_string(i));
            for (int i = 0; i < 7; ++i)
                pr_grams.push_back("g" + std::to_string(i));
            Percentage p = aggregate_integration({ set_of(snippet_grams) }, set_of(pr_grams));
            CHECK(p.str() == "22.6");
        }
        SUBCASE("token-free snippets cannot carry a ratio")
        {
            CHECK_THROWS_AS(aggregate_integration({ set_of({}) }, set_of({ "x" })), Error);
            CHECK_THROWS_AS(aggregate_integration({}, set_of({ "x" })), Error);
        }
        SUBCASE("gram-size disagreement throws")
        {
            NGramSet two;
            two.n = 2;
            two.grams.insert("a b");
            CHECK_THROWS_AS(aggregate_integration({ two }, set_of({ "a" })), Error);
        }
    }
}
