#pragma once

#include "classify.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace patchprov {

// Reported statistics are stored already rounded (percent values to one
// decimal, kappa to three) so a report parsed back from disk compares equal
// to the one that produced it.

struct Quartiles {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;

    bool operator==(const Quartiles&) const = default;
};

struct CorpusSummary {
    int n = 1;
    long pr_pa = 0;
    long pr_pn = 0;
    long pr_ne = 0;
    long pr_cl = 0;
    // shares of the merged population (PA+PN+NE); zero when nothing merged
    double pct_pa = 0.0;
    double pct_pn = 0.0;
    double pct_ne = 0.0;
    long hunk_pa = 0;
    long hunk_pn = 0;
    long hunk_ne = 0;
    long hunk_cc = 0;
    long hunk_ee = 0;
    std::optional<Quartiles> integration; // over PA pull requests
    long snippet_total = 0;
    long patch_total = 0;

    bool operator==(const CorpusSummary&) const = default;
};

CorpusSummary summarize(const std::vector<PullRequestVerdict>& verdicts, int n,
    long snippet_total = 0);

// Linear interpolation between order statistics; empty input → nullopt.
std::optional<Quartiles> integration_quartiles(std::vector<double> values);

struct ClassMetrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    bool operator==(const ClassMetrics&) const = default;
};

// Order of the integration labels everywhere in the evaluation: PA, PN, NE.
inline constexpr std::array<PrLabel, 3> kEvalLabels { PrLabel::PA, PrLabel::PN, PrLabel::NE };

struct EvaluationReport {
    // confusion[truth][predicted], rows sum to ground-truth class counts
    std::array<std::array<long, 3>, 3> confusion {};
    std::array<ClassMetrics, 3> per_class {};
    ClassMetrics overall {};           // macro average of the per-class rows
    double observed_agreement = 0.0;   // micro accuracy, p_o x 100
    std::optional<double> cohens_kappa; // absent when chance agreement is 1
    long total = 0;

    bool operator==(const EvaluationReport&) const = default;
};

// Score predicted labels against ground truth. Both sequences must be
// non-empty, equal length, and restricted to PA/PN/NE. Throws LengthMismatch
// on length disagreement and InvalidArgument on empty input or a CL label.
EvaluationReport evaluate(const std::vector<PrLabel>& predicted,
    const std::vector<PrLabel>& truth);

// One CSV row per pull request.
struct PrReportRow {
    std::string owner;
    std::string repo;
    long number = 0;
    PullRequestVerdict verdict;

    bool operator==(const PrReportRow&) const = default;
};

std::string render_csv(const std::vector<PrReportRow>& rows, int n);

std::string summary_to_json(const CorpusSummary& summary);
CorpusSummary summary_from_json(const std::string& text);

std::string evaluation_to_json(const EvaluationReport& report);
EvaluationReport evaluation_from_json(const std::string& text);

// One labeled pull request from a label CSV (owner,repo,number,label plus
// any extra columns, header required).
struct LabeledPr {
    std::string owner;
    std::string repo;
    long number = 0;
    PrLabel label = PrLabel::NE;

    bool operator==(const LabeledPr&) const = default;
};

std::vector<LabeledPr> parse_label_csv(const std::string& text);

// Load two label CSVs, drop CL rows (the merge state is data, not a
// prediction, so both files must agree on it), align the rest by
// (owner, repo, number), and score them. An id present in only one file
// after filtering is an alignment error (UnknownLabel).
EvaluationReport evaluate_label_files(const std::string& predictions_path,
    const std::string& truth_path);

// Whole-file write; throws IoFailure.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path); // throws IoFailure

} // namespace patchprov
