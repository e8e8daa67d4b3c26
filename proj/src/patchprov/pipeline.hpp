#pragma once

#include "acquire.hpp"
#include "classify.hpp"
#include "normalize.hpp"
#include "report.hpp"

#include <optional>
#include <string>
#include <vector>

namespace patchprov {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunConfig {
    std::string dataset_root;
    int ngram = 1;
    uint32_t match_threshold = 1;
    std::string filetype_registry; // empty = builtin profiles
    std::vector<LinkPattern> link_patterns = { default_link_pattern() };
    int parallelism = 1;
};

// Everything classified for one pull request, with evidence.
struct PrClassification {
    std::string owner;
    std::string repo;
    long number = 0;
    PullRequestVerdict verdict;
    std::vector<HunkVerdict> hunks;
    long snippet_count = 0;
    bool truncated = false;

    bool operator==(const PrClassification&) const = default;
};

struct ClassificationRun {
    int n = 1;
    uint32_t match_threshold = 1;
    std::string registry_version;
    std::vector<PrClassification> prs; // sorted by (owner, repo, number)
    std::vector<std::string> failures; // EE notes plus unreadable records
    CorpusSummary summary;

    bool partial() const { return !failures.empty(); }
};

// Scan dataset_root (one directory per PR), classify every PR, and aggregate
// the corpus summary. Deterministic for a fixed dataset and config at any
// parallelism. Throws MissingDataset when the root does not exist and
// InvalidArgument for a bad config; per-PR problems never abort the run.
ClassificationRun classify_dataset(const RunConfig& config);

std::string run_to_json(const ClassificationRun& run);
std::string run_to_csv(const ClassificationRun& run);

// Helpers shared with the C API and tests.
std::vector<std::string> list_pr_directories(const std::string& dataset_root);
PrClassification classify_pr_directory(const std::string& pr_dir, const RunConfig& config,
    const FileTypeRegistry& registry);

} // namespace patchprov
