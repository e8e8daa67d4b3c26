#pragma once

#include "conversation.hpp"
#include "transport.hpp"

#include <optional>
#include <string>
#include <vector>

namespace patchprov {

enum class PrState { Merged, Closed, Open };

const char* pr_state_name(PrState state);
PrState pr_state_from_name(const std::string& name); // throws UnknownLabel

struct PullRequestRecord {
    std::string owner;
    std::string repo;
    long number = 0;
    PrState state = PrState::Open;
    std::optional<std::string> merged_at; // present exactly when state is Merged
    std::string title;
    std::string body;
    std::vector<std::string> comment_texts;
    std::vector<std::string> commit_texts; // only when commit scanning is on
    std::string diff_path; // relative to the PR's dataset directory
    bool truncated = false; // diff only obtainable per-file, with gaps
    std::vector<ShareLink> share_links;

    bool operator==(const PullRequestRecord&) const = default;
};

struct RetryPolicy {
    int max_attempts = 3; // total tries, >= 1
    std::vector<int> backoff_ms = { 0, 500, 2000 };
};

struct FetchPolicy {
    std::string auth_token; // sent only to the API host
    long rate_limit_budget = 5000;
    RetryPolicy retry;
    bool prefer_full_diff = true; // raw diff media type dodges per-file truncation
    bool scan_commits = false;
    std::vector<LinkPattern> link_patterns = { default_link_pattern() };
};

struct FetchedPr {
    PullRequestRecord record;
    std::string diff_text;
};

// Fetch metadata, discussion text, and the diff for one pull request.
// Retries rate-limit and server errors per policy; follows redirects through
// perform() so the host policy applies to every hop. Throws NotFound,
// RateLimited, or NetworkFailure.
FetchedPr fetch_pull_request(Transport& transport, const std::string& owner,
    const std::string& repo, long number, const FetchPolicy& policy);

struct PrId {
    std::string owner;
    std::string repo;
    long number = 0;

    bool operator==(const PrId&) const = default;
    auto operator<=>(const PrId&) const = default;
};

struct SearchResults {
    std::vector<PrId> ids;
    bool partial = false; // budget or rate limit stopped the drain early
};

// Keyword search for candidate pull requests, optionally bounded to a
// creation-date range (YYYY-MM-DD); pages are drained in order.
SearchResults search_candidate_prs(Transport& transport, const std::string& query,
    const std::string& from_date, const std::string& to_date, const FetchPolicy& policy);

// Re-scan a record's text for share links: title and body count as the PR
// description, comments as review comments, commit messages as commits.
// Deduplicated by conversation id, first occurrence wins.
std::vector<ShareLink> extract_links_from_record(const PullRequestRecord& record,
    const std::vector<LinkPattern>& patterns);

// Dataset layout helpers: one directory per PR under the dataset root.
std::string pr_directory_name(const std::string& owner, const std::string& repo, long number);
std::string record_to_json(const PullRequestRecord& record);
PullRequestRecord record_from_json(const std::string& text); // throws MalformedDocument

// Write record.json, pr.diff, and an empty conversations/ directory under
// dataset_root; byte-deterministic for identical inputs. Returns the PR
// directory path.
std::string persist_pr(const std::string& dataset_root, const FetchedPr& fetched);

// Load a persisted record from its PR directory.
PullRequestRecord load_record(const std::string& pr_dir);

} // namespace patchprov
