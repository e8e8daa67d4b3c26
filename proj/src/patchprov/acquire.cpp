#include "acquire.hpp"
#include "errors.hpp"
#include "report.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <thread>

namespace patchprov {

namespace {

using nlohmann::json;

const char* kApiHost = "api.github.com";

std::string api_url(const std::string& path)
{
    return std::string("https://") + kApiHost + path;
}

std::string url_encode(const std::string& value)
{
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : value) {
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')
            || c == '-' || c == '_' || c == '.' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 0xF];
        }
    }
    return out;
}

HttpRequest make_request(const std::string& url, const std::string& accept,
    const FetchPolicy& policy)
{
    HttpRequest request;
    request.url = url;
    request.headers.emplace_back("Accept", accept);
    request.headers.emplace_back("User-Agent", "patchprov");
    request.headers.emplace_back("X-GitHub-Api-Version", "2022-11-28");
    if (!policy.auth_token.empty() && url_host(url) == kApiHost)
        request.headers.emplace_back("Authorization", "Bearer " + policy.auth_token);
    return request;
}

bool is_retryable(int status)
{
    return status == 403 || status == 429 || status >= 500;
}

void backoff_sleep(const RetryPolicy& retry, int attempt)
{
    int ms = 0;
    if (!retry.backoff_ms.empty()) {
        size_t idx = std::min(static_cast<size_t>(attempt), retry.backoff_ms.size() - 1);
        ms = retry.backoff_ms[idx];
    }
    if (ms > 0)
        std::this_thread::sleep_for(std::chrono::milliseconds(ms));
}

// One logical GET: retry loop around transient statuses, then redirect
// following (each hop re-enters perform(), so the host policy and budget
// always apply).
HttpResponse get_with_policy(Transport& transport, std::string url, const std::string& accept,
    const FetchPolicy& policy)
{
    if (policy.retry.max_attempts < 1)
        throw Error(ErrorCode::InvalidArgument, "retry attempts must be >= 1");
    for (int redirect = 0; redirect < 5; ++redirect) {
        HttpResponse response;
        for (int attempt = 0; attempt < policy.retry.max_attempts; ++attempt) {
            if (attempt > 0)
                backoff_sleep(policy.retry, attempt);
            response = transport.perform(make_request(url, accept, policy));
            if (!is_retryable(response.status))
                break;
        }
        if (response.status == 301 || response.status == 302 || response.status == 303
            || response.status == 307 || response.status == 308) {
            std::string location = response.header("Location");
            if (location.empty())
                throw Error(ErrorCode::NetworkFailure, "redirect without Location: " + url);
            url = location;
            continue;
        }
        if (response.status == 404)
            throw Error(ErrorCode::NotFound, "not found: " + url);
        if (response.status == 403 || response.status == 429)
            throw Error(ErrorCode::RateLimited, "rate limited after retries: " + url);
        if (response.status < 200 || response.status >= 300)
            throw Error(ErrorCode::NetworkFailure,
                "unexpected status " + std::to_string(response.status) + ": " + url);
        return response;
    }
    throw Error(ErrorCode::NetworkFailure, "too many redirects: " + url);
}

json get_json(Transport& transport, const std::string& url, const FetchPolicy& policy)
{
    HttpResponse response = get_with_policy(transport, url, "application/vnd.github+json", policy);
    json doc = json::parse(response.body, nullptr, false);
    if (doc.is_discarded())
        throw Error(ErrorCode::MalformedDocument, "API returned invalid JSON: " + url);
    return doc;
}

// `Link: <https://...>; rel="next", <...>; rel="last"`
std::string next_page_url(const HttpResponse& response)
{
    std::string link = response.header("Link");
    size_t pos = 0;
    while (pos < link.size()) {
        size_t open = link.find('<', pos);
        size_t close = link.find('>', open);
        if (open == std::string::npos || close == std::string::npos)
            break;
        std::string url = link.substr(open + 1, close - open - 1);
        size_t segment_end = link.find(',', close);
        std::string params = link.substr(close + 1,
            (segment_end == std::string::npos ? link.size() : segment_end) - close - 1);
        if (params.find("rel=\"next\"") != std::string::npos)
            return url;
        if (segment_end == std::string::npos)
            break;
        pos = segment_end + 1;
    }
    return {};
}

std::vector<std::string> collect_paginated_bodies(Transport& transport, std::string url,
    const FetchPolicy& policy, const char* field)
{
    std::vector<std::string> texts;
    while (!url.empty()) {
        HttpResponse response
            = get_with_policy(transport, url, "application/vnd.github+json", policy);
        json page = json::parse(response.body, nullptr, false);
        if (page.is_discarded() || !page.is_array())
            throw Error(ErrorCode::MalformedDocument, "expected a JSON array: " + url);
        for (const auto& item : page) {
            if (item.contains(field) && !item.at(field).is_null())
                texts.push_back(item.at(field).get<std::string>());
        }
        url = next_page_url(response);
    }
    return texts;
}

std::string opt_string(const json& j, const char* key)
{
    if (!j.contains(key) || j.at(key).is_null())
        return {};
    return j.at(key).get<std::string>();
}

// Stitch a usable diff from the per-file listing when the raw diff media
// type is unavailable. Files whose patch the API omits (large or binary)
// leave a gap, reported via the truncated flag.
std::pair<std::string, bool> diff_from_file_listing(Transport& transport,
    const std::string& base, const FetchPolicy& policy)
{
    std::string diff;
    bool truncated = false;
    std::string url = base + "/files?per_page=100";
    while (!url.empty()) {
        HttpResponse response
            = get_with_policy(transport, url, "application/vnd.github+json", policy);
        json page = json::parse(response.body, nullptr, false);
        if (page.is_discarded() || !page.is_array())
            throw Error(ErrorCode::MalformedDocument, "expected a JSON file listing: " + url);
        for (const auto& file : page) {
            std::string name = opt_string(file, "filename");
            std::string previous = opt_string(file, "previous_filename");
            std::string status = opt_string(file, "status");
            std::string old_name = previous.empty() ? name : previous;
            diff += "diff --git a/" + old_name + " b/" + name + "\n";
            if (file.contains("patch") && !file.at("patch").is_null()) {
                std::string a = status == "added" ? "/dev/null" : "a/" + old_name;
                std::string b = status == "removed" ? "/dev/null" : "b/" + name;
                diff += "--- " + a + "\n+++ " + b + "\n";
                diff += file.at("patch").get<std::string>();
                if (diff.empty() || diff.back() != '\n')
                    diff += '\n';
            } else if (status == "renamed") {
                diff += "rename from " + old_name + "\nrename to " + name + "\n";
            } else {
                truncated = true;
                diff += "Binary files a/" + old_name + " and b/" + name + " differ\n";
            }
        }
        url = next_page_url(response);
    }
    return { diff, truncated };
}

} // namespace

const char* pr_state_name(PrState state)
{
    switch (state) {
    case PrState::Merged:
        return "merged";
    case PrState::Closed:
        return "closed";
    case PrState::Open:
        return "open";
    }
    return "unknown";
}

PrState pr_state_from_name(const std::string& name)
{
    if (name == "merged")
        return PrState::Merged;
    if (name == "closed")
        return PrState::Closed;
    if (name == "open")
        return PrState::Open;
    throw Error(ErrorCode::UnknownLabel, "unknown pull request state '" + name + "'");
}

FetchedPr fetch_pull_request(Transport& transport, const std::string& owner,
    const std::string& repo, long number, const FetchPolicy& policy)
{
    transport.set_rate_budget(policy.rate_limit_budget);
    std::string base = api_url("/repos/" + owner + "/" + repo + "/pulls/" + std::to_string(number));

    json meta = get_json(transport, base, policy);
    FetchedPr fetched;
    PullRequestRecord& record = fetched.record;
    record.owner = owner;
    record.repo = repo;
    record.number = number;
    record.title = opt_string(meta, "title");
    record.body = opt_string(meta, "body");
    std::string merged_at = opt_string(meta, "merged_at");
    if (!merged_at.empty()) {
        record.state = PrState::Merged;
        record.merged_at = merged_at;
    } else {
        record.state = opt_string(meta, "state") == "closed" ? PrState::Closed : PrState::Open;
    }

    if (policy.prefer_full_diff) {
        HttpResponse diff_response
            = get_with_policy(transport, base, "application/vnd.github.v3.diff", policy);
        fetched.diff_text = diff_response.body;
        record.truncated = false;
    } else {
        auto [diff, truncated] = diff_from_file_listing(transport, base, policy);
        fetched.diff_text = diff;
        record.truncated = truncated;
    }
    record.diff_path = "pr.diff";

    std::string issue_comments
        = api_url("/repos/" + owner + "/" + repo + "/issues/" + std::to_string(number)
            + "/comments?per_page=100");
    record.comment_texts = collect_paginated_bodies(transport, issue_comments, policy, "body");
    std::vector<std::string> review_comments
        = collect_paginated_bodies(transport, base + "/comments?per_page=100", policy, "body");
    record.comment_texts.insert(record.comment_texts.end(),
        review_comments.begin(), review_comments.end());

    if (policy.scan_commits) {
        std::string url = base + "/commits?per_page=100";
        while (!url.empty()) {
            HttpResponse response
                = get_with_policy(transport, url, "application/vnd.github+json", policy);
            json page = json::parse(response.body, nullptr, false);
            if (page.is_discarded() || !page.is_array())
                throw Error(ErrorCode::MalformedDocument, "expected a JSON commit list: " + url);
            for (const auto& item : page) {
                if (item.contains("commit") && item.at("commit").contains("message"))
                    record.commit_texts.push_back(item.at("commit").at("message").get<std::string>());
            }
            url = next_page_url(response);
        }
    }

    record.share_links = extract_links_from_record(record, policy.link_patterns);
    return fetched;
}

SearchResults search_candidate_prs(Transport& transport, const std::string& query,
    const std::string& from_date, const std::string& to_date, const FetchPolicy& policy)
{
    transport.set_rate_budget(policy.rate_limit_budget);
    std::string q = query + " is:pr";
    if (!from_date.empty() || !to_date.empty())
        q += " created:" + (from_date.empty() ? "*" : from_date) + ".."
            + (to_date.empty() ? "*" : to_date);
    std::string url = api_url("/search/issues?q=" + url_encode(q) + "&per_page=100");

    SearchResults results;
    try {
        while (!url.empty()) {
            HttpResponse response
                = get_with_policy(transport, url, "application/vnd.github+json", policy);
            json page = json::parse(response.body, nullptr, false);
            if (page.is_discarded() || !page.contains("items"))
                throw Error(ErrorCode::MalformedDocument, "bad search response: " + url);
            if (page.value("incomplete_results", false))
                results.partial = true;
            for (const auto& item : page.at("items")) {
                std::string repo_url = opt_string(item, "repository_url");
                size_t repos = repo_url.find("/repos/");
                if (repos == std::string::npos || !item.contains("number"))
                    continue;
                std::string tail = repo_url.substr(repos + 7); // owner/repo
                size_t slash = tail.find('/');
                if (slash == std::string::npos)
                    continue;
                results.ids.push_back(PrId { tail.substr(0, slash), tail.substr(slash + 1),
                    item.at("number").get<long>() });
            }
            url = next_page_url(response);
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::RateLimited)
            throw;
        results.partial = true; // keep what was drained before the budget ran out
    }
    return results;
}

std::vector<ShareLink> extract_links_from_record(const PullRequestRecord& record,
    const std::vector<LinkPattern>& patterns)
{
    std::vector<ShareLink> links;
    auto absorb = [&](const std::string& text, LinkSource source) {
        for (auto& link : extract_share_links(text, patterns, source)) {
            bool seen = std::any_of(links.begin(), links.end(), [&](const ShareLink& existing) {
                return existing.conversation_id == link.conversation_id;
            });
            if (!seen)
                links.push_back(std::move(link));
        }
    };
    absorb(record.title, LinkSource::PrDescription);
    absorb(record.body, LinkSource::PrDescription);
    for (const auto& comment : record.comment_texts)
        absorb(comment, LinkSource::ReviewComment);
    for (const auto& message : record.commit_texts)
        absorb(message, LinkSource::CommitMessage);
    return links;
}

std::string pr_directory_name(const std::string& owner, const std::string& repo, long number)
{
    return owner + "__" + repo + "__" + std::to_string(number);
}

std::string record_to_json(const PullRequestRecord& record)
{
    json j;
    j["owner"] = record.owner;
    j["repo"] = record.repo;
    j["number"] = record.number;
    j["state"] = pr_state_name(record.state);
    if (record.merged_at)
        j["merged_at"] = *record.merged_at;
    else
        j["merged_at"] = nullptr;
    j["title"] = record.title;
    j["body"] = record.body;
    j["comment_texts"] = record.comment_texts;
    j["commit_texts"] = record.commit_texts;
    j["diff_path"] = record.diff_path;
    j["truncated"] = record.truncated;
    j["share_links"] = json::array();
    for (const auto& link : record.share_links) {
        j["share_links"].push_back({ { "url", link.url },
            { "conversation_id", link.conversation_id },
            { "found_in", link_source_name(link.found_in) },
            { "offset", link.offset } });
    }
    return j.dump(2) + "\n";
}

PullRequestRecord record_from_json(const std::string& text)
{
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw Error(ErrorCode::MalformedDocument, "invalid record JSON");
    PullRequestRecord record;
    try {
        record.owner = j.at("owner").get<std::string>();
        record.repo = j.at("repo").get<std::string>();
        record.number = j.at("number").get<long>();
        record.state = pr_state_from_name(j.at("state").get<std::string>());
        if (j.contains("merged_at") && !j.at("merged_at").is_null())
            record.merged_at = j.at("merged_at").get<std::string>();
        record.title = j.value("title", "");
        record.body = j.value("body", "");
        if (j.contains("comment_texts"))
            record.comment_texts = j.at("comment_texts").get<std::vector<std::string>>();
        if (j.contains("commit_texts"))
            record.commit_texts = j.at("commit_texts").get<std::vector<std::string>>();
        record.diff_path = j.value("diff_path", "pr.diff");
        record.truncated = j.value("truncated", false);
        if (j.contains("share_links")) {
            for (const auto& item : j.at("share_links")) {
                ShareLink link;
                link.url = item.at("url").get<std::string>();
                link.conversation_id = item.at("conversation_id").get<std::string>();
                link.found_in = [&] {
                    std::string name = item.value("found_in", "pr_description");
                    if (name == "commit_message")
                        return LinkSource::CommitMessage;
                    if (name == "review_comment")
                        return LinkSource::ReviewComment;
                    return LinkSource::PrDescription;
                }();
                link.offset = item.value("offset", static_cast<size_t>(0));
                record.share_links.push_back(std::move(link));
            }
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedDocument, std::string("record JSON: ") + e.what());
    }
    if ((record.state == PrState::Merged) != record.merged_at.has_value())
        throw Error(ErrorCode::MalformedDocument,
            "record state and merged_at disagree for " + record.owner + "/" + record.repo);
    return record;
}

std::string persist_pr(const std::string& dataset_root, const FetchedPr& fetched)
{
    namespace fs = std::filesystem;
    const PullRequestRecord& record = fetched.record;
    fs::path dir = fs::path(dataset_root)
        / pr_directory_name(record.owner, record.repo, record.number);
    std::error_code ec;
    fs::create_directories(dir / "conversations", ec);
    if (ec)
        throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
    write_text_file((dir / "record.json").string(), record_to_json(record));
    write_text_file((dir / record.diff_path).string(), fetched.diff_text);
    return dir.string();
}

PullRequestRecord load_record(const std::string& pr_dir)
{
    namespace fs = std::filesystem;
    fs::path path = fs::path(pr_dir) / "record.json";
    if (!fs::exists(path))
        throw Error(ErrorCode::MissingDataset, "no record.json in " + pr_dir);
    return record_from_json(read_text_file(path.string()));
}

} // namespace patchprov
