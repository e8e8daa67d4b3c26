#include "patchprov.h"

#include "patchprov/acquire.hpp"
#include "patchprov/diff_model.hpp"
#include "patchprov/errors.hpp"
#include "patchprov/pipeline.hpp"
#include "patchprov/report.hpp"
#include "patchprov/transport.hpp"

#include <json.hpp>

#include <cstdlib>
#include <cstring>
#include <memory>
#include <sstream>

using namespace patchprov;
using nlohmann::json;

extern "C" {

struct pp_session {
    RunConfig config;
    FetchPolicy policy;
    std::string transport_mode = "live";
    std::string fixture_file;
    std::vector<std::string> allowed_hosts; // empty = defaults
    bool newer_share_domain = false;
    std::string last_error;
};

struct pp_diff {
    PullRequestDiff model;
};

} // extern "C"

namespace {

pp_status status_from(const Error& e)
{
    return static_cast<pp_status>(static_cast<int>(e.code()));
}

// Every API entry funnels through here so exceptions never cross the C
// boundary and the session always holds the failure message.
template <typename Fn>
pp_status guarded(pp_session* session, Fn&& fn)
{
    if (!session)
        return PP_ERR_INVALID_ARGUMENT;
    session->last_error.clear();
    try {
        return fn();
    } catch (const Error& e) {
        session->last_error = e.what();
        return status_from(e);
    } catch (const std::exception& e) {
        session->last_error = e.what();
        return PP_ERR_INTERNAL;
    } catch (...) {
        session->last_error = "unknown failure";
        return PP_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& text)
{
    char* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (!out)
        return nullptr;
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

bool parse_bool(const std::string& value)
{
    if (value == "true" || value == "1" || value == "yes" || value == "on")
        return true;
    if (value == "false" || value == "0" || value == "no" || value == "off")
        return false;
    throw Error(ErrorCode::InvalidArgument, "expected a boolean, got '" + value + "'");
}

long parse_long(const std::string& value, const char* key)
{
    try {
        size_t used = 0;
        long parsed = std::stol(value, &used);
        if (used != value.size())
            throw std::invalid_argument(value);
        return parsed;
    } catch (...) {
        throw Error(ErrorCode::InvalidArgument,
            std::string("option '") + key + "' expects an integer, got '" + value + "'");
    }
}

std::vector<std::string> split_commas(const std::string& value)
{
    std::vector<std::string> parts;
    std::string current;
    for (char c : value) {
        if (c == ',') {
            if (!current.empty())
                parts.push_back(current);
            current.clear();
        } else if (c != ' ') {
            current += c;
        }
    }
    if (!current.empty())
        parts.push_back(current);
    return parts;
}

std::vector<LinkPattern> session_patterns(const pp_session& session)
{
    std::vector<LinkPattern> patterns = { default_link_pattern() };
    if (session.newer_share_domain)
        patterns.push_back(newer_domain_link_pattern());
    return patterns;
}

std::unique_ptr<Transport> make_session_transport(const pp_session& session)
{
    std::unique_ptr<Transport> transport;
    if (session.transport_mode == "live") {
        transport = make_live_transport();
    } else if (session.transport_mode == "replay") {
        if (session.fixture_file.empty())
            throw Error(ErrorCode::InvalidArgument, "replay transport needs fixture_file");
        transport = std::make_unique<ReplayTransport>(session.fixture_file);
    } else if (session.transport_mode == "record") {
        transport = std::make_unique<RecordingTransport>(make_live_transport());
    } else {
        throw Error(ErrorCode::InvalidArgument,
            "unknown transport '" + session.transport_mode + "'");
    }
    if (!session.allowed_hosts.empty())
        transport->set_allowed_hosts(session.allowed_hosts);
    transport->set_rate_budget(session.policy.rate_limit_budget);
    return transport;
}

void maybe_save_recording(const pp_session& session, Transport& transport)
{
    if (session.transport_mode != "record")
        return;
    if (session.fixture_file.empty())
        throw Error(ErrorCode::InvalidArgument, "record transport needs fixture_file");
    static_cast<RecordingTransport&>(transport).save(session.fixture_file);
}

json links_to_json(const std::vector<ShareLink>& links)
{
    json out = json::array();
    for (const auto& link : links)
        out.push_back({ { "url", link.url }, { "conversation_id", link.conversation_id },
            { "found_in", link_source_name(link.found_in) }, { "offset", link.offset } });
    return out;
}

} // namespace

extern "C" {

const char* pp_version(void)
{
    return kToolVersion;
}

const char* pp_status_name(pp_status status)
{
    switch (status) {
    case PP_OK:
        return "ok";
    case PP_ERR_PARTIAL:
        return "partial";
    default:
        break;
    }
    int code = static_cast<int>(status);
    if (code >= 1 && code <= 15)
        return error_code_name(static_cast<ErrorCode>(code));
    return "unknown";
}

void pp_string_free(char* text)
{
    std::free(text);
}

pp_session* pp_session_new(void)
{
    try {
        return new pp_session();
    } catch (...) {
        return nullptr;
    }
}

void pp_session_free(pp_session* session)
{
    delete session;
}

const char* pp_session_last_error(const pp_session* session)
{
    return session ? session->last_error.c_str() : "";
}

pp_status pp_session_set_option(pp_session* session, const char* key, const char* value)
{
    return guarded(session, [&]() -> pp_status {
        if (!key || !value)
            throw Error(ErrorCode::InvalidArgument, "option key and value must be non-null");
        std::string k = key;
        std::string v = value;
        if (k == "dataset_root") {
            session->config.dataset_root = v;
        } else if (k == "ngram") {
            long n = parse_long(v, key);
            if (n < 1)
                throw Error(ErrorCode::InvalidArgument, "ngram must be >= 1");
            session->config.ngram = static_cast<int>(n);
        } else if (k == "match_threshold") {
            long t = parse_long(v, key);
            if (t < 1)
                throw Error(ErrorCode::InvalidArgument, "match_threshold must be >= 1");
            session->config.match_threshold = static_cast<uint32_t>(t);
        } else if (k == "registry_file") {
            session->config.filetype_registry = v;
        } else if (k == "parallelism") {
            long p = parse_long(v, key);
            if (p < 1)
                throw Error(ErrorCode::InvalidArgument, "parallelism must be >= 1");
            session->config.parallelism = static_cast<int>(p);
        } else if (k == "transport") {
            if (v != "live" && v != "replay" && v != "record")
                throw Error(ErrorCode::InvalidArgument,
                    "transport must be live, replay, or record");
            session->transport_mode = v;
        } else if (k == "fixture_file") {
            session->fixture_file = v;
        } else if (k == "auth_token") {
            session->policy.auth_token = v;
        } else if (k == "allowed_hosts") {
            session->allowed_hosts = split_commas(v);
        } else if (k == "rate_budget") {
            session->policy.rate_limit_budget = parse_long(v, key);
        } else if (k == "retry_max_attempts") {
            long attempts = parse_long(v, key);
            if (attempts < 1)
                throw Error(ErrorCode::InvalidArgument, "retry_max_attempts must be >= 1");
            session->policy.retry.max_attempts = static_cast<int>(attempts);
        } else if (k == "retry_backoff_ms") {
            std::vector<int> schedule;
            for (const auto& part : split_commas(v))
                schedule.push_back(static_cast<int>(parse_long(part, key)));
            session->policy.retry.backoff_ms = std::move(schedule);
        } else if (k == "prefer_full_diff") {
            session->policy.prefer_full_diff = parse_bool(v);
        } else if (k == "scan_commits") {
            session->policy.scan_commits = parse_bool(v);
        } else if (k == "newer_share_domain") {
            session->newer_share_domain = parse_bool(v);
        } else {
            throw Error(ErrorCode::InvalidArgument, "unknown option '" + k + "'");
        }
        return PP_OK;
    });
}

pp_status pp_mine(pp_session* session, const char* query, const char* from_date,
    const char* to_date, const char* manifest_out)
{
    return guarded(session, [&]() -> pp_status {
        if (!query || !manifest_out)
            throw Error(ErrorCode::InvalidArgument, "query and manifest_out are required");
        if (session->config.dataset_root.empty())
            throw Error(ErrorCode::InvalidArgument, "dataset_root is not set");
        session->policy.link_patterns = session_patterns(*session);
        auto transport = make_session_transport(*session);

        SearchResults search = search_candidate_prs(*transport, query,
            from_date ? from_date : "", to_date ? to_date : "", session->policy);

        json manifest;
        manifest["schema_version"] = 1;
        manifest["query"] = query;
        manifest["from"] = from_date ? from_date : "";
        manifest["to"] = to_date ? to_date : "";
        manifest["entries"] = json::array();
        manifest["failures"] = json::array();
        bool partial = search.partial;
        for (const auto& id : search.ids) {
            try {
                FetchedPr fetched
                    = fetch_pull_request(*transport, id.owner, id.repo, id.number, session->policy);
                std::string dir = persist_pr(session->config.dataset_root, fetched);
                manifest["entries"].push_back({ { "owner", id.owner }, { "repo", id.repo },
                    { "number", id.number },
                    { "dir", pr_directory_name(id.owner, id.repo, id.number) },
                    { "share_link_count", fetched.record.share_links.size() },
                    { "state", pr_state_name(fetched.record.state) } });
            } catch (const Error& e) {
                partial = true;
                manifest["failures"].push_back(
                    id.owner + "/" + id.repo + "#" + std::to_string(id.number) + ": " + e.what());
            }
        }
        manifest["partial"] = partial;
        write_text_file(manifest_out, manifest.dump(2) + "\n");
        maybe_save_recording(*session, *transport);
        return partial ? PP_ERR_PARTIAL : PP_OK;
    });
}

pp_status pp_fetch_pr(pp_session* session, const char* owner, const char* repo, long number)
{
    return guarded(session, [&]() -> pp_status {
        if (!owner || !repo)
            throw Error(ErrorCode::InvalidArgument, "owner and repo are required");
        if (session->config.dataset_root.empty())
            throw Error(ErrorCode::InvalidArgument, "dataset_root is not set");
        session->policy.link_patterns = session_patterns(*session);
        auto transport = make_session_transport(*session);
        FetchedPr fetched = fetch_pull_request(*transport, owner, repo, number, session->policy);
        persist_pr(session->config.dataset_root, fetched);
        maybe_save_recording(*session, *transport);
        return PP_OK;
    });
}

pp_status pp_extract_links_text(pp_session* session, const char* text, char** links_json)
{
    return guarded(session, [&]() -> pp_status {
        if (!text || !links_json)
            throw Error(ErrorCode::InvalidArgument, "text and links_json are required");
        auto links = extract_share_links(text, session_patterns(*session));
        *links_json = dup_string(links_to_json(links).dump(2) + "\n");
        return *links_json ? PP_OK : PP_ERR_INTERNAL;
    });
}

pp_status pp_extract_links_dataset(pp_session* session, char** links_json)
{
    return guarded(session, [&]() -> pp_status {
        if (!links_json)
            throw Error(ErrorCode::InvalidArgument, "links_json is required");
        auto patterns = session_patterns(*session);
        json out = json::array();
        for (const auto& dir : list_pr_directories(session->config.dataset_root)) {
            PullRequestRecord record = load_record(dir);
            json entry;
            entry["owner"] = record.owner;
            entry["repo"] = record.repo;
            entry["number"] = record.number;
            entry["links"] = links_to_json(extract_links_from_record(record, patterns));
            out.push_back(std::move(entry));
        }
        *links_json = dup_string(out.dump(2) + "\n");
        return *links_json ? PP_OK : PP_ERR_INTERNAL;
    });
}

pp_status pp_classify_dataset(pp_session* session, const char* report_json_out,
    const char* csv_out)
{
    return guarded(session, [&]() -> pp_status {
        ClassificationRun run = classify_dataset(session->config);
        if (report_json_out)
            write_text_file(report_json_out, run_to_json(run));
        if (csv_out)
            write_text_file(csv_out, run_to_csv(run));
        return run.partial() ? PP_ERR_PARTIAL : PP_OK;
    });
}

pp_status pp_report_render(pp_session* session, const char* report_json_path, char** text_out)
{
    return guarded(session, [&]() -> pp_status {
        if (!report_json_path || !text_out)
            throw Error(ErrorCode::InvalidArgument, "report_json_path and text_out are required");
        json j = json::parse(read_text_file(report_json_path), nullptr, false);
        if (j.is_discarded() || !j.contains("summary"))
            throw Error(ErrorCode::MalformedDocument,
                std::string("not a classification report: ") + report_json_path);
        const json& s = j.at("summary");
        std::ostringstream text;
        text << "pull requests: "
             << "PA " << s.at("pr_counts").at("pa").get<long>() << ", PN "
             << s.at("pr_counts").at("pn").get<long>() << ", NE "
             << s.at("pr_counts").at("ne").get<long>() << ", CL "
             << s.at("pr_counts").at("cl").get<long>() << "\n";
        text << "hunks: "
             << "PA " << s.at("hunk_counts").at("pa").get<long>() << ", PN "
             << s.at("hunk_counts").at("pn").get<long>() << ", NE "
             << s.at("hunk_counts").at("ne").get<long>() << ", CC "
             << s.at("hunk_counts").at("cc").get<long>() << ", EE "
             << s.at("hunk_counts").at("ee").get<long>() << "\n";
        if (s.contains("integration_quartiles")) {
            const json& q = s.at("integration_quartiles");
            text << "integration quartiles: q1 " << q.at("q1").get<double>() << ", median "
                 << q.at("median").get<double>() << ", q3 " << q.at("q3").get<double>() << "\n";
        }
        text << "snippets: " << s.at("snippet_total").get<long>() << ", patches: "
             << s.at("patch_total").get<long>() << ", gram size: " << j.at("ngram").get<int>()
             << "\n";
        size_t failures = j.contains("failures") ? j.at("failures").size() : 0;
        if (failures > 0)
            text << "failures: " << failures << " (see the report JSON)\n";
        *text_out = dup_string(text.str());
        return *text_out ? PP_OK : PP_ERR_INTERNAL;
    });
}

pp_status pp_evaluate_files(pp_session* session, const char* predictions_csv,
    const char* truth_csv, const char* eval_json_out, char** eval_json)
{
    return guarded(session, [&]() -> pp_status {
        if (!predictions_csv || !truth_csv)
            throw Error(ErrorCode::InvalidArgument, "both label files are required");
        EvaluationReport report = evaluate_label_files(predictions_csv, truth_csv);
        std::string rendered = evaluation_to_json(report);
        if (eval_json_out)
            write_text_file(eval_json_out, rendered);
        if (eval_json) {
            *eval_json = dup_string(rendered);
            if (!*eval_json)
                return PP_ERR_INTERNAL;
        }
        return PP_OK;
    });
}

pp_status pp_diff_parse(const char* text, pp_diff** out)
{
    if (!text || !out)
        return PP_ERR_INVALID_ARGUMENT;
    try {
        auto handle = std::make_unique<pp_diff>();
        handle->model = parse_unified_diff(text);
        *out = handle.release();
        return PP_OK;
    } catch (...) {
        return PP_ERR_INTERNAL;
    }
}

void pp_diff_free(pp_diff* diff)
{
    delete diff;
}

size_t pp_diff_file_count(const pp_diff* diff)
{
    return diff ? diff->model.files.size() : 0;
}

size_t pp_diff_hunk_count(const pp_diff* diff)
{
    if (!diff)
        return 0;
    size_t count = 0;
    for (const auto& file : diff->model.files)
        count += file.hunks.size();
    return count;
}

size_t pp_diff_malformed_count(const pp_diff* diff)
{
    if (!diff)
        return 0;
    size_t count = 0;
    for (const auto& file : diff->model.files)
        if (file.malformed)
            ++count;
    return count;
}

pp_status pp_diff_serialize(const pp_diff* diff, char** text_out)
{
    if (!diff || !text_out)
        return PP_ERR_INVALID_ARGUMENT;
    try {
        *text_out = dup_string(serialize_diff(diff->model));
        return *text_out ? PP_OK : PP_ERR_INTERNAL;
    } catch (...) {
        return PP_ERR_INTERNAL;
    }
}

} // extern "C"
