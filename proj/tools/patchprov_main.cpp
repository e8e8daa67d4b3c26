// Command-line driver. Everything goes through the C API in patchprov.h;
// this file only parses flags, moves bytes, and maps statuses to exit codes
// (0 ok, 1 partial, 2 fatal).

#include <patchprov.h>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

namespace {

struct SessionDeleter {
    void operator()(pp_session* s) const { pp_session_free(s); }
};
using SessionPtr = std::unique_ptr<pp_session, SessionDeleter>;

struct StringDeleter {
    void operator()(char* s) const { pp_string_free(s); }
};
using CString = std::unique_ptr<char, StringDeleter>;

int exit_code_for(pp_status status)
{
    if (status == PP_OK)
        return 0;
    if (status == PP_ERR_PARTIAL)
        return 1;
    return 2;
}

int finish(const SessionPtr& session, pp_status status, const char* what)
{
    if (status == PP_ERR_PARTIAL) {
        std::cerr << what << ": completed with failures (see the written report)\n";
    } else if (status != PP_OK) {
        const char* message = pp_session_last_error(session.get());
        std::cerr << what << ": " << pp_status_name(status)
                  << (message && *message ? std::string(": ") + message : std::string()) << "\n";
    }
    return exit_code_for(status);
}

bool set_opt(const SessionPtr& session, const char* key, const std::string& value)
{
    pp_status status = pp_session_set_option(session.get(), key, value.c_str());
    if (status != PP_OK) {
        std::cerr << "bad option " << key << ": " << pp_session_last_error(session.get()) << "\n";
        return false;
    }
    return true;
}

bool write_or_print(const std::string& path, const char* text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return true;
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        std::cerr << "cannot write " << path << "\n";
        return false;
    }
    return true;
}

std::string read_input(const std::string& path, bool& ok)
{
    ok = true;
    if (path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "cannot read " << path << "\n";
        ok = false;
        return {};
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app { std::string("patch provenance classifier ") + pp_version() };
    app.require_subcommand(1);
    // shared flags may appear before or after the subcommand name
    app.fallthrough();
    app.set_config("--config", "", "read defaults from a config file");

    // shared configuration; precedence is flags > environment > config file
    std::string dataset_root;
    int ngram = 1;
    int threshold = 1;
    std::string registry_file;
    int parallelism = 1;
    std::string transport = "live";
    std::string fixture_file;
    std::string allowed_hosts;
    std::string auth_token;
    long rate_budget = 5000;
    int retry_attempts = 3;
    std::string retry_backoff = "0,500,2000";
    bool per_file_diff = false;
    bool scan_commits = false;
    bool newer_share_domain = false;

    app.add_option("--dataset", dataset_root, "dataset root directory");
    app.add_option("--ngram", ngram, "gram size (>= 1)")->check(CLI::PositiveNumber);
    app.add_option("--threshold", threshold, "grams required for a match (>= 1)")
        ->check(CLI::PositiveNumber);
    app.add_option("--registry", registry_file, "file-type profile JSON");
    app.add_option("--parallelism", parallelism, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--transport", transport, "live, replay, or record");
    app.add_option("--fixture", fixture_file, "replay source / recording destination");
    app.add_option("--allowed-hosts", allowed_hosts, "comma-separated host allowlist override");
    app.add_option("--token", auth_token, "API token")->envname("AUTH_TOKEN");
    app.add_option("--rate-budget", rate_budget, "max requests per run (-1 unlimited)");
    app.add_option("--retry-attempts", retry_attempts, "total tries per request")
        ->check(CLI::PositiveNumber);
    app.add_option("--retry-backoff", retry_backoff, "comma-separated backoff (ms)");
    app.add_flag("--per-file-diff", per_file_diff,
        "fetch diffs from the per-file listing instead of the raw diff");
    app.add_flag("--scan-commits", scan_commits, "also scan commit messages for links");
    app.add_flag("--newer-share-domain", newer_share_domain,
        "also accept the vendor's newer share domain");

    // mine
    auto* mine = app.add_subcommand("mine", "search for candidate PRs and fetch them");
    mine->fallthrough();
    std::string query, from_date, to_date, manifest_out = "manifest.json";
    mine->add_option("query", query, "search keyword(s)")->required();
    mine->add_option("--from", from_date, "creation date lower bound (YYYY-MM-DD)");
    mine->add_option("--to", to_date, "creation date upper bound (YYYY-MM-DD)");
    mine->add_option("--manifest", manifest_out, "manifest output path");

    // fetch
    auto* fetch = app.add_subcommand("fetch", "fetch one pull request into the dataset");
    fetch->fallthrough();
    std::string owner, repo;
    long number = 0;
    fetch->add_option("owner", owner)->required();
    fetch->add_option("repo", repo)->required();
    fetch->add_option("number", number)->required();

    // extract-links
    auto* extract
        = app.add_subcommand("extract-links", "scan text or the dataset for share links");
    extract->fallthrough();
    std::string input_path, extract_out;
    extract->add_option("--input", input_path, "text file to scan ('-' for stdin)");
    extract->add_option("-o,--output", extract_out, "write JSON here instead of stdout");

    // classify
    auto* classify = app.add_subcommand("classify", "classify every PR in the dataset");
    classify->fallthrough();
    std::string report_out = "report.json";
    std::string csv_out;
    classify->add_option("--json", report_out, "report JSON output path");
    classify->add_option("--csv", csv_out, "per-PR CSV output path");

    // report
    auto* report = app.add_subcommand("report", "summarize a saved classification report");
    report->fallthrough();
    std::string report_in;
    report->add_option("report_json", report_in, "saved classification report")->required();

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "score predictions against ground truth");
    evaluate->fallthrough();
    std::string predictions_path, truth_path, eval_out;
    evaluate->add_option("predictions", predictions_path, "predicted labels CSV")->required();
    evaluate->add_option("truth", truth_path, "ground-truth labels CSV")->required();
    evaluate->add_option("--json", eval_out, "metrics output path ('-' or empty for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2; // bad invocation is fatal, matching the documented exit codes
    }

    SessionPtr session(pp_session_new());
    if (!session) {
        std::cerr << "out of memory\n";
        return 2;
    }
    if (!set_opt(session, "dataset_root", dataset_root) || !set_opt(session, "ngram", std::to_string(ngram))
        || !set_opt(session, "match_threshold", std::to_string(threshold))
        || !set_opt(session, "registry_file", registry_file)
        || !set_opt(session, "parallelism", std::to_string(parallelism))
        || !set_opt(session, "transport", transport)
        || !set_opt(session, "fixture_file", fixture_file)
        || !set_opt(session, "auth_token", auth_token)
        || !set_opt(session, "rate_budget", std::to_string(rate_budget))
        || !set_opt(session, "retry_max_attempts", std::to_string(retry_attempts))
        || !set_opt(session, "retry_backoff_ms", retry_backoff)
        || !set_opt(session, "prefer_full_diff", per_file_diff ? "false" : "true")
        || !set_opt(session, "scan_commits", scan_commits ? "true" : "false")
        || !set_opt(session, "newer_share_domain", newer_share_domain ? "true" : "false"))
        return 2;
    if (!allowed_hosts.empty() && !set_opt(session, "allowed_hosts", allowed_hosts))
        return 2;

    if (mine->parsed()) {
        pp_status status = pp_mine(session.get(), query.c_str(),
            from_date.empty() ? nullptr : from_date.c_str(),
            to_date.empty() ? nullptr : to_date.c_str(), manifest_out.c_str());
        return finish(session, status, "mine");
    }
    if (fetch->parsed()) {
        pp_status status = pp_fetch_pr(session.get(), owner.c_str(), repo.c_str(), number);
        return finish(session, status, "fetch");
    }
    if (extract->parsed()) {
        CString links;
        pp_status status;
        if (!input_path.empty()) {
            bool ok = false;
            std::string text = read_input(input_path, ok);
            if (!ok)
                return 2;
            char* out = nullptr;
            status = pp_extract_links_text(session.get(), text.c_str(), &out);
            links.reset(out);
        } else {
            char* out = nullptr;
            status = pp_extract_links_dataset(session.get(), &out);
            links.reset(out);
        }
        if (status == PP_OK && !write_or_print(extract_out, links.get()))
            return 2;
        return finish(session, status, "extract-links");
    }
    if (classify->parsed()) {
        pp_status status = pp_classify_dataset(session.get(),
            report_out.empty() ? nullptr : report_out.c_str(),
            csv_out.empty() ? nullptr : csv_out.c_str());
        return finish(session, status, "classify");
    }
    if (report->parsed()) {
        char* out = nullptr;
        pp_status status = pp_report_render(session.get(), report_in.c_str(), &out);
        CString text(out);
        if (status == PP_OK)
            std::cout << text.get();
        return finish(session, status, "report");
    }
    if (evaluate->parsed()) {
        char* out = nullptr;
        pp_status status = pp_evaluate_files(session.get(), predictions_path.c_str(),
            truth_path.c_str(), (eval_out.empty() || eval_out == "-") ? nullptr : eval_out.c_str(),
            &out);
        CString text(out);
        if (status == PP_OK && (eval_out.empty() || eval_out == "-"))
            std::cout << text.get();
        return finish(session, status, "evaluate");
    }
    std::cerr << "no subcommand selected\n";
    return 2;
}
