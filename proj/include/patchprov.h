#ifndef PATCHPROV_H
#define PATCHPROV_H

/*
 * C interface to the patch-provenance classifier.
 *
 * A pp_session carries configuration (dataset location, gram size, transport
 * mode, ...) set through string key/value options. Operations return a
 * pp_status; on failure pp_session_last_error() holds a message describing
 * what went wrong. Strings returned through char** out-parameters are owned
 * by the caller and released with pp_string_free().
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pp_status {
    PP_OK = 0,
    PP_ERR_INVALID_ARGUMENT = 1,
    PP_ERR_MALFORMED_DOCUMENT = 2,
    PP_ERR_UNSUPPORTED_FORMAT = 3,
    PP_ERR_UNSUPPORTED_PROFILE = 4,
    PP_ERR_MISMATCHED_GRAM_SIZE = 5,
    PP_ERR_EMPTY_REFERENCE = 6,
    PP_ERR_NOT_FOUND = 7,
    PP_ERR_RATE_LIMITED = 8,
    PP_ERR_NETWORK_FAILURE = 9,
    PP_ERR_BLOCKED_DOMAIN = 10,
    PP_ERR_IO_FAILURE = 11,
    PP_ERR_LENGTH_MISMATCH = 12,
    PP_ERR_UNKNOWN_LABEL = 13,
    PP_ERR_MISSING_DATASET = 14,
    PP_ERR_INTERNAL = 15,
    /* the operation finished and wrote its outputs, but some pull requests
       hit processing failures; details are in the report/manifest */
    PP_ERR_PARTIAL = 16
} pp_status;

/* library version string, e.g. "0.1.0" */
const char* pp_version(void);

/* human-readable name for a status code */
const char* pp_status_name(pp_status status);

/* release a string returned through a char** out-parameter */
void pp_string_free(char* text);

typedef struct pp_session pp_session;

pp_session* pp_session_new(void);
void pp_session_free(pp_session* session);

/* message for the most recent failing call on this session ("" if none) */
const char* pp_session_last_error(const pp_session* session);

/*
 * Configuration. Keys:
 *   dataset_root        path to the dataset (one directory per pull request)
 *   ngram               gram size, integer >= 1 (default 1)
 *   match_threshold     shared grams required for a match, >= 1 (default 1)
 *   registry_file       JSON file-type profiles (default: builtin registry)
 *   parallelism         worker threads for classification, >= 1 (default 1)
 *   transport           "live", "replay", or "record" (default "live")
 *   fixture_file        replay source / recording destination
 *   auth_token          API token (also read from AUTH_TOKEN by the CLI)
 *   allowed_hosts       comma-separated host allowlist override
 *   rate_budget         max requests per run, -1 for unlimited
 *   retry_max_attempts  total tries per request, >= 1
 *   retry_backoff_ms    comma-separated backoff schedule in milliseconds
 *   prefer_full_diff    "true"/"false": fetch whole-PR raw diffs (default true)
 *   scan_commits        "true"/"false": also scan commit messages for links
 *   newer_share_domain  "true"/"false": accept the vendor's newer share domain
 */
pp_status pp_session_set_option(pp_session* session, const char* key, const char* value);

/*
 * Keyword-search for candidate pull requests, fetch each hit, persist it
 * under dataset_root, and write a manifest JSON to manifest_out.
 * Dates are YYYY-MM-DD and may be empty/NULL for an open range.
 * Returns PP_ERR_PARTIAL when some PRs could not be fetched.
 */
pp_status pp_mine(pp_session* session, const char* query, const char* from_date,
    const char* to_date, const char* manifest_out);

/* fetch one pull request and persist it under dataset_root */
pp_status pp_fetch_pr(pp_session* session, const char* owner, const char* repo, long number);

/* scan free text for conversation share links; *links_json gets a JSON array */
pp_status pp_extract_links_text(pp_session* session, const char* text, char** links_json);

/* re-scan every record in the dataset for share links */
pp_status pp_extract_links_dataset(pp_session* session, char** links_json);

/*
 * Classify the whole dataset. Writes the full report to report_json_out and
 * the per-PR summary to csv_out (either may be NULL to skip). Returns
 * PP_ERR_PARTIAL when any pull request recorded a processing failure.
 */
pp_status pp_classify_dataset(pp_session* session, const char* report_json_out,
    const char* csv_out);

/* render a short human-readable summary of a saved classification report */
pp_status pp_report_render(pp_session* session, const char* report_json_path, char** text_out);

/*
 * Score predicted labels against ground truth. Both files are CSV with at
 * least owner,repo,number,label columns; rows labeled CL are dropped and the
 * rest are aligned by (owner, repo, number). Writes the metrics JSON to
 * eval_json_out (optional) and returns it via eval_json (optional).
 */
pp_status pp_evaluate_files(pp_session* session, const char* predictions_csv,
    const char* truth_csv, const char* eval_json_out, char** eval_json);

/* ---- unified diff parsing ---- */

typedef struct pp_diff pp_diff;

/* parse unified diff text; never fails on odd input (bad sections are
   flagged malformed inside the model), only on allocation problems */
pp_status pp_diff_parse(const char* text, pp_diff** out);
void pp_diff_free(pp_diff* diff);

size_t pp_diff_file_count(const pp_diff* diff);
size_t pp_diff_hunk_count(const pp_diff* diff);
/* number of files whose diff section could not be fully parsed */
size_t pp_diff_malformed_count(const pp_diff* diff);

/* serialize back to unified diff text */
pp_status pp_diff_serialize(const pp_diff* diff, char** text_out);

#ifdef __cplusplus
}
#endif

#endif /* PATCHPROV_H */
