#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace patchprov {

struct HttpRequest {
    std::string method = "GET";
    std::string url; // absolute https URL
    std::vector<std::pair<std::string, std::string>> headers;
};

struct HttpResponse {
    int status = 0;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;

    // first matching header value, name compared case-insensitively
    std::string header(const std::string& name) const;
};

std::string url_host(const std::string& url); // throws InvalidArgument on non-https URLs

// Every request funnels through perform(), which applies the host policy and
// the shared request budget before any bytes leave the process:
//   - hosts on the hard blocklist (the AI vendor's domains) are refused even
//     if the caller allowlists them; conversation exports are local files only
//   - the host must match the allowlist (exact or subdomain)
//   - a non-negative budget caps the total number of requests issued
class Transport {
public:
    virtual ~Transport() = default;

    HttpResponse perform(const HttpRequest& request);

    void set_allowed_hosts(std::vector<std::string> hosts);
    std::vector<std::string> allowed_hosts() const;
    void set_rate_budget(long max_requests); // negative = unlimited
    long requests_issued() const;

    static const std::vector<std::string>& default_allowed_hosts();
    static bool host_is_vendor(const std::string& host);

protected:
    virtual HttpResponse do_perform(const HttpRequest& request) = 0;

private:
    mutable std::mutex mutex_;
    std::vector<std::string> allowed_ = default_allowed_hosts();
    long budget_ = -1;
    long issued_ = 0;
};

// Serves canned exchanges from a fixture file; never touches the network.
// Responses for the same (method, url) form a queue so scripted sequences
// (rate-limit twice, then succeed) replay in order. The final response for a
// URL is sticky, so repeated identical requests keep working.
class ReplayTransport : public Transport {
public:
    ReplayTransport() = default;
    explicit ReplayTransport(const std::string& fixture_path);

    void add_exchange(const HttpRequest& request, HttpResponse response);
    void load_fixture(const std::string& fixture_path);

    const std::vector<HttpRequest>& request_log() const { return log_; }

protected:
    HttpResponse do_perform(const HttpRequest& request) override;

private:
    std::mutex replay_mutex_;
    std::map<std::string, std::vector<HttpResponse>> queues_;
    std::map<std::string, size_t> positions_;
    std::vector<HttpRequest> log_;
};

// Forwards to an inner transport and keeps every exchange for save(), which
// writes a fixture ReplayTransport can load.
class RecordingTransport : public Transport {
public:
    explicit RecordingTransport(std::unique_ptr<Transport> inner);

    void save(const std::string& fixture_path) const;

protected:
    HttpResponse do_perform(const HttpRequest& request) override;

private:
    std::unique_ptr<Transport> inner_;
    mutable std::mutex record_mutex_;
    std::vector<std::pair<HttpRequest, HttpResponse>> exchanges_;
};

// TLS-backed transport for real use; requires the library to be built with
// OpenSSL, otherwise every request throws NetworkFailure.
std::unique_ptr<Transport> make_live_transport();

} // namespace patchprov
