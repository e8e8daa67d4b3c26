#include "transport.hpp"
#include "errors.hpp"
#include "report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>

namespace patchprov {

namespace {

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(),
        [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool host_matches(const std::string& host, const std::string& entry)
{
    if (host == entry)
        return true;
    return host.size() > entry.size() + 1 && host[host.size() - entry.size() - 1] == '.'
        && host.compare(host.size() - entry.size(), entry.size(), entry) == 0;
}

// The conversation corpus is local files by design; talking to the vendor's
// site would violate its terms, so these hosts are refused unconditionally.
const std::vector<std::string> kVendorHosts = {
    "openai.com",
    "chatgpt.com",
    "oaiusercontent.com",
};

} // namespace

std::string HttpResponse::header(const std::string& name) const
{
    std::string want = lower(name);
    for (const auto& [key, value] : headers) {
        if (lower(key) == want)
            return value;
    }
    return {};
}

std::string url_host(const std::string& url)
{
    const std::string scheme = "https://";
    if (url.compare(0, scheme.size(), scheme) != 0)
        throw Error(ErrorCode::InvalidArgument, "only https URLs are supported: " + url);
    size_t start = scheme.size();
    size_t end = url.find_first_of("/?#", start);
    std::string host = url.substr(start, end == std::string::npos ? std::string::npos : end - start);
    size_t at = host.rfind('@'); // never send credentials embedded in URLs
    if (at != std::string::npos)
        throw Error(ErrorCode::InvalidArgument, "userinfo in URL is not supported: " + url);
    size_t colon = host.rfind(':');
    if (colon != std::string::npos)
        host = host.substr(0, colon);
    if (host.empty())
        throw Error(ErrorCode::InvalidArgument, "URL has no host: " + url);
    return lower(host);
}

const std::vector<std::string>& Transport::default_allowed_hosts()
{
    static const std::vector<std::string> hosts = {
        "api.github.com",
        "github.com",
        "patch-diff.githubusercontent.com",
        "raw.githubusercontent.com",
        "codeload.github.com",
        "objects.githubusercontent.com",
    };
    return hosts;
}

bool Transport::host_is_vendor(const std::string& host)
{
    std::string h = lower(host);
    return std::any_of(kVendorHosts.begin(), kVendorHosts.end(),
        [&](const std::string& entry) { return host_matches(h, entry); });
}

HttpResponse Transport::perform(const HttpRequest& request)
{
    std::string host = url_host(request.url);
    if (host_is_vendor(host))
        throw Error(ErrorCode::BlockedDomain,
            "requests to the conversation vendor are never issued: " + host);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        bool allowed = std::any_of(allowed_.begin(), allowed_.end(),
            [&](const std::string& entry) { return host_matches(host, lower(entry)); });
        if (!allowed)
            throw Error(ErrorCode::BlockedDomain, "host not on the allowlist: " + host);
        if (budget_ >= 0 && issued_ >= budget_)
            throw Error(ErrorCode::RateLimited, "request budget exhausted");
        ++issued_;
    }
    return do_perform(request);
}

void Transport::set_allowed_hosts(std::vector<std::string> hosts)
{
    std::lock_guard<std::mutex> lock(mutex_);
    allowed_ = std::move(hosts);
}

std::vector<std::string> Transport::allowed_hosts() const
{
    std::lock_guard<std::mutex> lock(mutex_);
    return allowed_;
}

void Transport::set_rate_budget(long max_requests)
{
    std::lock_guard<std::mutex> lock(mutex_);
    budget_ = max_requests;
}

long Transport::requests_issued() const
{
    std::lock_guard<std::mutex> lock(mutex_);
    return issued_;
}

ReplayTransport::ReplayTransport(const std::string& fixture_path)
{
    load_fixture(fixture_path);
}

namespace {

// The API serves JSON or raw diff from one URL depending on Accept, so the
// replay key has to include it.
std::string replay_key(const HttpRequest& request)
{
    std::string accept;
    for (const auto& [key, value] : request.headers) {
        if (lower(key) == "accept") {
            accept = value;
            break;
        }
    }
    return request.method + " " + request.url + " " + accept;
}

} // namespace

void ReplayTransport::add_exchange(const HttpRequest& request, HttpResponse response)
{
    std::lock_guard<std::mutex> lock(replay_mutex_);
    queues_[replay_key(request)].push_back(std::move(response));
}

void ReplayTransport::load_fixture(const std::string& fixture_path)
{
    nlohmann::json doc = nlohmann::json::parse(read_text_file(fixture_path), nullptr, false);
    if (doc.is_discarded() || !doc.contains("exchanges"))
        throw Error(ErrorCode::MalformedDocument, "bad replay fixture: " + fixture_path);
    for (const auto& exchange : doc.at("exchanges")) {
        const auto& req = exchange.at("request");
        HttpRequest request;
        request.method = req.value("method", "GET");
        request.url = req.at("url").get<std::string>();
        if (req.contains("accept"))
            request.headers.emplace_back("Accept", req.at("accept").get<std::string>());
        const auto& res = exchange.at("response");
        HttpResponse response;
        response.status = res.at("status").get<int>();
        if (res.contains("headers"))
            for (const auto& [key, value] : res.at("headers").items())
                response.headers.emplace_back(key, value.get<std::string>());
        response.body = res.value("body", "");
        add_exchange(request, std::move(response));
    }
}

HttpResponse ReplayTransport::do_perform(const HttpRequest& request)
{
    std::lock_guard<std::mutex> lock(replay_mutex_);
    log_.push_back(request);
    std::string key = replay_key(request);
    auto it = queues_.find(key);
    if (it == queues_.end() || it->second.empty())
        throw Error(ErrorCode::NetworkFailure, "no replay fixture for: " + key);
    size_t& pos = positions_[key];
    HttpResponse response = it->second[std::min(pos, it->second.size() - 1)];
    if (pos + 1 < it->second.size())
        ++pos;
    return response;
}

RecordingTransport::RecordingTransport(std::unique_ptr<Transport> inner)
    : inner_(std::move(inner))
{
    if (!inner_)
        throw Error(ErrorCode::InvalidArgument, "recording transport needs an inner transport");
}

HttpResponse RecordingTransport::do_perform(const HttpRequest& request)
{
    HttpResponse response = inner_->perform(request);
    std::lock_guard<std::mutex> lock(record_mutex_);
    exchanges_.emplace_back(request, response);
    return response;
}

void RecordingTransport::save(const std::string& fixture_path) const
{
    nlohmann::json doc;
    doc["exchanges"] = nlohmann::json::array();
    std::lock_guard<std::mutex> lock(record_mutex_);
    for (const auto& [request, response] : exchanges_) {
        nlohmann::json exchange;
        exchange["request"] = { { "method", request.method }, { "url", request.url } };
        for (const auto& [key, value] : request.headers)
            if (lower(key) == "accept")
                exchange["request"]["accept"] = value;
        nlohmann::json headers = nlohmann::json::object();
        for (const auto& [key, value] : response.headers)
            headers[key] = value;
        exchange["response"]
            = { { "status", response.status }, { "headers", headers }, { "body", response.body } };
        doc["exchanges"].push_back(exchange);
    }
    write_text_file(fixture_path, doc.dump(2) + "\n");
}

} // namespace patchprov
