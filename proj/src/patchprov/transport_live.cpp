#include "transport.hpp"
#include "errors.hpp"

#ifdef PATCHPROV_HAVE_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#endif

namespace patchprov {

namespace {

class LiveTransport : public Transport {
protected:
    HttpResponse do_perform([[maybe_unused]] const HttpRequest& request) override
    {
#ifdef PATCHPROV_HAVE_TLS
        std::string host = url_host(request.url);
        size_t path_start = request.url.find('/', std::string("https://").size());
        std::string target = path_start == std::string::npos ? "/" : request.url.substr(path_start);

        httplib::SSLClient client(host);
        client.set_follow_location(false); // redirects re-enter perform() upstream
        client.set_connection_timeout(30);
        client.set_read_timeout(60);
        httplib::Headers headers;
        for (const auto& [key, value] : request.headers)
            headers.emplace(key, value);

        httplib::Result result = request.method == "GET"
            ? client.Get(target, headers)
            : httplib::Result { nullptr, httplib::Error::Unknown };
        if (request.method != "GET")
            throw Error(ErrorCode::InvalidArgument, "unsupported method: " + request.method);
        if (!result)
            throw Error(ErrorCode::NetworkFailure,
                "request failed: " + httplib::to_string(result.error()) + " (" + request.url + ")");
        HttpResponse response;
        response.status = result->status;
        for (const auto& [key, value] : result->headers)
            response.headers.emplace_back(key, value);
        response.body = result->body;
        return response;
#else
        throw Error(ErrorCode::NetworkFailure,
            "live transport unavailable: built without TLS support");
#endif
    }
};

} // namespace

std::unique_ptr<Transport> make_live_transport()
{
    return std::make_unique<LiveTransport>();
}

} // namespace patchprov
