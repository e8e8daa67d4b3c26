#include "doctest.h"

#include "tempdir.hpp"

#include "patchprov/errors.hpp"
#include "patchprov/report.hpp"
#include "patchprov/transport.hpp"

#include <algorithm>
#include <functional>
#include <memory>

using namespace patchprov;
using testsupport::TempDir;

namespace {

HttpRequest get(const std::string& url, const std::string& accept = {})
{
    HttpRequest r;
    r.url = url;
    if (!accept.empty())
        r.headers.emplace_back("Accept", accept);
    return r;
}

HttpResponse ok(const std::string& body, int status = 200)
{
    HttpResponse r;
    r.status = status;
    r.body = body;
    return r;
}

ErrorCode code_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::Internal;
}

} // namespace

TEST_SUITE("transport")
{
    TEST_CASE("url host extraction")
    {
        CHECK(url_host("https://api.github.com/repos/a/b") == "api.github.com");
        CHECK(url_host("https://API.GitHub.com/x") == "api.github.com");
        CHECK(url_host("https://api.github.com:443/x") == "api.github.com");
        CHECK(url_host("https://api.github.com?x=1") == "api.github.com");
        CHECK(url_host("https://api.github.com") == "api.github.com");
        CHECK_THROWS_AS(url_host("http://api.github.com/x"), Error);
        CHECK_THROWS_AS(url_host("ftp://api.github.com/x"), Error);
        CHECK_THROWS_AS(url_host("https://user:pw@api.github.com/x"), Error);
        CHECK_THROWS_AS(url_host("https:///nohost"), Error);
    }

    TEST_CASE("the conversation vendor is refused even when allowlisted")
    {
        ReplayTransport transport;
        transport.add_exchange(get("https://chat.openai.com/share/x"), ok("never served"));
        transport.set_allowed_hosts({ "chat.openai.com", "openai.com", "chatgpt.com",
            "oaiusercontent.com", "api.github.com" });

        for (const char* url : { "https://chat.openai.com/share/x",
                 "https://openai.com/anything",
                 "https://chatgpt.com/share/y",
                 "https://files.oaiusercontent.com/blob" }) {
            CAPTURE(url);
            CHECK(code_of([&] { transport.perform(get(url)); }) == ErrorCode::BlockedDomain);
        }
        // nothing reached the replay layer and nothing consumed budget
        CHECK(transport.request_log().empty());
        CHECK(transport.requests_issued() == 0);

        CHECK(Transport::host_is_vendor("chat.openai.com"));
        CHECK(Transport::host_is_vendor("OPENAI.COM"));
        CHECK(Transport::host_is_vendor("chatgpt.com"));
        CHECK_FALSE(Transport::host_is_vendor("api.github.com"));
        CHECK_FALSE(Transport::host_is_vendor("notopenai.com")); // suffix without a dot boundary
    }

    TEST_CASE("allowlist admits exact hosts and subdomains only")
    {
        ReplayTransport transport;
        transport.add_exchange(get("https://api.github.com/ok"), ok("fine"));
        CHECK(transport.perform(get("https://api.github.com/ok")).body == "fine");

        CHECK(code_of([&] { transport.perform(get("https://example.com/x")); })
            == ErrorCode::BlockedDomain);
        CHECK(code_of([&] { transport.perform(get("https://evilgithub.com/x")); })
            == ErrorCode::BlockedDomain);

        SUBCASE("subdomain of an allowlisted host passes")
        {
            transport.add_exchange(get("https://gist.github.com/page"), ok("gist"));
            CHECK(transport.perform(get("https://gist.github.com/page")).body == "gist");
        }
        SUBCASE("narrowed allowlist bites")
        {
            transport.set_allowed_hosts({ "raw.githubusercontent.com" });
            CHECK(code_of([&] { transport.perform(get("https://api.github.com/ok")); })
                == ErrorCode::BlockedDomain);
        }
        SUBCASE("defaults cover the code-hosting endpoints")
        {
            const auto& hosts = Transport::default_allowed_hosts();
            for (const char* host : { "api.github.com", "github.com",
                     "patch-diff.githubusercontent.com", "raw.githubusercontent.com" })
                CHECK(std::find(hosts.begin(), hosts.end(), host) != hosts.end());
        }
    }

    TEST_CASE("request budget caps total requests")
    {
        ReplayTransport transport;
        transport.add_exchange(get("https://api.github.com/a"), ok("a"));
        transport.set_rate_budget(2);
        CHECK(transport.perform(get("https://api.github.com/a")).body == "a");
        CHECK(transport.perform(get("https://api.github.com/a")).body == "a");
        CHECK(code_of([&] { transport.perform(get("https://api.github.com/a")); })
            == ErrorCode::RateLimited);
        CHECK(transport.requests_issued() == 2);

        SUBCASE("negative budget means unlimited")
        {
            transport.set_rate_budget(-1);
            for (int i = 0; i < 10; ++i)
                CHECK(transport.perform(get("https://api.github.com/a")).status == 200);
        }
        SUBCASE("zero budget refuses immediately")
        {
            transport.set_rate_budget(0);
            CHECK(code_of([&] { transport.perform(get("https://api.github.com/a")); })
                == ErrorCode::RateLimited);
        }
    }

    TEST_CASE("replay queues are ordered and the last response sticks")
    {
        ReplayTransport transport;
        std::string url = "https://api.github.com/flaky";
        transport.add_exchange(get(url), ok("limit", 403));
        transport.add_exchange(get(url), ok("limit", 403));
        transport.add_exchange(get(url), ok("served", 200));

        CHECK(transport.perform(get(url)).status == 403);
        CHECK(transport.perform(get(url)).status == 403);
        CHECK(transport.perform(get(url)).status == 200);
        CHECK(transport.perform(get(url)).body == "served"); // sticky
        CHECK(transport.request_log().size() == 4);
    }

    TEST_CASE("replay keys distinguish the accept header")
    {
        ReplayTransport transport;
        std::string url = "https://api.github.com/repos/o/r/pulls/1";
        transport.add_exchange(get(url, "application/vnd.github+json"), ok("{\"number\":1}"));
        transport.add_exchange(get(url, "application/vnd.github.v3.diff"), ok("diff --git ..."));

        CHECK(transport.perform(get(url, "application/vnd.github+json")).body == "{\"number\":1}");
        CHECK(transport.perform(get(url, "application/vnd.github.v3.diff")).body == "diff --git ...");

        SUBCASE("unknown request fails loudly")
        {
            CHECK(code_of([&] { transport.perform(get(url, "text/plain")); })
                == ErrorCode::NetworkFailure);
        }
    }

    TEST_CASE("an empty replay transport proves a code path is offline")
    {
        ReplayTransport transport;
        CHECK(code_of([&] { transport.perform(get("https://api.github.com/x")); })
            == ErrorCode::NetworkFailure);
        CHECK(transport.request_log().size() == 1);
    }

    TEST_CASE("response header lookup is case-insensitive, first match wins")
    {
        HttpResponse r;
        r.headers = { { "Content-Type", "text/plain" }, { "LINK", "<u>; rel=\"next\"" },
            { "content-type", "shadowed" } };
        CHECK(r.header("content-type") == "text/plain");
        CHECK(r.header("Link") == "<u>; rel=\"next\"");
        CHECK(r.header("absent") == "");
    }

    TEST_CASE("record then replay round trips through the fixture file")
    {
        TempDir dir("fixture");
        std::string path = dir.file("recorded.json");
        {
            auto inner = std::make_unique<ReplayTransport>();
            inner->add_exchange(get("https://api.github.com/thing", "application/vnd.github+json"),
                ok("payload"));
            HttpResponse canned = ok("diff body");
            canned.headers.emplace_back("Content-Type", "application/vnd.github.v3.diff");
            inner->add_exchange(get("https://api.github.com/thing", "application/vnd.github.v3.diff"),
                std::move(canned));

            RecordingTransport recorder(std::move(inner));
            CHECK(recorder.perform(get("https://api.github.com/thing", "application/vnd.github+json")).body
                == "payload");
            CHECK(recorder.perform(get("https://api.github.com/thing", "application/vnd.github.v3.diff")).body
                == "diff body");
            recorder.save(path);
        }
        ReplayTransport replay(path);
        CHECK(replay.perform(get("https://api.github.com/thing", "application/vnd.github+json")).body
            == "payload");
        HttpResponse diff = replay.perform(get("https://api.github.com/thing", "application/vnd.github.v3.diff"));
        CHECK(diff.body == "diff body");
        CHECK(diff.header("Content-Type") == "application/vnd.github.v3.diff");
    }

    TEST_CASE("bad fixture files fail with a document error")
    {
        TempDir dir("fixture-bad");
        write_text_file(dir.file("broken.json"), "{ not json");
        CHECK_THROWS_AS(ReplayTransport(dir.file("broken.json")), Error);
        write_text_file(dir.file("empty.json"), "{}");
        CHECK_THROWS_AS(ReplayTransport(dir.file("empty.json")), Error);
        CHECK_THROWS_AS(ReplayTransport(dir.file("missing.json")), Error);
    }

    TEST_CASE("live transport exists and enforces policy before any network use")
    {
        auto live = make_live_transport();
        REQUIRE(live != nullptr);
        // policy rejections never need a socket, so this is safe offline
        CHECK(code_of([&] { live->perform(get("https://chat.openai.com/share/x")); })
            == ErrorCode::BlockedDomain);
        CHECK(code_of([&] { live->perform(get("https://example.com/x")); })
            == ErrorCode::BlockedDomain);
    }
}
