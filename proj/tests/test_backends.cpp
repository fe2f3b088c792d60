#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "fragsel/http_backend.hpp"
#include "fragsel/mock_backends.hpp"
#include "fragsel/wire.hpp"
#include "test_helpers.hpp"

using namespace fragsel;
using fragsel::test::make_query;

TEST_CASE("mock scorer answers from its table and logs calls") {
    Json fixture{{"v", 1},
                 {"scores", Json::array({Json{{"query_id", "q1"}, {"text", "C"}, {"score", 0.9}}})}};
    MockScorer scorer(fixture, "fixture:scorer");
    Query q = make_query("q1", "question");

    CHECK(scorer.score(q, "C") == 0.9);
    CHECK(scorer.score(q, "C") == 0.9);
    CHECK(scorer.calls().size() == 2);

    try {
        scorer.score(q, "unknown text");
        FAIL("expected FixtureMiss");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::FixtureMiss);
        CHECK(std::string(e.what()).find("unknown text") != std::string::npos);
    }
    CHECK(scorer.calls().size() == 3);
}

TEST_CASE("mock backends accept digest-keyed generic responses") {
    Query q = make_query("q9", "digest me");
    Json request = wire_score_request(q, "via digest");
    Json fixture{{"v", 1}, {"responses", Json{{request.dump(), Json{{"score", 0.77}}}}}};
    MockScorer scorer(fixture, "fixture:digest");
    CHECK(scorer.score(q, "via digest") == 0.77);
}

TEST_CASE("mock fixtures reject malformed content") {
    CHECK_THROWS_AS(MockScorer(Json::array(), "fixture:bad"), Error);
    Json missing_score{{"scores", Json::array({Json{{"query_id", "q"}, {"text", "t"}}})}};
    CHECK_THROWS_AS(MockScorer(missing_score, "fixture:bad"), Error);
}

TEST_CASE("mock retriever resolves ids against the corpus") {
    std::vector<Document> corpus{Document::make_text("d1", "alpha"),
                                 Document::make_text("d2", "beta"),
                                 Document::make_image("d3", "img.jpg")};
    Json fixture{{"v", 1},
                 {"retrievals",
                  Json::array({Json{{"query_id", "q"}, {"doc_ids", {"d3", "d1", "d2"}}}})}};
    MockRetriever retriever(fixture, corpus, "fixture:retriever");
    Query q = make_query("q", "question");

    auto docs = retriever.retrieve(q, 2);
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].id == "d3");
    CHECK(docs[1].id == "d1");

    CHECK(retriever.retrieve(q, 100).size() == 3);
    CHECK_THROWS_AS(retriever.retrieve(make_query("other", "x"), 3), Error);

    Json dangling{{"v", 1},
                  {"retrievals", Json::array({Json{{"query_id", "q"}, {"doc_ids", {"nope"}}}})}};
    CHECK_THROWS_AS(MockRetriever(dangling, corpus, "fixture:r2"), Error);
}

TEST_CASE("mock generator is keyed by query id") {
    Json fixture{{"v", 1},
                 {"answers", Json::array({Json{{"query_id", "q"}, {"answer", "A42"}}})}};
    MockGenerator generator(fixture, "fixture:generator");
    Query q = make_query("q", "question");
    CHECK(generator.generate(q, {}) == "A42");
    CHECK(generator.calls().size() == 1);
    CHECK_THROWS_AS(generator.generate(make_query("zz", "x"), {}), Error);
}

TEST_CASE("mock backends are pure given their fixture") {
    Json fixture{{"v", 1},
                 {"scores", Json::array({Json{{"query_id", "q"}, {"text", "t"}, {"score", 0.5}}})}};
    MockScorer a(fixture, "fixture:a");
    MockScorer b(fixture, "fixture:b");
    Query q = make_query("q", "question");
    for (int i = 0; i < 5; ++i) CHECK(a.score(q, "t") == b.score(q, "t"));
    CHECK(a.calls().size() == b.calls().size());
}

namespace {

// In-process stub server for the HTTP adapter tests.
struct StubServer {
    httplib::Server server;
    int port = 0;
    std::thread thread;
    std::atomic<int> hits{0};
    std::vector<std::string> bodies;
    std::mutex body_mutex;

    StubServer() = default;

    void start() {
        port = server.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~StubServer() {
        server.stop();
        if (thread.joinable()) thread.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }
};

HttpOptions fast_options(const std::string& url) {
    HttpOptions options;
    options.base_url = url;
    options.timeout_s = 5.0;
    options.retries = 3;
    options.backoff_base_s = 0.01;  // keep the retry tests quick
    return options;
}

}  // namespace

TEST_CASE("http adapter round-trips the logprobs schema") {
    StubServer stub;
    stub.server.Post("/logprobs", [&](const httplib::Request& req, httplib::Response& res) {
        ++stub.hits;
        {
            std::lock_guard<std::mutex> lock(stub.body_mutex);
            stub.bodies.push_back(req.body);
        }
        Json body = Json::parse(req.body);
        CHECK(body.at("v") == 1);
        CHECK(body.at("query").at("id") == "q1");
        CHECK(body.at("fragment").is_null());
        CHECK(body.at("answer_tokens") == Json::array({"a", "b"}));
        res.set_content(Json{{"logprobs", {-0.1, -0.3}}}.dump(), "application/json");
    });
    stub.start();

    HttpBackend backend(fast_options(stub.url()));
    Query q = make_query("q1", "question");
    TokenLogProbs out = backend.logprobs(q, std::nullopt, {"a", "b"});
    CHECK(out.logprobs == std::vector<double>{-0.1, -0.3});
    CHECK(stub.hits == 1);
    CHECK(backend.last_attempt_count() == 1);
}

TEST_CASE("http adapter round-trips score, detect and generate") {
    StubServer stub;
    stub.server.Post("/score", [&](const httplib::Request& req, httplib::Response& res) {
        Json body = Json::parse(req.body);
        CHECK(body.at("text") == "segment text");
        res.set_content(Json{{"score", 0.625}}.dump(), "application/json");
    });
    stub.server.Post("/detect", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content(Json{{"candidates",
                              Json::array({Json{{"box", {1.0, 2.0, 30.0, 40.0}},
                                                {"objectness", 0.9},
                                                {"semantic", 0.8}}})}}
                            .dump(),
                        "application/json");
    });
    stub.server.Post("/generate", [&](const httplib::Request& req, httplib::Response& res) {
        Json body = Json::parse(req.body);
        CHECK(body.at("context").size() == 1);
        CHECK(body.at("context")[0].at("kind") == "text_frag");
        res.set_content(Json{{"answer", "served answer"}}.dump(), "application/json");
    });
    stub.start();

    HttpBackend backend(fast_options(stub.url()));
    Query q = make_query("q1", "question");
    CHECK(backend.score(q, "segment text") == 0.625);

    auto candidates = backend.detect(q, "img.jpg");
    REQUIRE(candidates.size() == 1);
    CHECK(candidates[0].box.x_max == 30.0);
    CHECK(candidates[0].semantic_score == 0.8);

    TextFragment tf{"d", {0, 0}, "frag", 0.5};
    CHECK(backend.generate(q, {EvidenceItem::text_frag(tf)}) == "served answer");
}

TEST_CASE("http adapter retries a 500 and succeeds on the second attempt") {
    StubServer stub;
    stub.server.Post("/score", [&](const httplib::Request& req, httplib::Response& res) {
        int attempt = ++stub.hits;
        {
            std::lock_guard<std::mutex> lock(stub.body_mutex);
            stub.bodies.push_back(req.body);
        }
        if (attempt == 1) {
            res.status = 500;
            res.set_content("transient", "text/plain");
        } else {
            res.set_content(Json{{"score", 1.5}}.dump(), "application/json");
        }
    });
    stub.start();

    HttpBackend backend(fast_options(stub.url()));
    CHECK(backend.score(make_query("q", "x"), "text") == 1.5);
    CHECK(stub.hits == 2);
    CHECK(backend.last_attempt_count() == 2);
    // the request payload is identical across retries
    REQUIRE(stub.bodies.size() == 2);
    CHECK(stub.bodies[0] == stub.bodies[1]);
}

TEST_CASE("http adapter fails fast on 4xx with status and body excerpt") {
    StubServer stub;
    stub.server.Post("/score", [&](const httplib::Request&, httplib::Response& res) {
        ++stub.hits;
        res.status = 404;
        res.set_content("no such model", "text/plain");
    });
    stub.start();

    HttpBackend backend(fast_options(stub.url()));
    try {
        backend.score(make_query("q", "x"), "text");
        FAIL("expected BackendFailure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BackendFailure);
        CHECK(std::string(e.what()).find("404") != std::string::npos);
        CHECK(std::string(e.what()).find("no such model") != std::string::npos);
    }
    CHECK(stub.hits == 1);
}

TEST_CASE("http adapter reports malformed response JSON") {
    StubServer stub;
    stub.server.Post("/score", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("{not json", "application/json");
    });
    stub.start();

    HttpBackend backend(fast_options(stub.url()));
    CHECK_THROWS_WITH_AS(backend.score(make_query("q", "x"), "text"),
                         doctest::Contains("malformed response JSON"), Error);
}

TEST_CASE("http adapter gives up after exhausting retries") {
    StubServer stub;
    stub.server.Post("/score", [&](const httplib::Request&, httplib::Response& res) {
        ++stub.hits;
        res.status = 503;
    });
    stub.start();

    HttpBackend backend(fast_options(stub.url()));
    try {
        backend.score(make_query("q", "x"), "text");
        FAIL("expected BackendFailure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BackendFailure);
    }
    CHECK(stub.hits == 3);
    CHECK(backend.last_attempt_count() == 3);
}

TEST_CASE("http adapter rejects positive logprobs as a contract violation") {
    StubServer stub;
    stub.server.Post("/logprobs", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content(Json{{"logprobs", {0.25}}}.dump(), "application/json");
    });
    stub.start();

    HttpBackend backend(fast_options(stub.url()));
    try {
        backend.logprobs(make_query("q", "x"), std::nullopt, {"a"});
        FAIL("expected BackendFailure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BackendFailure);
    }
}
