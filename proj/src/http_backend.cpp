#include "fragsel/http_backend.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "fragsel/wire.hpp"

namespace fragsel {

namespace {

// httplib wants host and base path split out of the URL.
struct ParsedUrl {
    std::string host_port;  // scheme://host:port
    std::string base_path;  // path prefix, no trailing slash
};

ParsedUrl parse_base_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(ErrorKind::ConfigError, "endpoint URL '" + url + "' lacks a scheme");
    }
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, ""};
    }
    std::string path = url.substr(path_start);
    while (!path.empty() && path.back() == '/') path.pop_back();
    return {url.substr(0, path_start), path};
}

}  // namespace

struct HttpBackend::Impl {
    explicit Impl(const HttpOptions& options) : url(parse_base_url(options.base_url)), client(url.host_port) {
        auto timeout = std::chrono::duration<double>(options.timeout_s);
        auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
        auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());
        if (!options.auth_token_env.empty()) {
            if (const char* token = std::getenv(options.auth_token_env.c_str())) {
                client.set_bearer_token_auth(token);
            }
        }
    }

    ParsedUrl url;
    httplib::Client client;
};

HttpBackend::HttpBackend(HttpOptions options)
    : options_(std::move(options)), impl_(std::make_unique<Impl>(options_)) {}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::descriptor() const { return "http:" + options_.base_url; }

Json HttpBackend::post(const std::string& path, const Json& body) {
    const std::string payload = body.dump();
    const std::string full_path = impl_->url.base_path + path;
    const int attempts = std::max(1, options_.retries);

    last_attempts_ = 0;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        ++last_attempts_;
        httplib::Result res = impl_->client.Post(full_path, payload, "application/json");
        const bool last = attempt + 1 == attempts;
        if (!res) {
            bool timed_out = res.error() == httplib::Error::ConnectionTimeout ||
                             res.error() == httplib::Error::Read ||
                             res.error() == httplib::Error::Write;
            if (last) {
                ErrorKind kind = timed_out ? ErrorKind::Timeout : ErrorKind::BackendFailure;
                throw Error(kind, descriptor() + path + ": " + httplib::to_string(res.error()) +
                                      " after " + std::to_string(last_attempts_) + " attempts");
            }
        } else if (res->status >= 200 && res->status < 300) {
            try {
                return Json::parse(res->body);
            } catch (const Json::parse_error& e) {
                throw Error(ErrorKind::BackendFailure,
                            descriptor() + path + ": malformed response JSON: " + e.what());
            }
        } else if (res->status < 500 || last) {
            std::string excerpt = res->body.substr(0, 200);
            throw Error(ErrorKind::BackendFailure,
                        descriptor() + path + ": HTTP " + std::to_string(res->status) +
                            (excerpt.empty() ? "" : ": " + excerpt));
        }
        double sleep_s = options_.backoff_base_s * std::pow(2.0, attempt);
        std::this_thread::sleep_for(std::chrono::duration<double>(sleep_s));
    }
    throw Error(ErrorKind::BackendFailure, descriptor() + path + ": unreachable");
}

std::vector<Document> HttpBackend::retrieve(const Query& query, long n_ret) {
    return parse_retrieve_response(post("/retrieve", wire_retrieve_request(query, n_ret)));
}

double HttpBackend::score(const Query& query, const std::string& text) {
    return parse_score_response(post("/score", wire_score_request(query, text)));
}

std::vector<DetectionCandidate> HttpBackend::detect(const Query& query,
                                                    const std::string& image_ref) {
    return parse_detect_response(post("/detect", wire_detect_request(query, image_ref)));
}

TokenLogProbs HttpBackend::logprobs(const Query& query,
                                    const std::optional<EvidenceItem>& fragment,
                                    const std::vector<std::string>& answer_tokens) {
    Json response = post("/logprobs", wire_logprobs_request(query, fragment, answer_tokens));
    TokenLogProbs out;
    out.answer_tokens = answer_tokens;
    out.logprobs = parse_logprobs_response(response);
    try {
        out.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::BackendFailure, descriptor() + "/logprobs: " + e.what());
    }
    return out;
}

double HttpBackend::logit(const Query& query, const EvidenceItem& fragment) {
    return parse_teacher_response(post("/teacher_logit", wire_teacher_request(query, fragment)));
}

std::string HttpBackend::generate(const Query& query, const std::vector<EvidenceItem>& context) {
    return parse_generate_response(post("/generate", wire_generate_request(query, context)));
}

}  // namespace fragsel
