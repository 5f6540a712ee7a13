// Live HTTP adapters (fetcher, search provider, model backend) on top of
// cpp-httplib. Kept in a separate header so offline code paths never pull in
// the HTTP stack. Define CPPHTTPLIB_OPENSSL_SUPPORT before including to speak
// https.
#pragma once

#include <cstdlib>
#include <string>
#include <vector>

#include "httplib.h"
#include "orgmap/harvest.hpp"
#include "orgmap/llm_backend.hpp"
#include "orgmap/url.hpp"

namespace orgmap {

namespace detail {

inline bool https_supported() {
#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
  return true;
#else
  return false;
#endif
}

}  // namespace detail

class HttpFetcher : public Fetcher {
 public:
  explicit HttpFetcher(std::string user_agent, int timeout_sec = 15)
      : user_agent_(std::move(user_agent)), timeout_sec_(timeout_sec) {}

  FetchResponse fetch(const std::string& url) override {
    FetchResponse out;
    auto parsed = parse_url(url);
    if (!parsed) {
      out.transport_error = true;
      out.error = "invalid url";
      return out;
    }
    if (parsed->scheme == "https" && !detail::https_supported()) {
      out.transport_error = true;
      out.error = "https support not compiled in";
      return out;
    }
    httplib::Client cli(parsed->origin());
    cli.set_connection_timeout(timeout_sec_, 0);
    cli.set_read_timeout(timeout_sec_, 0);
    cli.set_follow_location(true);
    httplib::Headers headers = {{"User-Agent", user_agent_}};
    auto res = cli.Get(parsed->path, headers);
    if (!res) {
      out.transport_error = true;
      out.error = httplib::to_string(res.error());
      return out;
    }
    out.http_status = res->status;
    out.content_type = res->get_header_value("Content-Type");
    out.body = res->body;
    return out;
  }

 private:
  std::string user_agent_;
  int timeout_sec_;
};

// Generic search-API adapter: the endpoint template carries {query} and
// {top_k} placeholders; the reply is JSON, results located by JSON pointer,
// each result's URL under url_field (or the result itself when it is a bare
// string). API key, when needed, comes from the named env var as a bearer
// token.
struct HttpSearchConfig {
  std::string endpoint_template;  // e.g. http://host/search?q={query}&n={top_k}
  std::string auth_env;
  std::string results_pointer = "/results";
  std::string url_field = "url";
};

class HttpSearchProvider : public SearchProvider {
 public:
  explicit HttpSearchProvider(HttpSearchConfig cfg) : cfg_(std::move(cfg)) {}

  std::vector<std::string> search(const std::string& query, int top_k) override {
    std::string url = cfg_.endpoint_template;
    replace_all(url, "{query}", url_encode(query));
    replace_all(url, "{top_k}", std::to_string(top_k));
    auto parsed = parse_url(url);
    if (!parsed) throw HarvestError("search endpoint is not a valid url: " + url);
    httplib::Client cli(parsed->origin());
    cli.set_follow_location(true);
    httplib::Headers headers;
    if (!cfg_.auth_env.empty()) {
      const char* key = std::getenv(cfg_.auth_env.c_str());
      if (!key) throw ConfigError("search api key env var not set: " + cfg_.auth_env);
      headers.insert({"Authorization", std::string("Bearer ") + key});
    }
    auto res = cli.Get(parsed->path, headers);
    if (!res || res->status != 200)
      throw HarvestError("search request failed (" +
                         (res ? std::to_string(res->status) : httplib::to_string(res.error())) +
                         ")");
    json body = json::parse(res->body, nullptr, false);
    if (body.is_discarded()) throw HarvestError("search reply is not JSON");
    json results = body.value(json::json_pointer(cfg_.results_pointer), json::array());
    std::vector<std::string> urls;
    for (auto& r : results) {
      if (r.is_string())
        urls.push_back(r.get<std::string>());
      else if (r.is_object() && r.contains(cfg_.url_field))
        urls.push_back(r.at(cfg_.url_field).get<std::string>());
      if (static_cast<int>(urls.size()) >= top_k) break;
    }
    return urls;
  }

 private:
  static void replace_all(std::string& s, const std::string& from, const std::string& to) {
    size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
      s.replace(pos, from.size(), to);
      pos += to.size();
    }
  }
  static std::string url_encode(const std::string& s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
      if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
          c == '-' || c == '_' || c == '.' || c == '~')
        out.push_back(c);
      else {
        out.push_back('%');
        out.push_back(hex[c >> 4]);
        out.push_back(hex[c & 15]);
      }
    }
    return out;
  }

  HttpSearchConfig cfg_;
};

// Chat-completions style backend. The request/response bodies are opaque
// except for the extracted text field.
class HttpBackend : public LlmBackend {
 public:
  explicit HttpBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {
    auto parsed = parse_url(cfg_.endpoint);
    if (!parsed) throw ConfigError("backend endpoint is not a valid url: " + cfg_.endpoint);
  }

  std::string submit(const std::string& prompt) override {
    auto parsed = parse_url(cfg_.endpoint);
    httplib::Client cli(parsed->origin());
    cli.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (!cfg_.auth_env.empty()) {
      const char* key = std::getenv(cfg_.auth_env.c_str());
      if (!key) throw ConfigError("backend api key env var not set: " + cfg_.auth_env);
      headers.insert({"Authorization", std::string("Bearer ") + key});
    }
    json body;
    body["model"] = cfg_.model;
    body["temperature"] = cfg_.temperature;
    body["messages"] = json::array({json{{"role", "user"}, {"content", prompt}}});
    auto res = cli.Post(parsed->path, headers, body.dump(), "application/json");
    if (!res || res->status != 200)
      throw VerdictParseError("backend request failed (" +
                              (res ? std::to_string(res->status) : httplib::to_string(res.error())) +
                              ")");
    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded()) throw VerdictParseError("backend reply is not JSON");
    json text = reply.value(json::json_pointer(cfg_.text_pointer), json());
    if (!text.is_string())
      throw VerdictParseError("backend reply lacks text at " + cfg_.text_pointer);
    return text.get<std::string>();
  }

  std::string identity() const override {
    return cfg_.model.empty() ? "http" : "http:" + cfg_.model;
  }

 private:
  HttpBackendConfig cfg_;
};

}  // namespace orgmap
