#include "storyweaver/fetch.h"

#include <cstdlib>
#include <map>
#include <mutex>
#include <thread>

#ifdef STORYWEAVER_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"
#include "json.hpp"

namespace storyweaver {
namespace {

struct EndpointGate {
  std::mutex mu;
  std::chrono::steady_clock::time_point last{};
};

EndpointGate& gate_for(const std::string& endpoint) {
  static std::mutex registry_mu;
  static std::map<std::string, std::unique_ptr<EndpointGate>> registry;
  std::lock_guard lock(registry_mu);
  auto& slot = registry[endpoint];
  if (!slot) slot = std::make_unique<EndpointGate>();
  return *slot;
}

bool retriable(int status) {
  return status == 429 || status == 502 || status == 503 || status == 504;
}

}  // namespace

std::string url_encode(std::string_view s) {
  static const char* kHex = "0123456789ABCDEF";
  std::string out;
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(ch);
    } else if (c == ' ') {
      out.push_back('_');
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 15]);
    }
  }
  return out;
}

std::pair<std::string, std::string> split_url(std::string_view url) {
  auto scheme = url.find("://");
  std::size_t host_start = scheme == std::string_view::npos ? 0 : scheme + 3;
  auto slash = url.find('/', host_start);
  if (slash == std::string_view::npos) return {std::string(url), "/"};
  return {std::string(url.substr(0, slash)), std::string(url.substr(slash))};
}

std::string resolve_wiki_endpoint(std::string_view flag_value) {
  if (!flag_value.empty()) return std::string(flag_value);
  if (const char* env = std::getenv("STORYWEAVER_WIKI_ENDPOINT"); env && *env) {
    return env;
  }
  return "https://en.wikipedia.org/w/api.php";
}

WikiClient::WikiClient(std::string endpoint, FetchOptions options)
    : endpoint_(std::move(endpoint)), options_(std::move(options)) {
  std::tie(origin_, path_) = split_url(endpoint_);
  if (options_.max_attempts < 1) options_.max_attempts = 1;
}

FetchedDocument WikiClient::fetch_article(std::string_view title) {
  if (title.empty()) throw FetchError(FetchErrorKind::not_found, "empty article title");
  std::string target = path_;
  target += (target.find('?') == std::string::npos ? '?' : '&');
  target += "action=parse&format=json&formatversion=2&prop=wikitext&redirects=1&page=" +
            url_encode(title);

  httplib::Client client(origin_);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  httplib::Headers headers{{"User-Agent", options_.user_agent}};

  EndpointGate& gate = gate_for(origin_ + path_);
  int last_status = 0;
  std::string last_error;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    httplib::Result res;
    {
      std::lock_guard lock(gate.mu);
      auto now = std::chrono::steady_clock::now();
      auto ready = gate.last + options_.politeness_delay;
      if (gate.last.time_since_epoch().count() != 0 && now < ready) {
        std::this_thread::sleep_for(ready - now);
      }
      ++requests_;
      res = client.Get(target, headers);
      gate.last = std::chrono::steady_clock::now();
    }
    if (!res) {
      last_status = 0;
      last_error = httplib::to_string(res.error());
    } else if (res->status == 200) {
      nlohmann::json body;
      try {
        body = nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::parse_error& e) {
        throw FetchError(FetchErrorKind::http,
                         std::string("endpoint returned malformed JSON: ") + e.what(),
                         200);
      }
      if (body.contains("error")) {
        std::string code = body["error"].value("code", "");
        if (code == "missingtitle" || code == "invalidtitle") {
          throw FetchError(FetchErrorKind::not_found,
                           "article '" + std::string(title) + "' not found", 200);
        }
        if (code != "ratelimited" && code != "maxlag") {
          throw FetchError(FetchErrorKind::http, "endpoint error: " + code, 200);
        }
        last_status = 429;
        last_error = code;
      } else {
        const auto& parse = body.value("parse", nlohmann::json::object());
        FetchedDocument doc;
        doc.title = parse.value("title", std::string(title));
        const auto& wt = parse.contains("wikitext") ? parse["wikitext"]
                                                    : nlohmann::json();
        if (wt.is_string()) {
          doc.wikitext = wt.get<std::string>();
        } else if (wt.is_object() && wt.contains("*")) {
          doc.wikitext = wt["*"].get<std::string>();
        } else {
          throw FetchError(FetchErrorKind::http, "response carries no wikitext", 200);
        }
        doc.raw_body = std::move(res->body);
        return doc;
      }
    } else if (res->status == 404) {
      throw FetchError(FetchErrorKind::not_found,
                       "article '" + std::string(title) + "' not found", 404);
    } else if (retriable(res->status)) {
      last_status = res->status;
      last_error = "HTTP " + std::to_string(res->status);
    } else {
      throw FetchError(FetchErrorKind::http, "HTTP " + std::to_string(res->status),
                       res->status);
    }
    if (attempt < options_.max_attempts) {
      std::this_thread::sleep_for(options_.retry_backoff * attempt);
    }
  }
  if (last_status == 429) {
    throw FetchError(FetchErrorKind::rate_limited,
                     "rate limited after " + std::to_string(options_.max_attempts) +
                         " attempts",
                     429);
  }
  if (last_status == 0) {
    throw FetchError(FetchErrorKind::network, "network error: " + last_error);
  }
  throw FetchError(FetchErrorKind::http,
                   last_error + " after " + std::to_string(options_.max_attempts) +
                       " attempts",
                   last_status);
}

}  // namespace storyweaver
