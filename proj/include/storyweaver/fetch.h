#pragma once

#include <chrono>
#include <stdexcept>
#include <string>
#include <string_view>

namespace storyweaver {

enum class FetchErrorKind { network, not_found, rate_limited, http };

class FetchError : public std::runtime_error {
 public:
  FetchError(FetchErrorKind kind, const std::string& message, int status = 0)
      : std::runtime_error(message), kind_(kind), status_(status) {}
  FetchErrorKind kind() const { return kind_; }
  int status() const { return status_; }

 private:
  FetchErrorKind kind_;
  int status_;
};

struct FetchOptions {
  int max_attempts = 3;
  std::chrono::milliseconds retry_backoff{500};
  // Minimum spacing between requests to one endpoint, across clients.
  std::chrono::milliseconds politeness_delay{0};
  std::chrono::seconds timeout{10};
  std::string user_agent = "storyweaver/1.0";
};

struct FetchedDocument {
  std::string title;
  std::string wikitext;
  std::string raw_body;
};

// Reads article wikitext from a MediaWiki action=parse endpoint. The only
// networked ingestion path; requests to one endpoint are serialized.
class WikiClient {
 public:
  explicit WikiClient(std::string endpoint, FetchOptions options = {});

  FetchedDocument fetch_article(std::string_view title);

  // Requests issued by this client, retries included.
  int requests_made() const { return requests_; }

 private:
  std::string endpoint_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;
  FetchOptions options_;
  int requests_ = 0;
};

// Endpoint from an explicit flag value, else $STORYWEAVER_WIKI_ENDPOINT, else
// the English Wikipedia API.
std::string resolve_wiki_endpoint(std::string_view flag_value);

std::string url_encode(std::string_view s);

// Splits "http://host:port/path?q" into origin and path-with-query.
std::pair<std::string, std::string> split_url(std::string_view url);

}  // namespace storyweaver
