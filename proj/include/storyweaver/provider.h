#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "json.hpp"

namespace storyweaver {

// Request/response transport shared by the external summarizer and embedder.
// Failures (transport, timeout, malformed reply) surface as ProviderError.
class JsonTransport {
 public:
  virtual ~JsonTransport() = default;
  virtual nlohmann::json call(const nlohmann::json& request) = 0;
};

// POSTs the request as JSON and parses the JSON reply.
class HttpJsonTransport : public JsonTransport {
 public:
  HttpJsonTransport(std::string url, std::chrono::milliseconds timeout);
  nlohmann::json call(const nlohmann::json& request) override;

 private:
  std::string origin_;
  std::string path_;
  std::chrono::milliseconds timeout_;
};

// Line protocol over a child process: one JSON request line on stdin, one
// JSON reply line on stdout. A fresh process per request.
class SubprocessJsonTransport : public JsonTransport {
 public:
  SubprocessJsonTransport(std::string command, std::chrono::milliseconds timeout);
  nlohmann::json call(const nlohmann::json& request) override;

 private:
  std::string command_;
  std::chrono::milliseconds timeout_;
};

// "http://..." / "https://..." select HTTP; "exec:<command>" selects the
// subprocess line protocol.
std::unique_ptr<JsonTransport> make_transport(const std::string& endpoint,
                                              std::chrono::milliseconds timeout);

}  // namespace storyweaver
