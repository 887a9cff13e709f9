#include "storyweaver/provider.h"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>

#ifdef STORYWEAVER_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"
#include "storyweaver/diagnostics.h"
#include "storyweaver/fetch.h"

namespace storyweaver {

using nlohmann::json;

namespace {

// Ignores SIGPIPE while any request writes to a child that may have exited
// without reading; the prior disposition returns when the last writer leaves.
class SigpipeGuard {
 public:
  SigpipeGuard() {
    std::lock_guard lock(mu());
    if (users()++ == 0) {
      struct sigaction ignore {};
      ignore.sa_handler = SIG_IGN;
      sigaction(SIGPIPE, &ignore, &previous());
    }
  }
  ~SigpipeGuard() {
    std::lock_guard lock(mu());
    if (--users() == 0) sigaction(SIGPIPE, &previous(), nullptr);
  }
  SigpipeGuard(const SigpipeGuard&) = delete;
  SigpipeGuard& operator=(const SigpipeGuard&) = delete;

 private:
  static std::mutex& mu() {
    static std::mutex m;
    return m;
  }
  static int& users() {
    static int n = 0;
    return n;
  }
  static struct sigaction& previous() {
    static struct sigaction p {};
    return p;
  }
};

}  // namespace

HttpJsonTransport::HttpJsonTransport(std::string url,
                                     std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  std::tie(origin_, path_) = split_url(url);
}

json HttpJsonTransport::call(const json& request) {
  httplib::Client client(origin_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  auto res = client.Post(path_, request.dump(), "application/json");
  if (!res) {
    throw ProviderError("provider request failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ProviderError("provider answered HTTP " + std::to_string(res->status));
  }
  try {
    return json::parse(res->body);
  } catch (const json::parse_error& e) {
    throw ProviderError(std::string("provider reply is not JSON: ") + e.what());
  }
}

SubprocessJsonTransport::SubprocessJsonTransport(std::string command,
                                                 std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {}

json SubprocessJsonTransport::call(const json& request) {
  int in_pipe[2];
  int out_pipe[2];
  if (pipe(in_pipe) != 0) throw ProviderError("pipe failed");
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw ProviderError("pipe failed");
  }
  pid_t pid = fork();
  if (pid < 0) throw ProviderError("fork failed");
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);

  SigpipeGuard guard;
  std::string line = request.dump() + "\n";
  std::size_t written = 0;
  while (written < line.size()) {
    ssize_t n = write(in_pipe[1], line.data() + written, line.size() - written);
    if (n <= 0) break;
    written += static_cast<std::size_t>(n);
  }
  close(in_pipe[1]);

  std::string reply;
  auto deadline = std::chrono::steady_clock::now() + timeout_;
  bool timed_out = false;
  char buf[4096];
  while (reply.find('\n') == std::string::npos) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    pollfd pfd{out_pipe[0], POLLIN, 0};
    int ready = poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready == 0) {
      timed_out = true;
      break;
    }
    if (ready < 0) {
      if (errno == EINTR) continue;
      break;
    }
    ssize_t n = read(out_pipe[0], buf, sizeof(buf));
    if (n <= 0) break;
    reply.append(buf, static_cast<std::size_t>(n));
  }
  close(out_pipe[0]);
  if (timed_out) kill(pid, SIGKILL);
  int status = 0;
  waitpid(pid, &status, 0);
  if (timed_out) throw ProviderError("provider process timed out");
  auto nl = reply.find('\n');
  if (nl == std::string::npos && reply.empty()) {
    throw ProviderError("provider process produced no reply");
  }
  try {
    return json::parse(reply.substr(0, nl));
  } catch (const json::parse_error& e) {
    throw ProviderError(std::string("provider reply is not JSON: ") + e.what());
  }
}

std::unique_ptr<JsonTransport> make_transport(const std::string& endpoint,
                                              std::chrono::milliseconds timeout) {
  if (endpoint.starts_with("exec:")) {
    return std::make_unique<SubprocessJsonTransport>(endpoint.substr(5), timeout);
  }
  if (endpoint.starts_with("http://") || endpoint.starts_with("https://")) {
    return std::make_unique<HttpJsonTransport>(endpoint, timeout);
  }
  throw ConfigError("unsupported provider endpoint '" + endpoint +
                    "' (expected http://, https:// or exec:)");
}

}  // namespace storyweaver
