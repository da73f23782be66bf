#include "threadloom/external.hpp"

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <map>
#include <set>
#include <utility>

#include "json.hpp"

extern char** environ;

namespace threadloom {

using nlohmann::json;

namespace {

[[noreturn]] void fail(ProtocolFailure f, const std::string& what) {
  throw ExternalScorerError(f, "external scorer: " + what);
}

[[noreturn]] void fail_errno(const std::string& what) {
  fail(ProtocolFailure::transport, what + ": " + std::strerror(errno));
}

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  Fd& operator=(Fd&& other) noexcept {
    if (this != &other) {
      reset();
      fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() { reset(); }

  int get() const { return fd_; }
  explicit operator bool() const { return fd_ >= 0; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

void set_nonblocking(int fd) {
  const int flags = ::fcntl(fd, F_GETFL);
  if (flags < 0 || ::fcntl(fd, F_SETFL, flags | O_NONBLOCK) < 0) {
    fail_errno("fcntl");
  }
}

bool is_terminator(std::string_view line) {
  if (line.find("end") == std::string_view::npos) return false;
  const json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (!obj.is_object()) return false;
  auto it = obj.find("end");
  return it != obj.end() && it->is_boolean() && it->get<bool>();
}

// Writes the request while draining the response so neither side can stall
// on a full buffer. Returns everything read up to and including the
// terminator line, or up to EOF.
std::string exchange(Fd& write_end, int read_fd, bool sockets,
                     const std::string& request, int timeout_ms) {
  using clock = std::chrono::steady_clock;
  const auto deadline = clock::now() + std::chrono::milliseconds(timeout_ms);
  const bool shared = sockets;  // one fd for both directions
  set_nonblocking(read_fd);
  if (!shared) set_nonblocking(write_end.get());

  std::string response;
  std::size_t written = 0;
  std::size_t scanned = 0;
  char buf[65536];
  while (true) {
    const bool want_write = written < request.size();
    if (!want_write && !shared && write_end) write_end.reset();

    pollfd fds[2];
    nfds_t count = 0;
    fds[count++] = {read_fd, static_cast<short>(POLLIN | (shared && want_write ? POLLOUT : 0)), 0};
    if (!shared && want_write) fds[count++] = {write_end.get(), POLLOUT, 0};

    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                          deadline - clock::now())
                          .count();
    if (left <= 0) fail(ProtocolFailure::transport, "timed out waiting for response");
    const int ready = ::poll(fds, count, static_cast<int>(left));
    if (ready < 0) {
      if (errno == EINTR) continue;
      fail_errno("poll");
    }
    if (ready == 0) continue;

    const short write_events = shared ? fds[0].revents : (count > 1 ? fds[1].revents : 0);
    if (want_write && (write_events & (POLLOUT | POLLERR | POLLHUP))) {
      const char* data = request.data() + written;
      const std::size_t len = request.size() - written;
      const ssize_t n = shared ? ::send(read_fd, data, len, MSG_NOSIGNAL)
                               : ::write(write_end.get(), data, len);
      if (n < 0) {
        if (errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR) {
          fail_errno("writing request");
        }
      } else {
        written += static_cast<std::size_t>(n);
      }
    }

    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      const ssize_t n = ::read(read_fd, buf, sizeof buf);
      if (n < 0) {
        if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) continue;
        fail_errno("reading response");
      }
      if (n == 0) return response;  // EOF
      response.append(buf, static_cast<std::size_t>(n));
      std::size_t nl;
      while ((nl = response.find('\n', scanned)) != std::string::npos) {
        const std::string_view line(response.data() + scanned, nl - scanned);
        scanned = nl + 1;
        if (is_terminator(line)) {
          response.resize(scanned);
          return response;
        }
      }
    }
  }
}

// Keeps SIGPIPE from killing the process while writing to a child that
// exited early; EPIPE is reported instead.
class SigpipeGuard {
 public:
  SigpipeGuard() {
    sigset_t block;
    sigemptyset(&block);
    sigaddset(&block, SIGPIPE);
    pthread_sigmask(SIG_BLOCK, &block, &old_);
  }
  ~SigpipeGuard() {
    sigset_t pending;
    sigpending(&pending);
    if (sigismember(&pending, SIGPIPE)) {
      sigset_t only;
      sigemptyset(&only);
      sigaddset(&only, SIGPIPE);
      timespec zero{0, 0};
      sigtimedwait(&only, nullptr, &zero);
    }
    pthread_sigmask(SIG_SETMASK, &old_, nullptr);
  }
  SigpipeGuard(const SigpipeGuard&) = delete;
  SigpipeGuard& operator=(const SigpipeGuard&) = delete;

 private:
  sigset_t old_;
};

std::string run_exec(const std::string& command, const std::string& request,
                     int timeout_ms) {
  int to_child[2];
  int from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0) fail_errno("pipe");
  Fd child_in(to_child[0]), write_end(to_child[1]);
  if (::pipe2(from_child, O_CLOEXEC) != 0) fail_errno("pipe");
  Fd read_end(from_child[0]), child_out(from_child[1]);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, child_in.get(), STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, child_out.get(), STDOUT_FILENO);
  std::string shell_cmd = command;
  char sh[] = "/bin/sh";
  char dash_c[] = "-c";
  char* argv[] = {sh, dash_c, shell_cmd.data(), nullptr};
  // Own process group, so a failed exchange can stop the command's children too.
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);
  pid_t pid = 0;
  const int rc = ::posix_spawn(&pid, "/bin/sh", &actions, &attr, argv, environ);
  posix_spawnattr_destroy(&attr);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    errno = rc;
    fail_errno("spawning '" + command + "'");
  }
  child_in.reset();
  child_out.reset();

  std::string response;
  std::string error;
  try {
    SigpipeGuard guard;
    response = exchange(write_end, read_end.get(), false, request, timeout_ms);
  } catch (const ExternalScorerError& e) {
    error = e.what();
  }
  write_end.reset();
  read_end.reset();
  if (!error.empty()) ::kill(-pid, SIGTERM);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (!error.empty()) throw ExternalScorerError(ProtocolFailure::transport, error);
  if (response.empty() && WIFEXITED(status) && WEXITSTATUS(status) != 0) {
    fail(ProtocolFailure::transport, "command '" + command + "' exited with status " +
                                         std::to_string(WEXITSTATUS(status)));
  }
  return response;
}

Fd connect_tcp(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == address.size()) {
    fail(ProtocolFailure::transport, "tcp endpoint must be host:port, got '" + address + "'");
  }
  std::string host = address.substr(0, colon);
  const std::string port = address.substr(colon + 1);
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') {
    host = host.substr(1, host.size() - 2);
  }
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  if (const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &found); rc != 0) {
    fail(ProtocolFailure::transport, "resolving '" + address + "': " + ::gai_strerror(rc));
  }
  std::string last_error = "no addresses";
  for (addrinfo* ai = found; ai != nullptr; ai = ai->ai_next) {
    Fd fd(::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol));
    if (!fd) continue;
    if (::connect(fd.get(), ai->ai_addr, ai->ai_addrlen) == 0) {
      ::freeaddrinfo(found);
      return fd;
    }
    last_error = std::strerror(errno);
  }
  ::freeaddrinfo(found);
  fail(ProtocolFailure::transport, "connecting to '" + address + "': " + last_error);
}

Fd connect_unix(const std::string& path) {
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (path.empty() || path.size() >= sizeof addr.sun_path) {
    fail(ProtocolFailure::transport, "bad unix socket path '" + path + "'");
  }
  std::memcpy(addr.sun_path, path.c_str(), path.size() + 1);
  Fd fd(::socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!fd) fail_errno("socket");
  if (::connect(fd.get(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    fail_errno("connecting to '" + path + "'");
  }
  return fd;
}

}  // namespace

std::string_view failure_name(ProtocolFailure f) {
  switch (f) {
    case ProtocolFailure::transport: return "transport";
    case ProtocolFailure::malformed_line: return "malformed_line";
    case ProtocolFailure::missing_id: return "missing_id";
    case ProtocolFailure::unexpected_id: return "unexpected_id";
    case ProtocolFailure::score_out_of_range: return "score_out_of_range";
    case ProtocolFailure::remote_error: return "remote_error";
  }
  return "unknown";
}

std::string encode_score_request(std::span<const PromptedExample> prompted) {
  std::string out;
  for (const auto& p : prompted) {
    nlohmann::ordered_json obj;
    obj["pair_id"] = p.pair_id();
    obj["text"] = p.text;
    out += obj.dump();
    out += '\n';
  }
  out += "{\"end\":true}\n";
  return out;
}

std::vector<ScoredPair> decode_score_response(std::string_view response,
                                              std::span<const PromptedExample> prompted) {
  std::map<std::string, std::size_t, std::less<>> slot;
  for (std::size_t i = 0; i < prompted.size(); ++i) slot.emplace(prompted[i].pair_id(), i);
  std::vector<double> scores(prompted.size(), 0.0);
  std::vector<bool> seen(prompted.size(), false);

  bool terminated = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < response.size() && !terminated) {
    auto nl = response.find('\n', pos);
    if (nl == std::string_view::npos) nl = response.size();
    std::string_view line = response.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    const std::string where = "response line " + std::to_string(line_no);
    const json obj = json::parse(line, nullptr, false);
    if (!obj.is_object()) fail(ProtocolFailure::malformed_line, where + " is not a JSON object");
    if (auto end = obj.find("end"); end != obj.end()) {
      if (!end->is_boolean() || !end->get<bool>()) {
        fail(ProtocolFailure::malformed_line, where + ": bad terminator");
      }
      terminated = true;
      break;
    }
    auto id_it = obj.find("pair_id");
    if (id_it == obj.end() || !id_it->is_string()) {
      fail(ProtocolFailure::malformed_line, where + " lacks a string pair_id");
    }
    const std::string id = id_it->get<std::string>();
    if (auto err = obj.find("error"); err != obj.end()) {
      fail(ProtocolFailure::remote_error,
           "scorer reported an error for '" + id + "': " +
               (err->is_string() ? err->get<std::string>() : err->dump()));
    }
    auto score_it = obj.find("score");
    if (score_it == obj.end() || !score_it->is_number()) {
      fail(ProtocolFailure::malformed_line, where + " lacks a numeric score");
    }
    const double score = score_it->get<double>();
    auto s = slot.find(id);
    if (s == slot.end()) fail(ProtocolFailure::unexpected_id, "unrequested pair_id '" + id + "'");
    if (seen[s->second]) fail(ProtocolFailure::unexpected_id, "pair_id '" + id + "' answered twice");
    if (!std::isfinite(score) || score < 0.0 || score > 1.0) {
      fail(ProtocolFailure::score_out_of_range,
           "score " + score_it->dump() + " for '" + id + "' outside [0, 1]");
    }
    seen[s->second] = true;
    scores[s->second] = score;
  }
  if (!terminated) fail(ProtocolFailure::transport, "response ended before the terminator");
  std::vector<ScoredPair> out;
  out.reserve(prompted.size());
  for (std::size_t i = 0; i < prompted.size(); ++i) {
    if (!seen[i]) {
      fail(ProtocolFailure::missing_id, "no score returned for '" + prompted[i].pair_id() + "'");
    }
    out.push_back({prompted[i].pair_id(), scores[i]});
  }
  return out;
}

std::vector<ScoredPair> external_score_batch(std::string_view endpoint,
                                             std::span<const PromptedExample> prompted,
                                             const ExternalOptions& options) {
  if (prompted.empty()) throw usage_error("external scoring needs a nonempty batch");
  std::set<std::string> ids;
  for (const auto& p : prompted) {
    if (!ids.insert(p.pair_id()).second) {
      throw usage_error("duplicate pair_id '" + p.pair_id() + "' in batch");
    }
  }
  const std::string request = encode_score_request(prompted);
  std::string response;
  if (endpoint.starts_with("exec:")) {
    response = run_exec(std::string(endpoint.substr(5)), request, options.timeout_ms);
  } else if (endpoint.starts_with("tcp:") || endpoint.starts_with("unix:")) {
    const bool tcp = endpoint.starts_with("tcp:");
    Fd conn = tcp ? connect_tcp(std::string(endpoint.substr(4)))
                  : connect_unix(std::string(endpoint.substr(5)));
    Fd unused;
    response = exchange(unused, conn.get(), true, request, options.timeout_ms);
  } else {
    throw usage_error("unknown external endpoint '" + std::string(endpoint) +
                      "' (expected exec:, tcp: or unix:)");
  }
  return decode_score_response(response, prompted);
}

}  // namespace threadloom
