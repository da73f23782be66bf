#include <sys/socket.h>
#include <sys/un.h>
#include <netinet/in.h>
#include <arpa/inet.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <thread>

#include "doctest.h"
#include "json.hpp"
#include "threadloom/error.hpp"
#include "threadloom/external.hpp"
#include "threadloom/scorer.hpp"

using namespace threadloom;

namespace {

const std::string kEcho = std::string("exec:") + ECHO_SCORER_PATH;

std::vector<PromptedExample> batch(int n) {
  std::vector<PromptedExample> out;
  for (int i = 1; i <= n; ++i) {
    PairExample p;
    p.thread_id = "t";
    p.earlier_index = i;
    p.later_index = i + 1;
    p.earlier_text = "earlier " + std::to_string(i);
    p.later_text = "later\n" + std::to_string(i);
    out.push_back(render_prompt(default_template(), p));
  }
  return out;
}

ProtocolFailure failure_of(const std::string& endpoint, const std::vector<PromptedExample>& b,
                           std::string* message = nullptr, ExternalOptions opts = {}) {
  try {
    external_score_batch(endpoint, b, opts);
  } catch (const ExternalScorerError& e) {
    CHECK(e.kind() == ErrorKind::transport);
    if (message) *message = e.what();
    return e.failure();
  }
  FAIL("expected a protocol failure from " << endpoint);
  return ProtocolFailure::transport;
}

// Reads one request up to the terminator, answers each id with 0.25.
std::string serve_one(int fd) {
  std::string in;
  char buf[4096];
  while (in.find("{\"end\":true}\n") == std::string::npos) {
    const ssize_t r = ::read(fd, buf, sizeof buf);
    if (r <= 0) break;
    in.append(buf, static_cast<std::size_t>(r));
  }
  std::string out;
  std::size_t pos = 0;
  while (pos < in.size()) {
    const auto nl = in.find('\n', pos);
    const auto obj = nlohmann::json::parse(in.substr(pos, nl - pos));
    pos = nl + 1;
    if (obj.contains("end")) break;
    out += "{\"pair_id\":" + obj["pair_id"].dump() + ",\"score\":0.25}\n";
  }
  out += "{\"end\":true}\n";
  std::size_t sent = 0;
  while (sent < out.size()) {
    const ssize_t w = ::write(fd, out.data() + sent, out.size() - sent);
    if (w <= 0) break;
    sent += static_cast<std::size_t>(w);
  }
  return in;
}

}  // namespace

TEST_CASE("request encoding") {
  const auto b = batch(2);
  const std::string req = encode_score_request(b);
  CHECK(req.ends_with("{\"end\":true}\n"));
  std::size_t lines = 0;
  for (char c : req) lines += c == '\n';
  CHECK(lines == 3);
  const auto first = nlohmann::json::parse(req.substr(0, req.find('\n')));
  CHECK(first["pair_id"] == "t:1:2");
  CHECK(first["text"] == b[0].text);
}

TEST_CASE("response decoding reorders and validates") {
  const auto b = batch(3);
  const auto scores = decode_score_response(
      "{\"pair_id\":\"t:3:4\",\"score\":0.3}\n\n{\"pair_id\":\"t:1:2\",\"score\":1}\r\n"
      "{\"pair_id\":\"t:2:3\",\"score\":0}\n{\"end\":true}\n",
      b);
  REQUIRE(scores.size() == 3);
  CHECK(scores[0].pair_id == "t:1:2");
  CHECK(scores[0].score == 1.0);
  CHECK(scores[1].score == 0.0);
  CHECK(scores[2].score == 0.3);

  auto fails = [&](std::string_view text) {
    try {
      decode_score_response(text, b);
    } catch (const ExternalScorerError& e) {
      return e.failure();
    }
    FAIL("expected failure for " << text);
    return ProtocolFailure::transport;
  };
  const std::string rest =
      "{\"pair_id\":\"t:2:3\",\"score\":0.1}\n{\"pair_id\":\"t:3:4\",\"score\":0.1}\n";
  CHECK(fails(rest + "{\"end\":true}\n") == ProtocolFailure::missing_id);
  CHECK(fails("{\"pair_id\":\"t:1:2\",\"score\":-0.1}\n" + rest + "{\"end\":true}\n") ==
        ProtocolFailure::score_out_of_range);
  CHECK(fails("{\"pair_id\":\"t:1:2\",\"score\":0.1}\n{\"pair_id\":\"t:1:2\",\"score\":0.1}\n") ==
        ProtocolFailure::unexpected_id);
  CHECK(fails("{\"pair_id\":\"zz\",\"score\":0.1}\n") == ProtocolFailure::unexpected_id);
  CHECK(fails("{\"pair_id\":\"t:1:2\",\"score\":\"high\"}\n") == ProtocolFailure::malformed_line);
  CHECK(fails("[1,2]\n") == ProtocolFailure::malformed_line);
  CHECK(fails("{\"end\":false}\n") == ProtocolFailure::malformed_line);
  CHECK(fails("{\"pair_id\":\"t:1:2\",\"error\":\"oom\"}\n") == ProtocolFailure::remote_error);
  CHECK(fails("{\"pair_id\":\"t:1:2\",\"score\":0.1}\n" + rest) == ProtocolFailure::transport);
}

TEST_CASE("exec endpoint round trip") {
  const auto b = batch(3);
  const auto scores = external_score_batch(kEcho + " --score 0.8", b);
  REQUIRE(scores.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(scores[i].pair_id == b[i].pair_id());
    CHECK(scores[i].score == 0.8);
  }
  CHECK(external_score_batch(kEcho + " --reverse", b).front().pair_id == "t:1:2");
  CHECK(external_score_batch(kEcho + " --exit 4", b).size() == 3);
}

TEST_CASE("exec endpoint failure modes") {
  const auto b = batch(3);
  std::string msg;
  CHECK(failure_of(kEcho + " --drop t:2:3", b, &msg) == ProtocolFailure::missing_id);
  CHECK(msg.find("t:2:3") != std::string::npos);
  CHECK(failure_of(kEcho + " --bad-score t:1:2", b, &msg) == ProtocolFailure::score_out_of_range);
  CHECK(msg.find("t:1:2") != std::string::npos);
  CHECK(failure_of(kEcho + " --garbage", b) == ProtocolFailure::malformed_line);
  CHECK(failure_of(kEcho + " --error t:3:4", b, &msg) == ProtocolFailure::remote_error);
  CHECK(msg.find("t:3:4") != std::string::npos);
  CHECK(failure_of(kEcho + " --no-end", b) == ProtocolFailure::transport);
  CHECK(failure_of("exec:false", b) == ProtocolFailure::transport);
  CHECK(failure_of("exec:/nonexistent/scorer", b) == ProtocolFailure::transport);
  // a responder that ignores its input must not stall the writer
  CHECK(failure_of("exec:true", batch(2000)) == ProtocolFailure::transport);

  ExternalOptions quick;
  quick.timeout_ms = 200;
  const auto start = std::chrono::steady_clock::now();
  CHECK(failure_of("exec:sleep 5", b, &msg, quick) == ProtocolFailure::transport);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(3));
}

TEST_CASE("large batches flow through pipes without deadlock") {
  const auto b = batch(5000);
  const auto scores = external_score_batch("exec:" + std::string(ECHO_SCORER_PATH), b);
  CHECK(scores.size() == b.size());
  CHECK(scores.back().pair_id == b.back().pair_id());
}

TEST_CASE("batch preconditions are usage errors") {
  try {
    external_score_batch(kEcho, {});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::usage);
  }
  auto dup = batch(2);
  dup.push_back(dup.front());
  CHECK_THROWS_AS(external_score_batch(kEcho, dup), Error);
  try {
    external_score_batch("http://x", batch(1));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::usage);
  }
  CHECK(failure_of("tcp:nocolon", batch(1)) == ProtocolFailure::transport);
}

TEST_CASE("tcp endpoint") {
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  REQUIRE(listener >= 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  REQUIRE(::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  REQUIRE(::listen(listener, 1) == 0);
  socklen_t len = sizeof addr;
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
  const int port = ntohs(addr.sin_port);

  std::string received;
  std::thread server([&] {
    const int conn = ::accept(listener, nullptr, nullptr);
    received = serve_one(conn);
    ::close(conn);
  });
  const auto b = batch(4);
  const auto scores = external_score_batch("tcp:127.0.0.1:" + std::to_string(port), b);
  server.join();
  ::close(listener);
  CHECK(scores.size() == 4);
  CHECK(scores[2].score == 0.25);
  CHECK(received == encode_score_request(b));

  CHECK(failure_of("tcp:127.0.0.1:" + std::to_string(port), b) == ProtocolFailure::transport);
}

TEST_CASE("unix endpoint through the scorer model") {
  char dir[] = "/tmp/threadloom-sockXXXXXX";
  REQUIRE(::mkdtemp(dir) != nullptr);
  const std::string path = std::string(dir) + "/s";
  const int listener = ::socket(AF_UNIX, SOCK_STREAM, 0);
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  std::strncpy(addr.sun_path, path.c_str(), sizeof addr.sun_path - 1);
  REQUIRE(::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  REQUIRE(::listen(listener, 1) == 0);
  std::thread server([&] {
    const int conn = ::accept(listener, nullptr, nullptr);
    serve_one(conn);
    ::close(conn);
  });

  Thread t;
  t.id = "u";
  t.posts = {{1, "a", "x", {}}, {2, "b", "y", {}}, {3, "c", "z", {}}};
  const auto pairs = generate_pairs(t);
  const auto scores = score_thread_pairs(ScorerModel::external("unix:" + path), t, pairs);
  server.join();
  ::close(listener);
  ::unlink(path.c_str());
  ::rmdir(dir);
  CHECK(scores == std::vector<double>{0.25, 0.25, 0.25});
}
