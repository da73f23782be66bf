#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "threadloom/error.hpp"
#include "threadloom/prompting.hpp"

namespace threadloom {

// Line protocol spoken with an out-of-process scorer. One JSON object per
// line, UTF-8:
//   request:  {"pair_id": ..., "text": ...}* then {"end": true}
//   response: {"pair_id": ..., "score": ...}* then {"end": true}
// Responses may arrive in any order. A responder may answer a bad request
// with {"pair_id": ..., "error": ...}.
//
// Endpoints:
//   exec:<shell command>   spawn the command per batch, talk over its stdio
//   tcp:<host>:<port>      one connection per batch
//   unix:<path>            one connection per batch
enum class ProtocolFailure {
  transport,         // connect/spawn/IO failure, timeout, early EOF
  malformed_line,    // response line is not a valid record
  missing_id,        // a requested pair_id never came back
  unexpected_id,     // response names an id that was not requested, or twice
  score_out_of_range,
  remote_error,      // responder sent an error record
};

std::string_view failure_name(ProtocolFailure f);

class ExternalScorerError : public Error {
 public:
  ExternalScorerError(ProtocolFailure failure, const std::string& what)
      : Error(ErrorKind::transport, what), failure_(failure) {}

  ProtocolFailure failure() const noexcept { return failure_; }

 private:
  ProtocolFailure failure_;
};

struct ScoredPair {
  std::string pair_id;
  double score = 0.0;
};

struct ExternalOptions {
  int timeout_ms = 600'000;
};

std::string encode_score_request(std::span<const PromptedExample> prompted);

// Validates a complete response text against the requested ids and returns
// scores in request order.
std::vector<ScoredPair> decode_score_response(std::string_view response,
                                              std::span<const PromptedExample> prompted);

// Sends one batch and waits for the full response. Input must be nonempty
// with unique pair ids.
std::vector<ScoredPair> external_score_batch(std::string_view endpoint,
                                             std::span<const PromptedExample> prompted,
                                             const ExternalOptions& options = {});

}  // namespace threadloom
