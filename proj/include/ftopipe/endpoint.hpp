// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ftopipe/scorer.hpp"

namespace ftopipe {

/// Bidirectional line stream to an external scorer. send() and close_input()
/// are called from one writer thread while receive() runs on another.
class LineChannel {
  public:
    virtual ~LineChannel() = default;
    /// Writes `line` followed by '\n'.
    virtual void send(std::string_view line) = 0;
    /// Signals end of requests; the endpoint flushes and closes its output.
    virtual void close_input() = 0;
    /// Next response line without its '\n', or nullopt at end of stream.
    virtual std::optional<std::string> receive() = 0;
    /// Stops the exchange after a protocol failure so a blocked writer can
    /// return.
    virtual void abort() {}
};

/// Runs `/bin/sh -c command` with its stdin/stdout connected to pipes.
class ProcessChannel : public LineChannel {
  public:
    explicit ProcessChannel(const std::string& command);
    ~ProcessChannel() override;
    ProcessChannel(const ProcessChannel&) = delete;
    ProcessChannel& operator=(const ProcessChannel&) = delete;

    void send(std::string_view line) override;
    void close_input() override;
    std::optional<std::string> receive() override;
    void abort() override;

    /// Waits for the child and returns its exit status (-1 if abnormal).
    int wait();

  private:
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
    bool eof_ = false;
    std::optional<int> status_;
};

/// Request serialization for the wire: {"qid","cid","text_a","text_b"} in
/// that key order, compact, no trailing whitespace.
std::string encode_request(const ScoreRequest& request);

/// Parsed response line. Throws ProtocolError on malformed input and
/// NonFiniteLogit when a logit is not finite.
struct WireResponse {
    std::string query_id;
    std::string candidate_id;
    double logit_0 = 0.0;
    double logit_1 = 0.0;
};
WireResponse decode_response(std::string_view line);

/// Sends every request, closes input, then collects responses matched by
/// (qid, cid). Replies may arrive in any order; results follow request order.
/// Throws ProtocolError (unknown, duplicate, or malformed reply),
/// MissingResponse, NonFiniteLogit.
std::vector<ScoreResult> score_batch_external(LineChannel& channel, std::span<const ScoreRequest> requests);

/// Starts one endpoint process per batch, since a batch ends when input closes.
class ExternalScorer : public PairScorer {
  public:
    explicit ExternalScorer(std::string command) : command_(std::move(command)) {}
    std::vector<ScoreResult> score(std::span<const ScoreRequest> requests) override;

  private:
    std::string command_;
};

}  // namespace ftopipe
