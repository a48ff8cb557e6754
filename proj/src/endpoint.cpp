// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "ftopipe/endpoint.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <exception>
#include <map>
#include <thread>

#include "ftopipe/error.hpp"
#include "json.hpp"

namespace ftopipe {

// ---------------------------------------------------------------------------
// ProcessChannel

namespace {

void close_fd(int& fd) {
    if (fd >= 0) {
        ::close(fd);
        fd = -1;
    }
}

[[noreturn]] void io_error(const std::string& what) {
    throw Error(ErrorCode::IoError, what + ": " + std::strerror(errno));
}

}  // namespace

ProcessChannel::ProcessChannel(const std::string& command) {
    // A dead endpoint must surface as EPIPE, not kill the client.
    ::signal(SIGPIPE, SIG_IGN);

    int in_pipe[2];
    int out_pipe[2];
    if (::pipe2(in_pipe, O_CLOEXEC) != 0) io_error("pipe");
    if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        io_error("pipe");
    }

    pid_ = ::fork();
    if (pid_ < 0) io_error("fork");
    if (pid_ == 0) {
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::signal(SIGPIPE, SIG_DFL);
        ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
}

ProcessChannel::~ProcessChannel() {
    close_fd(to_child_);
    close_fd(from_child_);
    wait();
}

void ProcessChannel::send(std::string_view line) {
    std::string data(line);
    data += '\n';
    std::size_t written = 0;
    while (written < data.size()) {
        if (to_child_ < 0) throw Error(ErrorCode::IoError, "endpoint input already closed");
        const ssize_t n = ::write(to_child_, data.data() + written, data.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            io_error("write to endpoint");
        }
        written += static_cast<std::size_t>(n);
    }
}

void ProcessChannel::close_input() { close_fd(to_child_); }

std::optional<std::string> ProcessChannel::receive() {
    while (true) {
        if (const auto pos = buffer_.find('\n'); pos != std::string::npos) {
            std::string line = buffer_.substr(0, pos);
            buffer_.erase(0, pos + 1);
            return line;
        }
        if (eof_ || from_child_ < 0) {
            if (buffer_.empty()) return std::nullopt;
            std::string line = std::move(buffer_);
            buffer_.clear();
            return line;
        }
        char chunk[65536];
        const ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
        if (n < 0) {
            if (errno == EINTR) continue;
            io_error("read from endpoint");
        }
        if (n == 0) {
            eof_ = true;
        } else {
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }
}

void ProcessChannel::abort() {
    if (pid_ > 0 && !status_) ::kill(pid_, SIGTERM);
    close_fd(from_child_);
}

int ProcessChannel::wait() {
    if (status_) return *status_;
    if (pid_ <= 0) return -1;
    int raw = 0;
    while (::waitpid(pid_, &raw, 0) < 0) {
        if (errno != EINTR) {
            status_ = -1;
            return -1;
        }
    }
    status_ = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return *status_;
}

// ---------------------------------------------------------------------------
// Wire format

std::string encode_request(const ScoreRequest& request) {
    nlohmann::ordered_json obj;
    obj["qid"] = request.query_id;
    obj["cid"] = request.candidate_id;
    obj["text_a"] = request.text_a;
    obj["text_b"] = request.text_b;
    return obj.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

namespace {

[[noreturn]] void protocol_error(const std::string& reason) { throw Error(ErrorCode::ProtocolError, reason); }

std::string key_of(std::string_view qid, std::string_view cid) {
    std::string key(qid);
    key += '\x1F';
    key += cid;
    return key;
}

std::string describe_key(std::string_view qid, std::string_view cid) {
    return "(" + std::string(qid) + ", " + std::string(cid) + ")";
}

}  // namespace

WireResponse decode_response(std::string_view line) {
    nlohmann::json obj;
    try {
        obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::out_of_range&) {
        // A number literal too large for a double, e.g. 1e999.
        throw Error(ErrorCode::NonFiniteLogit, "number overflow in response: " + std::string(line));
    } catch (const nlohmann::json::exception&) {
        protocol_error("response is not a JSON object: " + std::string(line));
    }
    if (!obj.is_object()) protocol_error("response is not a JSON object: " + std::string(line));
    if (const auto err = obj.find("error"); err != obj.end()) {
        protocol_error("endpoint reported error: " + err->dump());
    }
    auto str_field = [&](const char* key) {
        const auto it = obj.find(key);
        if (it == obj.end() || !it->is_string()) protocol_error(std::string("response lacks string field ") + key);
        return it->get<std::string>();
    };
    auto num_field = [&](const char* key) {
        const auto it = obj.find(key);
        if (it == obj.end() || !it->is_number()) protocol_error(std::string("response lacks numeric field ") + key);
        return it->get<double>();
    };
    WireResponse r{str_field("qid"), str_field("cid"), num_field("logit_0"), num_field("logit_1")};
    if (!std::isfinite(r.logit_0) || !std::isfinite(r.logit_1)) {
        throw Error(ErrorCode::NonFiniteLogit, describe_key(r.query_id, r.candidate_id));
    }
    return r;
}

std::vector<ScoreResult> score_batch_external(LineChannel& channel, std::span<const ScoreRequest> requests) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < requests.size(); ++i) {
        if (!index.emplace(key_of(requests[i].query_id, requests[i].candidate_id), i).second) {
            protocol_error("duplicate request key " + describe_key(requests[i].query_id, requests[i].candidate_id));
        }
    }

    std::exception_ptr writer_error;
    std::thread writer([&] {
        try {
            for (const auto& req : requests) channel.send(encode_request(req));
            channel.close_input();
        } catch (...) {
            writer_error = std::current_exception();
            try {
                channel.close_input();
            } catch (...) {
            }
        }
    });

    std::vector<std::optional<ScoreResult>> slots(requests.size());
    std::exception_ptr reader_error;
    try {
        std::size_t line_no = 0;
        while (auto line = channel.receive()) {
            ++line_no;
            if (line->empty()) continue;
            WireResponse r;
            try {
                r = decode_response(*line);
            } catch (const Error& e) {
                throw Error(e.code(), e.detail(), line_no);
            }
            const auto it = index.find(key_of(r.query_id, r.candidate_id));
            if (it == index.end()) {
                throw Error(ErrorCode::ProtocolError,
                            "response for unknown pair " + describe_key(r.query_id, r.candidate_id), line_no);
            }
            auto& slot = slots[it->second];
            if (slot) {
                throw Error(ErrorCode::ProtocolError,
                            "duplicate response for " + describe_key(r.query_id, r.candidate_id), line_no);
            }
            slot = make_score_result(std::move(r.query_id), std::move(r.candidate_id), r.logit_0, r.logit_1);
        }
    } catch (...) {
        reader_error = std::current_exception();
        channel.abort();
    }
    writer.join();
    if (reader_error) std::rethrow_exception(reader_error);

    std::string missing;
    std::size_t n_missing = 0;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i]) continue;
        if (n_missing++ < 8) {
            if (!missing.empty()) missing += ", ";
            missing += describe_key(requests[i].query_id, requests[i].candidate_id);
        }
    }
    if (n_missing > 0) {
        // A writer failure (endpoint exited early) shows up here as unanswered keys.
        throw Error(ErrorCode::MissingResponse,
                    std::to_string(n_missing) + " unanswered request(s): " + missing + (n_missing > 8 ? ", ..." : ""));
    }
    if (writer_error) std::rethrow_exception(writer_error);

    std::vector<ScoreResult> out;
    out.reserve(requests.size());
    for (auto& slot : slots) out.push_back(std::move(*slot));
    return out;
}

std::vector<ScoreResult> ExternalScorer::score(std::span<const ScoreRequest> requests) {
    if (requests.empty()) return {};
    ProcessChannel channel(command_);
    auto results = score_batch_external(channel, requests);
    channel.wait();
    return results;
}

}  // namespace ftopipe
