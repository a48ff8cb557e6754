// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "ftopipe/endpoint.hpp"
#include "ftopipe/error.hpp"
#include "json.hpp"
#include "support/scripted_channel.hpp"

namespace ftopipe {
namespace {

std::vector<ScoreRequest> three_requests() {
    return {{"q", "A#1", "alpha", "beta"}, {"q", "B#1", "longer text", "x"}, {"q", "C#2", "a", "abc"}};
}

// Independent copy of the fake endpoint's scoring rule.
double expected_logit(const ScoreRequest& r) {
    return static_cast<double>(r.text_a.size()) - static_cast<double>(r.text_b.size()) + 0.25;
}

std::string respond(const std::string& request_line, double logit_1) {
    const auto req = nlohmann::json::parse(request_line);
    nlohmann::json resp = {{"qid", req["qid"]}, {"cid", req["cid"]}, {"logit_0", 0.0}, {"logit_1", logit_1}};
    return resp.dump();
}

std::string fake(const std::string& mode) { return std::string(FAKE_ENDPOINT_PATH) + " " + mode; }

TEST(Protocol, RequestEncoding) {
    EXPECT_EQ(encode_request({"q1", "US1#1", "a \"b\"", "c\nd"}),
              R"({"qid":"q1","cid":"US1#1","text_a":"a \"b\"","text_b":"c\nd"})");
    // Invalid UTF-8 is replaced rather than rejected.
    EXPECT_NO_THROW(encode_request({"q", "c", "\xFF\xFE", "x"}));
}

TEST(Protocol, ResponseDecoding) {
    const auto r = decode_response(R"({"qid":"q","cid":"c","logit_0":-1.5,"logit_1":2,"extra":true})");
    EXPECT_EQ(r.query_id, "q");
    EXPECT_EQ(r.logit_0, -1.5);
    EXPECT_EQ(r.logit_1, 2.0);
    for (const char* bad : {"[]", "nope", R"({"qid":"q","cid":"c","logit_0":0})", R"({"qid":1,"cid":"c","logit_0":0,"logit_1":0})",
                            R"({"error":"boom"})"}) {
        try {
            decode_response(bad);
            FAIL() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::ProtocolError) << bad;
        }
    }
}

TEST(ScriptedEndpoint, ReverseOrderIsReassembled) {
    const auto reqs = three_requests();
    testing::ScriptedChannel ch([](const std::vector<std::string>& lines) {
        std::vector<std::string> out;
        for (auto it = lines.rbegin(); it != lines.rend(); ++it) out.push_back(respond(*it, static_cast<double>(out.size())));
        return out;
    });
    const auto res = score_batch_external(ch, reqs);
    ASSERT_EQ(res.size(), 3u);
    EXPECT_EQ(res[0].candidate_id, "A#1");
    EXPECT_EQ(res[0].logit_1, 2.0);
    EXPECT_EQ(res[2].candidate_id, "C#2");
    EXPECT_EQ(res[2].logit_1, 0.0);
    EXPECT_NEAR(res[0].prob_1, softmax(0.0, 2.0)[1], 1e-15);
    EXPECT_EQ(ch.requests().size(), 3u);
}

TEST(ScriptedEndpoint, UnknownKeyIsProtocolError) {
    testing::ScriptedChannel ch([](const std::vector<std::string>&) {
        return std::vector<std::string>{R"({"qid":"zz","cid":"A#1","logit_0":0,"logit_1":0})"};
    });
    try {
        score_batch_external(ch, three_requests());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ProtocolError);
        EXPECT_EQ(e.line(), 1u);
    }
}

TEST(ScriptedEndpoint, DuplicateResponseIsProtocolError) {
    testing::ScriptedChannel ch([](const std::vector<std::string>& lines) {
        std::vector<std::string> out;
        for (const auto& l : lines) out.push_back(respond(l, 1.0));
        out.push_back(out.front());
        return out;
    });
    EXPECT_THROW(score_batch_external(ch, three_requests()), Error);
}

TEST(ScriptedEndpoint, MissingResponsesNamed) {
    testing::ScriptedChannel ch([](const std::vector<std::string>& lines) {
        return std::vector<std::string>{respond(lines.at(1), 1.0)};
    });
    try {
        score_batch_external(ch, three_requests());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingResponse);
        EXPECT_NE(e.detail().find("A#1"), std::string::npos);
        EXPECT_NE(e.detail().find("C#2"), std::string::npos);
        EXPECT_EQ(e.detail().find("B#1"), std::string::npos);
    }
}

TEST(ScriptedEndpoint, DuplicateRequestKeysRejected) {
    testing::ScriptedChannel ch([](const std::vector<std::string>&) { return std::vector<std::string>{}; });
    const std::vector<ScoreRequest> reqs = {{"q", "A#1", "a", "b"}, {"q", "A#1", "c", "d"}};
    EXPECT_THROW(score_batch_external(ch, reqs), Error);
}

TEST(ScriptedEndpoint, EmptyBatch) {
    testing::ScriptedChannel ch([](const std::vector<std::string>&) { return std::vector<std::string>{}; });
    EXPECT_TRUE(score_batch_external(ch, {}).empty());
}

TEST(ProcessEndpoint, OrderedAndReverse) {
    const auto reqs = three_requests();
    for (const char* mode : {"ordered", "reverse"}) {
        ExternalScorer scorer(fake(mode));
        const auto res = scorer.score(reqs);
        ASSERT_EQ(res.size(), reqs.size()) << mode;
        for (std::size_t i = 0; i < reqs.size(); ++i) {
            EXPECT_EQ(res[i].candidate_id, reqs[i].candidate_id);
            EXPECT_EQ(res[i].logit_1, expected_logit(reqs[i]));
        }
    }
}

TEST(ProcessEndpoint, LargeBatchBijective) {
    std::vector<ScoreRequest> reqs;
    for (int i = 0; i < 2000; ++i)
        reqs.push_back({"q" + std::to_string(i % 7), "P" + std::to_string(i) + "#1", std::string(static_cast<std::size_t>(i % 300), 'x'),
                        "claim text " + std::to_string(i)});
    ExternalScorer scorer(fake("reverse"));
    const auto res = scorer.score(reqs);
    ASSERT_EQ(res.size(), reqs.size());
    for (std::size_t i = 0; i < reqs.size(); ++i) {
        ASSERT_EQ(res[i].query_id, reqs[i].query_id);
        ASSERT_EQ(res[i].candidate_id, reqs[i].candidate_id);
        ASSERT_EQ(res[i].logit_1, expected_logit(reqs[i]));
    }
}

TEST(ProcessEndpoint, FailureModes) {
    const auto reqs = three_requests();
    const std::vector<std::pair<std::string, ErrorCode>> cases = {
        {"drop-last", ErrorCode::MissingResponse},   {"unknown-key", ErrorCode::ProtocolError},
        {"garbage", ErrorCode::ProtocolError},       {"error", ErrorCode::ProtocolError},
        {"nan-like", ErrorCode::NonFiniteLogit},     {"close-early", ErrorCode::MissingResponse},
    };
    for (const auto& [mode, code] : cases) {
        ExternalScorer scorer(fake(mode));
        try {
            scorer.score(reqs);
            FAIL() << mode;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), code) << mode << ": " << e.what();
        }
    }
}

TEST(ProcessEndpoint, EarlyCloseWithLargeBatchDoesNotHang) {
    std::vector<ScoreRequest> reqs;
    for (int i = 0; i < 5000; ++i) reqs.push_back({"q", std::to_string(i), std::string(200, 'a'), "b"});
    ExternalScorer scorer(fake("close-early"));
    try {
        scorer.score(reqs);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingResponse);
    }
}

TEST(ProcessEndpoint, RepeatedRequestsGiveIdenticalLogits) {
    const auto reqs = three_requests();
    ExternalScorer scorer(fake("ordered"));
    const auto a = scorer.score(reqs);
    const auto b = scorer.score(reqs);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].logit_1, b[i].logit_1);
}

}  // namespace
}  // namespace ftopipe
