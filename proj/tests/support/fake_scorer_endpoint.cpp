// Copyright (C) 2026 The ftopipe Authors
// SPDX-License-Identifier: Apache-2.0

// Scripted stand-in for the neural scorer. Speaks the JSON-lines protocol on
// stdin/stdout. logit_0 = 0 and logit_1 = size(text_a) - size(text_b) + 0.25,
// so tests can compute every expected logit.
//
// Modes (argv[1]): ordered | reverse | drop-last | unknown-key | garbage |
// error | nan-like | close-early

#include <iostream>
#include <string>
#include <vector>

#include "json.hpp"

int main(int argc, char** argv) {
    const std::string mode = argc > 1 ? argv[1] : "ordered";
    std::vector<std::string> responses;
    std::string line;
    std::size_t seen = 0;
    while (std::getline(std::cin, line)) {
        ++seen;
        if (mode == "close-early" && seen > 1) break;
        const auto req = nlohmann::json::parse(line, nullptr, false);
        nlohmann::ordered_json resp;
        resp["qid"] = req.value("qid", "");
        resp["cid"] = req.value("cid", "");
        const auto a = req.value("text_a", std::string());
        const auto b = req.value("text_b", std::string());
        resp["logit_0"] = 0.0;
        resp["logit_1"] = static_cast<double>(a.size()) - static_cast<double>(b.size()) + 0.25;
        responses.push_back(resp.dump());
    }
    if (mode == "close-early") {
        // Answer only the first request, then exit without draining stdin.
        if (!responses.empty()) std::cout << responses.front() << "\n";
        return 0;
    }
    if (mode == "reverse") {
        for (auto it = responses.rbegin(); it != responses.rend(); ++it) std::cout << *it << "\n";
        return 0;
    }
    if (mode == "drop-last" && !responses.empty()) responses.pop_back();
    if (mode == "unknown-key" && !responses.empty()) {
        responses.back() = R"({"qid":"nobody","cid":"nothing","logit_0":0,"logit_1":1})";
    }
    if (mode == "garbage" && !responses.empty()) responses.back() = "not json";
    if (mode == "error" && !responses.empty()) responses.back() = R"({"error":"model exploded"})";
    if (mode == "nan-like" && !responses.empty()) {
        auto r = nlohmann::json::parse(responses.back());
        responses.back() = R"({"qid":)" + r["qid"].dump() + R"(,"cid":)" + r["cid"].dump() +
                           R"(,"logit_0":0,"logit_1":1e999})";
    }
    for (const auto& r : responses) std::cout << r << "\n";
    return 0;
}
