//
// Copyright 2026 The detectbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Mask-fill provider backed by the fill-mask HTTP service.
//
//   POST /fill    {"text": "... <mask> ...", "top_k": 50}
//              -> {"candidates": [[{"word": "...", "score": 0.3}, ...], ...]}
//   GET  /health  -> {"status": "ok", "model_id": "...", "context_window": N}

#pragma once

#include <string>
#include <vector>

#include "detectbench/error.hpp"
#include "detectbench/humanify.hpp"
#include "httplib.h"
#include "json.hpp"

namespace detectbench {

struct ServiceHealth {
  std::string status;
  std::string model_id;
  long long context_window = 0;
};

class HttpMaskFillProvider : public MaskFillProvider {
 public:
  // `endpoint` is scheme://host:port, e.g. "http://127.0.0.1:8080".
  explicit HttpMaskFillProvider(std::string endpoint,
                                int connect_timeout_s = 5,
                                int read_timeout_s = 120)
      : endpoint_(std::move(endpoint)),
        connect_timeout_s_(connect_timeout_s),
        read_timeout_s_(read_timeout_s) {
    while (!endpoint_.empty() && endpoint_.back() == '/') endpoint_.pop_back();
  }

  const std::string& endpoint() const { return endpoint_; }

  ServiceHealth Health() const {
    httplib::Client client = MakeClient();
    auto res = client.Get("/health");
    if (!res) {
      throw Error(ErrorCode::kProviderFailure,
                  "GET " + endpoint_ + "/health: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw Error(ErrorCode::kProviderFailure,
                  "GET /health returned " + std::to_string(res->status));
    }
    try {
      const auto body = nlohmann::json::parse(res->body);
      return {body.at("status").get<std::string>(),
              body.value("model_id", std::string()),
              body.value("context_window", 0LL)};
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kProviderFailure,
                  std::string("malformed /health body: ") + e.what());
    }
  }

  std::vector<std::vector<Candidate>> Fill(const MaskedText& masked,
                                           std::size_t top_k) const override {
    nlohmann::json request = {{"text", masked.text}, {"top_k", top_k}};
    httplib::Client client = MakeClient();
    auto res = client.Post("/fill", request.dump(), "application/json");
    if (!res) {
      throw Error(ErrorCode::kProviderFailure,
                  "POST " + endpoint_ + "/fill: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw Error(ErrorCode::kProviderFailure,
                  "POST /fill returned " + std::to_string(res->status) + ": " +
                      res->body);
    }
    std::vector<std::vector<Candidate>> out;
    try {
      const auto body = nlohmann::json::parse(res->body);
      for (const auto& list : body.at("candidates")) {
        std::vector<Candidate> cands;
        for (const auto& c : list) {
          cands.push_back({c.at("word").get<std::string>(),
                           c.value("score", 0.0)});
        }
        out.push_back(std::move(cands));
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kProviderFailure,
                  std::string("malformed /fill body: ") + e.what());
    }
    return out;
  }

  std::string Fingerprint() const override {
    std::string model = "unreachable";
    try {
      model = Health().model_id;
    } catch (const Error&) {
    }
    return "http:" + endpoint_ + ":" + model;
  }

 private:
  httplib::Client MakeClient() const {
    httplib::Client client(endpoint_);
    client.set_connection_timeout(connect_timeout_s_, 0);
    client.set_read_timeout(read_timeout_s_, 0);
    return client;
  }

  std::string endpoint_;
  int connect_timeout_s_;
  int read_timeout_s_;
};

}  // namespace detectbench
