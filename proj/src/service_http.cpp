// Copyright 2026 The AmbigNLG Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <httplib.h>

#include "ambig/error.hpp"
#include "ambig/service.hpp"

namespace ambig::service {
namespace {

using nlohmann::json;

std::string wire_code(ErrorCode code) {
  if (code == ErrorCode::kInvalidCategory) return "BadCategory";
  return std::string(error_code_name(code));
}

void send_json(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, "application/json");
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
  send_json(res, http_status(code), json{{"code", wire_code(code)}, {"message", message}}.dump());
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json j;
  try {
    j = json::parse(req.body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("request body is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "request body must be an object");
  return j;
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) {
    throw Error(ErrorCode::kInvalidArgument, std::string("missing field '") + key + "'");
  }
  try {
    return j[key].get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kInvalidArgument, std::string("field '") + key + "' has the wrong type");
  }
}

json instruction_json(const AdditionalInstruction& ai) {
  return {{"category", category_name(ai.category())},
          {"text", ai.text()},
          {"fillers", ai.fillers()},
          {"source", source_name(ai.source())}};
}

// Wraps a handler with the shared error mapping.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, e.code(), e.what());
    } catch (const std::exception& e) {
      send_json(res, 500, json{{"code", "Internal"}, {"message", e.what()}}.dump());
    }
  };
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownSession:
      return 404;
    case ErrorCode::kProviderUnavailable:
    case ErrorCode::kBudgetExceeded:
    case ErrorCode::kEmbedUnsupported:
      return 502;
    case ErrorCode::kIoError:
    case ErrorCode::kOk:
      return 500;
    default:
      return 400;
  }
}

void register_routes(httplib::Server& server, ClarificationService& service) {
  server.Get("/healthz", guarded([](const httplib::Request&, httplib::Response& res) {
               send_json(res, 200, R"({"status":"ok"})");
             }));

  server.Post("/sessions", guarded([&service](const httplib::Request& req,
                                               httplib::Response& res) {
                const json body = parse_body(req);
                const auto created = service.create_session(
                    field<std::string>(body, "instruction"), body.value("input", std::string()));
                json cats = json::array();
                for (Category c : created.identified) cats.push_back(category_name(c));
                send_json(res, 201,
                          json{{"session_id", created.session_id}, {"identified", cats}}.dump());
              }));

  server.Get(R"(/sessions/([A-Za-z0-9_-]+))",
             guarded([&service](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, to_json(service.get_state(req.matches[1])).dump());
             }));

  server.Post(R"(/sessions/([A-Za-z0-9_-]+)/suggest)",
              guarded([&service](const httplib::Request& req, httplib::Response& res) {
                const std::string id = req.matches[1];
                const json body = parse_body(req);
                const Category c = category_from_string(field<std::string>(body, "category"));
                std::optional<int> n;
                if (body.contains("n")) n = field<int>(body, "n");
                const auto list = service.suggest(id, c, n);
                json items = json::array();
                for (std::size_t i = 0; i < list.size(); ++i) {
                  json item = instruction_json(list[i]);
                  item["index"] = i;
                  items.push_back(std::move(item));
                }
                send_json(res, 200,
                          json{{"session_id", id},
                               {"category", category_name(c)},
                               {"candidates", items}}
                              .dump());
              }));

  server.Post(R"(/sessions/([A-Za-z0-9_-]+)/select)",
              guarded([&service](const httplib::Request& req, httplib::Response& res) {
                const std::string id = req.matches[1];
                const json body = parse_body(req);
                const Category c = category_from_string(field<std::string>(body, "category"));
                Choice choice;
                if (body.contains("index")) {
                  const long idx = field<long>(body, "index");
                  if (idx < 0) throw Error(ErrorCode::kIndexOutOfRange, "index must be >= 0");
                  choice = static_cast<std::size_t>(idx);
                } else if (body.contains("custom_text")) {
                  choice = field<std::string>(body, "custom_text");
                } else {
                  throw Error(ErrorCode::kInvalidArgument, "give either 'index' or 'custom_text'");
                }
                const auto refined = service.select(id, c, choice);
                json parts = json::array();
                for (const auto& p : refined.parts) parts.push_back(instruction_json(p));
                send_json(res, 200,
                          json{{"session_id", id},
                               {"refined_instruction", refined.rendered},
                               {"parts", parts}}
                              .dump());
              }));

  server.Post(R"(/sessions/([A-Za-z0-9_-]+)/generate)",
              guarded([&service](const httplib::Request& req, httplib::Response& res) {
                const std::string id = req.matches[1];
                const json body = parse_body(req);
                std::optional<GenerationConfig> config;
                if (!body.empty()) {
                  GenerationConfig g = service.default_generation();
                  if (body.contains("model_id")) g.model_id = field<std::string>(body, "model_id");
                  if (body.contains("temperature")) g.temperature = field<double>(body, "temperature");
                  if (body.contains("num_samples")) g.num_samples = field<int>(body, "num_samples");
                  if (body.contains("max_tokens")) g.max_tokens = field<int>(body, "max_tokens");
                  config = g;
                }
                const auto entry = service.generate(id, config);
                send_json(res, 200,
                          json{{"session_id", id},
                               {"refined_instruction", entry.refined_instruction},
                               {"outputs", entry.outputs}}
                              .dump());
              }));
}

void serve(ClarificationService& service, const std::string& host, int port) {
  httplib::Server server;
  register_routes(server, service);
  if (!server.listen(host, port)) {
    throw Error(ErrorCode::kIoError,
                "cannot listen on " + host + ":" + std::to_string(port));
  }
}

}  // namespace ambig::service
