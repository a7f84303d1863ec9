#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace corpus_router {

/// Byte-stream client for the external service protocols. Every request is
/// one UTF-8 JSON object; every reply is one JSON object. Two framings
/// exist behind the same interface:
///   exec:<path>  - spawn <path> and exchange newline-delimited JSON over
///                  its stdin/stdout (the process stays alive across calls)
///   http:<url>   - POST one JSON object per request body
class ServiceClient {
public:
    virtual ~ServiceClient() = default;

    /// Sends one serialized JSON object, returns the raw reply line/body.
    /// Throws std::runtime_error on transport failure.
    virtual std::string request_line(const std::string& json_line) = 0;
};

/// Parses an endpoint spec ("exec:/path/to/bin --flag" or
/// "http://host:port/path") and opens the matching transport.
std::unique_ptr<ServiceClient> open_service(const std::string& endpoint);

/// Protocol wrappers ------------------------------------------------------

/// {"op":"embed","text":...,"dim":...} -> {"vec":[...]}
std::vector<float> embed_remote(ServiceClient& client, const std::string& text, int dim);

/// {"op":"generate","query":...,"contexts":[...]} -> {"answer":...}
std::string generate_remote(ServiceClient& client, const std::string& query,
                            const nlohmann::json& contexts);

}  // namespace corpus_router
