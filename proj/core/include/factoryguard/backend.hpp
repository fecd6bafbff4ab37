#pragma once

#include <memory>
#include <string>

#include "factoryguard/policies.hpp"

namespace fg::orchestra {

// Wire schema id sent with every request to an external reasoning backend.
inline constexpr const char* kWireSchema = "factoryguard.reasoning/1";

// Delegates each decision to an HTTP endpoint (see docs/wire_schema.md).
// Transport or schema failures end the episode with a protocol note rather
// than throwing, so a flaky backend degrades to an incomplete run.
class HttpPolicy : public Policy {
public:
    // `endpoint` is "http://host:port/path".
    explicit HttpPolicy(std::string endpoint, double timeout_s = 10.0);

    [[nodiscard]] std::string name() const override { return "http"; }
    Decision next(const PolicyContext& ctx) override;
    [[nodiscard]] bool hazard_detected() const override { return hazard_detected_; }

    [[nodiscard]] static nlohmann::json make_request(const PolicyContext& ctx);
    // SchemaError on malformed responses.
    static Decision parse_response(const nlohmann::json& response, bool& hazard_detected);

private:
    std::string host_;
    int port_ = 80;
    std::string path_;
    double timeout_s_;
    bool hazard_detected_ = false;
};

// "react" (default), "rule_based", or "http" (requires `endpoint`).
std::unique_ptr<Policy> make_policy(const std::string& backend, const PolicyConfig& cfg,
                                    const std::string& endpoint = {});

}  // namespace fg::orchestra
