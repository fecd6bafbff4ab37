#include "factoryguard/backend.hpp"

#include <regex>

#include <httplib.h>

namespace fg::orchestra {

using nlohmann::json;

namespace {

json step_json(const ReasoningStep& s) {
    json j = {{"thought", s.thought},
              {"tool", s.action.tool},
              {"args", s.action.args},
              {"ok", s.observation.ok},
              {"observation", s.observation.data},
              {"sim_time", s.sim_time},
              {"latency", s.latency}};
    if (!s.observation.ok) j["error"] = s.observation.error;
    return j;
}

}  // namespace

HttpPolicy::HttpPolicy(std::string endpoint, double timeout_s) : timeout_s_(timeout_s) {
    static const std::regex re(R"(^http://([^/:]+)(?::(\d+))?(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(endpoint, m, re)) throw InputError("endpoint must look like http://host[:port]/path: " + endpoint);
    host_ = m[1];
    port_ = m[2].matched ? std::stoi(m[2]) : 80;
    path_ = m[3].matched ? std::string(m[3]) : "/";
    if (timeout_s_ <= 0.0) throw DomainError("timeout must be positive");
}

json HttpPolicy::make_request(const PolicyContext& ctx) {
    json req = {{"schema", kWireSchema},
                {"now", ctx.now},
                {"snapshot", ctx.snapshot},
                {"registry", ctx.registry.to_json()},
                {"step_index", ctx.trace.steps.size()},
                {"last_step", nullptr}};
    if (!ctx.trace.steps.empty()) req["last_step"] = step_json(ctx.trace.steps.back());
    return req;
}

Decision HttpPolicy::parse_response(const json& r, bool& hazard_detected) {
    if (!r.is_object()) throw SchemaError("response", "expected an object");
    const std::string thought = r.value("thought", "");
    if (r.contains("hazard_detected")) {
        if (!r["hazard_detected"].is_boolean()) throw SchemaError("hazard_detected", "expected a boolean");
        hazard_detected = hazard_detected || r["hazard_detected"].get<bool>();
    }
    if (r.value("done", false)) return Decision::done(thought);
    if (!r.contains("tool") || !r["tool"].is_string()) throw SchemaError("tool", "expected a string");
    json args = r.value("args", json::object());
    if (!args.is_object()) throw SchemaError("args", "expected an object");
    return Decision::act(thought, r["tool"].get<std::string>(), std::move(args));
}

Decision HttpPolicy::next(const PolicyContext& ctx) {
    httplib::Client cli(host_, port_);
    const auto secs = static_cast<time_t>(timeout_s_);
    const auto usecs = static_cast<time_t>((timeout_s_ - static_cast<double>(secs)) * 1e6);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    auto res = cli.Post(path_, make_request(ctx).dump(), "application/json");
    auto fail = [&](const std::string& why) {
        Decision d = Decision::done("backend failure: " + why);
        d.notes.push_back({ctx.now, "backend_error", {{"error", why}}});
        return d;
    };
    if (!res) return fail(httplib::to_string(res.error()));
    if (res->status != 200) return fail("HTTP " + std::to_string(res->status));
    try {
        return parse_response(json::parse(res->body), hazard_detected_);
    } catch (const json::exception& e) {
        return fail(e.what());
    } catch (const SchemaError& e) {
        return fail(e.what());
    }
}

std::unique_ptr<Policy> make_policy(const std::string& backend, const PolicyConfig& cfg, const std::string& endpoint) {
    if (backend == "react") return std::make_unique<ScenarioPolicy>(cfg);
    if (backend == "rule_based") return std::make_unique<RuleBasedPolicy>(cfg);
    if (backend == "http") {
        if (endpoint.empty()) throw InputError("the http backend needs an endpoint");
        return std::make_unique<HttpPolicy>(endpoint);
    }
    throw InputError("unknown backend: " + backend);
}

}  // namespace fg::orchestra
