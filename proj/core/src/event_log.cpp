#include "factoryguard/event_log.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "factoryguard/errors.hpp"

namespace fg {

using nlohmann::json;

void EventLog::append(double t, std::string layer, std::string kind, json payload) {
    records_.push_back({t, std::move(layer), std::move(kind), std::move(payload)});
}

std::string to_line(const LogRecord& r) {
    const json j = {{"t", r.t}, {"layer", r.layer}, {"kind", r.kind}, {"payload", r.payload}};
    return j.dump();
}

// Time order; records with equal t keep their append order. Tool calls are
// appended when they complete but stamped with their start time.
std::string EventLog::to_jsonl() const {
    std::vector<const LogRecord*> order;
    order.reserve(records_.size());
    for (const auto& r : records_) order.push_back(&r);
    std::stable_sort(order.begin(), order.end(), [](const LogRecord* a, const LogRecord* b) { return a->t < b->t; });
    std::string out;
    for (const auto* r : order) {
        out += to_line(*r);
        out += '\n';
    }
    return out;
}

void EventLog::write(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write event log '" + path.string() + "'");
    f << to_jsonl();
}

std::vector<LogRecord> parse_jsonl(const std::string& text) {
    std::vector<LogRecord> out;
    std::istringstream in(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(n, 0, e.what());
        }
        out.push_back({j.at("t").get<double>(), j.at("layer").get<std::string>(), j.at("kind").get<std::string>(),
                       j.value("payload", json::object())});
    }
    return out;
}

}  // namespace fg
