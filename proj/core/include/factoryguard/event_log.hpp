#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fg {

struct LogRecord {
    double t = 0.0;
    std::string layer;  // world | perception | orchestra | planning | locomotion | harness
    std::string kind;
    nlohmann::json payload = nlohmann::json::object();
};

// Append-only JSON-Lines event log, written in sim-time order. Serialisation is canonical (sorted keys,
// shortest round-trip doubles) so equal runs give byte-identical files.
class EventLog {
public:
    void append(double t, std::string layer, std::string kind, nlohmann::json payload = nlohmann::json::object());
    [[nodiscard]] const std::vector<LogRecord>& records() const { return records_; }
    [[nodiscard]] std::string to_jsonl() const;
    void write(const std::filesystem::path& path) const;

private:
    std::vector<LogRecord> records_;
};

std::string to_line(const LogRecord& r);
std::vector<LogRecord> parse_jsonl(const std::string& text);

}  // namespace fg
