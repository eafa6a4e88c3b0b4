#pragma once

#include <json.hpp>

#include <chrono>
#include <string>
#include <vector>

namespace crc {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kSchemaVersion = "1";

enum class Status { pass, fail, inconclusive };
std::string to_string(Status s);
Status status_from_string(const std::string& s);
// fail dominates inconclusive, which dominates pass
Status combine(Status a, Status b);

struct Check {
    std::string name;
    Status status = Status::pass;
    nlohmann::json details = nlohmann::json::object();
    double seconds = 0;
};

struct Report {
    std::string tool_version = kToolVersion;
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    std::vector<Check> checks;
    nlohmann::json result;  // command-specific payload, omitted when null

    Status overall() const;
    Check& add(const std::string& name, Status status, nlohmann::json details = nlohmann::json::object());
    Check& add(const std::string& name, bool ok, nlohmann::json details = nlohmann::json::object())
    {
        return add(name, ok ? Status::pass : Status::fail, std::move(details));
    }
    // appends the checks of r, prefixing their names
    void merge(const Report& r, const std::string& prefix = "");

    nlohmann::json to_json(bool timing = true) const;
    static Report from_json(const nlohmann::json& j);
    std::string to_text() const;
};

class Stopwatch {
public:
    Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    std::chrono::steady_clock::time_point t0_;
};

}  // namespace crc
