#include "crc/report.hpp"

#include "crc/expr.hpp"

#include <sstream>

namespace crc {

using nlohmann::json;

std::string to_string(Status s)
{
    switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::inconclusive: return "inconclusive";
    }
    return "?";
}

Status status_from_string(const std::string& s)
{
    if (s == "pass") return Status::pass;
    if (s == "fail") return Status::fail;
    if (s == "inconclusive") return Status::inconclusive;
    throw Error("unknown status '" + s + "'");
}

Status combine(Status a, Status b)
{
    if (a == Status::fail || b == Status::fail) return Status::fail;
    if (a == Status::inconclusive || b == Status::inconclusive) return Status::inconclusive;
    return Status::pass;
}

Status Report::overall() const
{
    Status s = Status::pass;
    for (auto& c : checks) s = combine(s, c.status);
    return s;
}

Check& Report::add(const std::string& name, Status status, json details)
{
    checks.push_back({name, status, std::move(details), 0});
    return checks.back();
}

void Report::merge(const Report& r, const std::string& prefix)
{
    for (auto c : r.checks) {
        c.name = prefix + c.name;
        checks.push_back(std::move(c));
    }
}

json Report::to_json(bool timing) const
{
    json j;
    j["schema"] = kSchemaVersion;
    j["tool_version"] = tool_version;
    j["command"] = command;
    j["config"] = config;
    j["status"] = to_string(overall());
    json arr = json::array();
    for (auto& c : checks) {
        json e;
        e["name"] = c.name;
        e["status"] = to_string(c.status);
        e["details"] = c.details;
        if (timing) e["seconds"] = c.seconds;
        arr.push_back(std::move(e));
    }
    j["checks"] = std::move(arr);
    if (!result.is_null()) j["result"] = result;
    return j;
}

Report Report::from_json(const json& j)
{
    if (j.contains("schema") && j["schema"] != kSchemaVersion)
        throw Error("unsupported report schema " + j["schema"].dump());
    Report r;
    r.tool_version = j.at("tool_version").get<std::string>();
    r.command = j.value("command", "");
    r.config = j.value("config", json::object());
    if (j.contains("result")) r.result = j["result"];
    for (auto& e : j.at("checks")) {
        Check c;
        c.name = e.at("name").get<std::string>();
        c.status = status_from_string(e.at("status").get<std::string>());
        c.details = e.value("details", json::object());
        c.seconds = e.value("seconds", 0.0);
        r.checks.push_back(std::move(c));
    }
    return r;
}

namespace {

void text_details(std::ostream& os, const json& d, const std::string& indent)
{
    if (!d.is_object()) {
        os << indent << d.dump() << "\n";
        return;
    }
    for (auto& [k, v] : d.items()) {
        if (v.is_string())
            os << indent << k << ": " << v.get<std::string>() << "\n";
        else if (v.is_object() || (v.is_array() && !v.empty() && v.front().is_object())) {
            os << indent << k << ":\n";
            if (v.is_object())
                text_details(os, v, indent + "  ");
            else
                for (auto& x : v) text_details(os, x, indent + "  ");
        } else
            os << indent << k << ": " << v.dump() << "\n";
    }
}

}  // namespace

std::string Report::to_text() const
{
    std::ostringstream os;
    os << "crc " << tool_version;
    if (!command.empty()) os << " -- " << command;
    os << "\n";
    for (auto& c : checks) {
        std::string tag = to_string(c.status);
        for (auto& ch : tag) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        os << "[" << tag << "] " << c.name << "\n";
        text_details(os, c.details, "    ");
    }
    if (!result.is_null()) {
        os << "result:\n";
        text_details(os, result, "    ");
    }
    os << "overall: " << to_string(overall()) << "\n";
    return os.str();
}

}  // namespace crc
