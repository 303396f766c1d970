#include "posmt/report.hpp"

#include "json.hpp"

namespace posmt::cli {

Report::Section& Report::section(const std::string& name) {
    for (auto& s : sections)
        if (s.name == name) return s;
    sections.push_back({name, {}});
    return sections.back();
}

void Report::kv(Section& s, const std::string& k, const std::string& v) {
    s.rows.emplace_back(k, v);
}

std::string Report::to_text() const {
    std::string out = "posmt " + command + "\n";
    for (auto& [k, v] : config) out += "config " + k + " = " + v + "\n";
    for (auto& s : sections) {
        out += "[" + s.name + "]\n";
        for (auto& [k, v] : s.rows) out += "  " + k + ": " + v + "\n";
    }
    for (auto& v : verdicts) out += "verdict: " + v + "\n";
    for (auto& a : audit) out += "audit: " + a + "\n";
    return out;
}

std::string Report::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (auto& [k, v] : config) cfg[k] = v;
    j["config"] = cfg;
    nlohmann::ordered_json secs = nlohmann::ordered_json::array();
    for (auto& s : sections) {
        nlohmann::ordered_json sec;
        sec["name"] = s.name;
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (auto& [k, v] : s.rows) rows.push_back({{"key", k}, {"value", v}});
        sec["rows"] = rows;
        secs.push_back(sec);
    }
    j["sections"] = secs;
    j["verdicts"] = verdicts;
    j["audit"] = audit;
    return j.dump(2) + "\n";
}

}  // namespace posmt::cli
