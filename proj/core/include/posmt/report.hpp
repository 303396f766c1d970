#pragma once

#include <string>
#include <utility>
#include <vector>

namespace posmt::cli {

// Line-oriented report with a machine-readable JSON variant. Reports are
// deterministic for fixed (inputs, flags, seed): no timestamps, no pointer
// or hash ordering anywhere.
struct Report {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;
    // sections in emission order; each holds key/value findings
    struct Section {
        std::string name;
        std::vector<std::pair<std::string, std::string>> rows;
    };
    std::vector<Section> sections;
    std::vector<std::string> verdicts;
    std::vector<std::string> audit;  // bound-sensitivity flags etc.

    Section& section(const std::string& name);
    void kv(Section& s, const std::string& k, const std::string& v);

    std::string to_text() const;
    std::string to_json() const;  // stable field order
};

enum ExitCode : int {
    kOk = 0,
    kParseError = 2,
    kAxiomFailure = 3,
    kInternalDisagreement = 4,
};

}  // namespace posmt::cli
