#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "posmt/report.hpp"
#include "posmt/semcat.hpp"

namespace posmt::cli {

struct GlobalOptions {
    int n_max = 3;
    std::size_t max_lattice = 4096;
    std::uint64_t seed = 0;
    bool structured = false;
    int lm_gen_bound = -1;  // -1: derived from n_max
    // test-harness hook: flips the direct positive-closedness verdict so the
    // internal-disagreement exit path (code 4) has a negative control
    bool inject_lm_fault = false;
};

struct RunResult {
    Report report;
    int exit_code = kOk;
};

// analyze: axiom check per model, saturation, per-context lattice stats,
// type spaces, per-model LM + positive closedness (both characterizations,
// agreement asserted), semantic-completeness analysis, realization tables.
RunResult run_analyze(const std::string& theory_text,
                      const std::vector<std::string>& model_texts, GlobalOptions opt);

// posetal-import: load K as a sentence-level semantic category (one sort
// per element, one one-point-or-empty model per prime filter), take the
// member induced by p, compute LM at generator bound 0 and check
// LM ~ K / p against the quotient computed independently.
RunResult run_posetal_import(const std::string& lattice_text, const std::string& filter_text,
                             GlobalOptions opt);

// tv: Tarski-Vaught check for a sort-subset family, extension + verification
// on success, and the positively-closed-subfunctor condition.
RunResult run_tv(const std::string& theory_text, const std::string& model_text,
                 const std::string& family_text, GlobalOptions opt);

// redprod: filter closure/validation, reduced product construction with the
// principal collapse, seeded Los containment samples, diagonal elementarity
// when the member list is constant and the filter is ultra.
RunResult run_redprod(const std::string& theory_text,
                      const std::vector<std::string>& model_texts,
                      const std::vector<std::string>& filter_generators, GlobalOptions opt);

// dlat spec | krull | quotient
RunResult run_dlat(const std::string& subcommand, const std::string& lattice_text,
                   const std::string& filter_text, GlobalOptions opt);

}  // namespace posmt::cli
