#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "posmt/cli_runners.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "cannot open " << path << "\n";
        std::exit(posmt::cli::kParseError);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int finish(const posmt::cli::RunResult& res, bool structured) {
    std::cout << (structured ? res.report.to_json() : res.report.to_text());
    return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite positive-model-theory workbench"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    posmt::cli::GlobalOptions opt;
    if (const char* env = std::getenv("POSMT_NMAX")) opt.n_max = std::atoi(env);
    app.add_option("--nmax", opt.n_max, "context length bound (default 3)");
    app.add_option("--seed", opt.seed, "seed for randomized samples");
    app.add_option("--max-lattice", opt.max_lattice, "per-context def-set cutoff");
    app.add_flag("--structured", opt.structured, "emit the machine-readable JSON report");
    app.add_option("--lm-gen-bound", opt.lm_gen_bound,
                   "LM generator context bound (default derived from nmax)");

    std::string theory_file, model_file, family_file, lattice_file, filter_spec, dlat_sub;
    std::vector<std::string> model_files, filter_gens;

    auto* analyze = app.add_subcommand("analyze", "axiom check, saturation, full analysis");
    analyze->add_option("theory", theory_file, "theory file (.thy)")->required();
    analyze->add_option("models", model_files, "model files (.mdl)")->required();

    auto* posetal = app.add_subcommand("posetal-import",
                                       "import a lattice as a sentence-level category");
    posetal->add_option("lattice", lattice_file, "lattice file")->required();
    posetal->add_option("filter", filter_spec, "prime filter, e.g. '1,3'")->required();

    auto* tv = app.add_subcommand("tv", "Tarski-Vaught check for a sort-subset family");
    tv->add_option("theory", theory_file)->required();
    tv->add_option("model", model_file)->required();
    tv->add_option("family", family_file, "per-sort subsets in model syntax")->required();

    auto* rp = app.add_subcommand("redprod", "reduced product of models over a filter");
    rp->add_option("theory", theory_file)->required();
    rp->add_option("models", model_files)->required();
    rp->add_option("--gen", filter_gens, "filter generator, e.g. --gen 0,1")->required();

    auto* dl = app.add_subcommand("dlat", "lattice utilities: spec | krull | quotient");
    dl->add_option("sub", dlat_sub, "spec, krull or quotient")->required();
    dl->add_option("lattice", lattice_file)->required();
    dl->add_option("filter", filter_spec, "prime filter (quotient only)");

    CLI11_PARSE(app, argc, argv);

    if (*analyze) {
        std::vector<std::string> texts;
        for (auto& f : model_files) texts.push_back(slurp(f));
        return finish(posmt::cli::run_analyze(slurp(theory_file), texts, opt), opt.structured);
    }
    if (*posetal)
        return finish(posmt::cli::run_posetal_import(slurp(lattice_file), filter_spec, opt),
                      opt.structured);
    if (*tv)
        return finish(posmt::cli::run_tv(slurp(theory_file), slurp(model_file),
                                         slurp(family_file), opt),
                      opt.structured);
    if (*rp) {
        std::vector<std::string> texts;
        for (auto& f : model_files) texts.push_back(slurp(f));
        return finish(posmt::cli::run_redprod(slurp(theory_file), texts, filter_gens, opt),
                      opt.structured);
    }
    if (*dl)
        return finish(posmt::cli::run_dlat(dlat_sub, slurp(lattice_file), filter_spec, opt),
                      opt.structured);
    return 0;
}
