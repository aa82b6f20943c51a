// sbscatter: command-line driver for the resonance and scattering studies

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sbscatter/experiment.hpp"
#include "sbscatter/snapshot.hpp"
#include "sbscatter/studies.hpp"

namespace fs = std::filesystem;
using namespace sbscatter;

namespace {

// Writes summary.json and the CSV tables under out/<study>/.
void write_result(const StudyResult& r, const ExperimentConfig& cfg, const fs::path& out) {
    const fs::path dir = out / r.name;
    for (const auto& [name, table] : r.tables) write_file_atomic(dir / name, table.str());
    write_file_atomic(dir / "summary.json", dump_json(result_json(r, cfg)));
}

void print_result(const StudyResult& r) {
    if (!r.complete) std::cout << "[" << r.name << "] INCOMPLETE: " << r.error << "\n";
    for (const auto& c : r.checks) {
        const char* tag = c.informational ? "INFO" : (c.pass ? "PASS" : "FAIL");
        std::cout << "[" << r.name << "] " << tag;
        if (c.criterion > 0) std::cout << " (" << c.criterion << ")";
        std::cout << " " << c.name << ": " << format_double(c.value) << " " << c.relation << " "
                  << format_double(c.threshold) << "\n";
    }
    for (const auto& w : r.warnings) std::cout << "[" << r.name << "] warning: " << w << "\n";
}

json acceptance_json(const std::vector<StudyResult>& results) {
    json criteria = json::object();
    for (int k = 1; k <= 10; ++k) {
        json entry{{"pass", true}, {"checks", json::array()}};
        bool seen = false;
        for (const auto& r : results)
            for (const auto& c : r.checks)
                if (c.criterion == k && !c.informational) {
                    seen = true;
                    entry["checks"].push_back(c.name);
                    if (!c.pass) entry["pass"] = false;
                }
        if (!seen) entry["pass"] = false;
        criteria[std::to_string(k)] = entry;
    }
    json studies = json::object();
    for (const auto& r : results) studies[r.name] = {{"complete", r.complete}, {"passed", r.passed()}};
    return json{{"criteria", criteria}, {"studies", studies}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resonances and photon scattering in the spin-boson model"};
    app.require_subcommand(1);
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;

    std::vector<std::string> names = study_names();
    names.push_back("all");
    for (const auto& name : names) {
        auto* sub = app.add_subcommand(name, name == "all" ? "Run every study" : "Run the " + name + " study");
        sub->add_option("--config", config_path, "TOML configuration file (defaults when omitted)");
        sub->add_option("--set", overrides, "Override a configuration key, e.g. --set g=0.05")->take_all();
        sub->add_option("--out", out_dir, "Output directory")->required();
    }
    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    ExperimentConfig cfg;
    try {
        if (!config_path.empty()) cfg = parse_config_file(config_path);
        apply_overrides(cfg, overrides);
    } catch (const Error& e) {
        std::cerr << "sbscatter: " << e.what() << "\n";
        return 2;
    }

    std::unique_ptr<MatrixCache::Installed> guard;
    std::shared_ptr<MatrixCache> cache;
    try {
        fs::create_directories(out_dir);
        if (cfg.output.cache) {
            cache = std::make_shared<MatrixCache>(fs::path(out_dir) / "cache");
            guard = std::make_unique<MatrixCache::Installed>(cache);
        }
        worker_count();
    } catch (const std::exception& e) {
        std::cerr << "sbscatter: " << e.what() << "\n";
        return 2;
    }

    const std::vector<std::string> run = command == "all" ? study_names() : std::vector<std::string>{command};
    std::vector<StudyResult> results;
    bool ok = true;
    for (const auto& name : run) {
        StudyResult r = run_study(name, cfg);
        try {
            write_result(r, cfg, out_dir);
        } catch (const std::exception& e) {
            std::cerr << "sbscatter: " << name << ": " << e.what() << "\n";
            r.complete = false;
        }
        print_result(r);
        ok = ok && r.passed();
        results.push_back(std::move(r));
    }
    if (command == "all") {
        try {
            write_file_atomic(fs::path(out_dir) / "acceptance.json", dump_json(acceptance_json(results)));
        } catch (const std::exception& e) {
            std::cerr << "sbscatter: " << e.what() << "\n";
            ok = false;
        }
    }
    if (cache) std::cout << "cache: " << cache->hits() << " hits, " << cache->misses() << " misses\n";
    return ok ? 0 : 1;
}
