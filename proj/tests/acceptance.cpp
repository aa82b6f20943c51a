// Acceptance run: every study on the default configuration, one PASS/FAIL
// line per criterion followed by the checks behind it.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "sbscatter/studies.hpp"

using namespace sbscatter;

namespace {

const std::map<int, std::string> kTitles{
    {1, "golden-rule width of the resonance"},
    {2, "independence of lambda1 from theta"},
    {3, "principal term against the spectral-sum oracle"},
    {4, "Lorentzian lineshape"},
    {5, "order g^2 lower bound on T_P"},
    {6, "contour representation of the propagator"},
    {7, "multiscale convergence rates"},
    {8, "identities for the asymptotic field operators"},
    {9, "relative bounds for a(h), a(h)* and V"},
    {10, "decay of the overlap <h_s, f>"},
};

}  // namespace

int main() {
    const ExperimentConfig cfg;
    std::vector<StudyResult> results;
    for (const auto& name : study_names()) {
        results.push_back(run_study(name, cfg));
        const auto& r = results.back();
        std::cout << "study " << name << (r.complete ? " complete" : " INCOMPLETE: " + r.error) << std::endl;
    }

    bool all_pass = true;
    for (const auto& [k, title] : kTitles) {
        std::vector<const Check*> checks;
        bool incomplete = false;
        for (const auto& r : results) {
            bool owns = false;
            for (const auto& c : r.checks)
                if (c.criterion == k) {
                    checks.push_back(&c);
                    owns = true;
                }
            // A study that threw has no checks; attribute it through its name.
            if (!r.complete && !owns) {
                static const std::map<std::string, std::vector<int>> owners{
                    {"resonance", {1, 2}}, {"scatter", {3, 5}},   {"lineshape", {4}},  {"laplace", {6}},
                    {"multiscale", {7}},   {"asymptotics", {8, 10}}, {"estimates", {9}}};
                for (int owned : owners.at(r.name))
                    if (owned == k) incomplete = true;
            }
        }
        bool pass = !incomplete && !checks.empty();
        for (const Check* c : checks)
            if (!c->informational && !c->pass) pass = false;
        all_pass = all_pass && pass;
        std::printf("criterion %2d %s: %s\n", k, pass ? "PASS" : "FAIL", title.c_str());
        if (incomplete) std::printf("    study did not complete\n");
        for (const Check* c : checks) {
            const char* tag = c->informational ? "info" : (c->pass ? "pass" : "FAIL");
            std::printf("    %-4s %s: %s %s %s\n", tag, c->name.c_str(), format_double(c->value).c_str(),
                        c->relation.c_str(), format_double(c->threshold).c_str());
        }
    }
    for (const auto& r : results)
        for (const auto& c : r.checks)
            if (c.criterion == 0)
                std::printf("supporting %s [%s] %s: %s %s %s\n", c.informational ? "info" : (c.pass ? "pass" : "FAIL"),
                            r.name.c_str(), c.name.c_str(), format_double(c.value).c_str(), c.relation.c_str(),
                            format_double(c.threshold).c_str());
    for (const auto& r : results)
        for (const auto& w : r.warnings) std::printf("warning [%s] %s\n", r.name.c_str(), w.c_str());
    std::printf("acceptance: %s\n", all_pass ? "all criteria pass" : "some criteria fail");
    return all_pass ? 0 : 1;
}
