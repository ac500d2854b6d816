// Acceptance gate: one line per criterion, each backed by a preset run with
// its pinned default tolerances. Exit code 0 iff every criterion passes.
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "osgood/harness.hpp"

using namespace osgood;

namespace {

struct Criterion {
    int id;
    std::string preset;
    std::string summary;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "osgood-certificate", "two-sided R-ratio bracket, stable-line rate e^-1 to 1e-6"},
        {2, "seminorm-propagation", "loglog cusp seminorm carried within the 10% radius bracket"},
        {3, "local-structure", "sup|b| <= ||b0|| + [F] lint (1+0.05) over the field/shape/t matrix"},
        {4, "sharpness-lipschitz", "superlinear divergence slope 2 +- 0.2; identity control bounded"},
        {5, "lemma-lp", "iterated-log Lp ratio in [0.1,10], doubling drift < 15% past p=64"},
        {6, "euler-steady", "vortex L2 drift < 1e-3 at N=256; smooth conservation < 1e-6"},
        {7, "euler-perturbed", "Lp remainder growth <= t C_meas Theta(p) (1+0.1)"},
        {8, "euler-two-vortex", "half period within 5% of the reduced point-vortex oracle"},
        {9, "lightcone", "exterior error < 1e-3 x interior; front speed <= 2 max|u| + 3 cells"},
        {10, "interp", "interpolation inequality: zero violations over 10^4 random fields"},
        {11, "euler-breakdown", "breakdown candidate completes at N in {256,512}, trend emitted"},
    };

    const std::filesystem::path out_root = "acceptance-out";
    int failures = 0;
    for (const auto& c : criteria) {
        std::string verdict;
        std::string detail;
        try {
            const auto cfg = find_preset(c.preset).defaults;
            const auto man = run_preset(cfg, out_root / c.preset);
            verdict = man.all_pass() ? "PASS" : "FAIL";
            for (const auto& chk : man.checks)
                if (!chk.pass)
                    detail += " [" + chk.name + ": " + format_double(chk.value) + " vs " +
                              format_double(chk.bound) + "]";
            if (man.all_pass())
                detail = " (" + std::to_string(man.checks.size()) + " checks, " +
                         format_double(man.wall_ms / 1000.0) + " s)";
            if (!man.all_pass()) ++failures;
        } catch (const std::exception& e) {
            verdict = "FAIL";
            detail = std::string(" [exception: ") + e.what() + "]";
            ++failures;
        }
        std::printf("criterion %2d %-22s %s: %s%s\n", c.id, ("[" + c.preset + "]").c_str(),
                    c.summary.c_str(), verdict.c_str(), detail.c_str());
        std::fflush(stdout);
    }
    if (failures > 0) std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
