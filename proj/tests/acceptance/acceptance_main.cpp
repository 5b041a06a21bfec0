// Prints one PASS/FAIL line per acceptance criterion, then an isolation check
// that a faulty simplex projection only breaks the simplex-dependent criteria.
#include "sumscale/harness.hpp"

#include <iostream>
#include <set>

using namespace sumscale;

int main() {
    const auto results = verify("paper");
    print_verify_report(results, std::cout, false);

    VerifyOptions broken;
    broken.simplex_override = Projection{"simplex", [](const Vector& x) {
                                             Vector y = x.cwiseMax(0.0);
                                             return Vector(y / (y.sum() + 1.0));
                                         }};
    const auto faulty = verify("paper", broken);
    std::set<int> baseline_failures;
    for (const auto& r : results) {
        if (!r.pass) baseline_failures.insert(r.id);
    }
    bool isolated = true;
    bool detected = false;
    for (const auto& r : faulty) {
        if (r.pass || baseline_failures.count(r.id)) continue;
        if (!r.uses_simplex) isolated = false;
        detected = true;
    }
    const bool ok = isolated && detected;
    std::cout << (ok ? "PASS" : "FAIL") << " [isolation] broken simplex projection fails only simplex criteria\n";

    bool all = ok;
    for (const auto& r : results) all = all && r.pass;
    return all ? 0 : 1;
}
