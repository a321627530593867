// Tabulates the vertical-crossing probability of a critical-percolation
// rectangle against a quick Monte Carlo estimate.

#include <cstdio>

#include "multisle/percolation.hpp"

int main() {
    using namespace multisle;
    std::printf("%8s %12s %12s %10s\n", "R", "P_cardy", "p_hat", "stderr");
    for (double r : {0.5, 1.0, 2.0, 3.0}) {
        const int h = 48;
        const int w = static_cast<int>(r * h);
        const auto est = estimate_crossing(LatticeSpec(w, h, 0.5, 7), 20000, 2);
        std::printf("%8.2f %12.6f %12.6f %10.6f\n", r,
                    cardy_vertical_probability(r), est.p_hat, est.stderr_);
    }
    return 0;
}
