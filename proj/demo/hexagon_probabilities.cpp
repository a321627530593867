// Crossing probabilities for the five hexagon connectivities at kappa = 6,
// where the weights themselves are the percolation probabilities.

#include <cstdio>

#include "multisle/weights.hpp"

int main() {
    using namespace multisle;
    const KappaContext kc(6.0);
    const PointConfig cfg({0.0, 1.0, 2.0, 3.5, 4.5, 6.0});
    const auto p = crossing_probabilities({1, 1, 1, 1, 1}, kc, cfg);
    double sum = 0.0;
    for (size_t s = 0; s < p.size(); ++s) {
        std::printf("P_%zu = %.8f\n", s + 1, p[s]);
        sum += p[s];
    }
    std::printf("sum  = %.8f\n", sum);
    return 0;
}
