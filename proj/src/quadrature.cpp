#include "tropmap/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace tropmap {

static GaussRule make_rule(std::size_t n) {
    GaussRule r;
    for (std::size_t k = 1; k <= n; ++k) {
        double x = std::cos(3.14159265358979323846 * (k - 0.25) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t j = 2; j <= n; ++j) {
                double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.node.push_back(x);
        r.weight.push_back(2.0 / ((1.0 - x * x) * dp * dp));
    }
    return r;
}

const GaussRule& gauss_legendre(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_rule(n)).first;
    return it->second;
}

} // namespace tropmap
