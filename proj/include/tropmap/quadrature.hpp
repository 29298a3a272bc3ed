#pragma once
// Gauss-Legendre rules shared by the numeric integration paths.

#include <cstddef>
#include <vector>

namespace tropmap {

struct GaussRule {
    std::vector<double> node, weight; // on [-1, 1]
};

// Nodes and weights of the n-point rule, generated once by Newton steps on
// the Legendre recurrence and cached per order.
const GaussRule& gauss_legendre(std::size_t n);

} // namespace tropmap
