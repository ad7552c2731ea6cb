#pragma once

#include <span>
#include <vector>

namespace envtiming {

/**
 * Least-squares projection of `values` onto nondecreasing sequences
 * (pool-adjacent-violators). Optional positive weights; empty means uniform.
 */
std::vector<double> isotonic_increasing(std::span<const double> values,
                                        std::span<const double> weights = {});

} // namespace envtiming
