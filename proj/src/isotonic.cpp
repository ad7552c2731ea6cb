#include "envtiming/isotonic.hpp"

#include <stdexcept>

namespace envtiming {

std::vector<double> isotonic_increasing(std::span<const double> values,
                                        std::span<const double> weights)
{
    if (!weights.empty() && weights.size() != values.size())
        throw std::invalid_argument("isotonic_increasing: weight/value size mismatch");

    struct Block {
        double mean;
        double weight;
        std::size_t size;
    };
    std::vector<Block> blocks;
    blocks.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        if (!(w > 0.0)) throw std::invalid_argument("isotonic_increasing: weights must be positive");
        blocks.push_back({values[i], w, 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
            const Block top = blocks.back();
            blocks.pop_back();
            Block& prev = blocks.back();
            const double w_sum = prev.weight + top.weight;
            prev.mean = (prev.mean * prev.weight + top.mean * top.weight) / w_sum;
            prev.weight = w_sum;
            prev.size += top.size;
        }
    }

    std::vector<double> out;
    out.reserve(values.size());
    for (const Block& b : blocks) out.insert(out.end(), b.size, b.mean);
    return out;
}

} // namespace envtiming
