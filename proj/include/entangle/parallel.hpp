#pragma once

#include <cstddef>
#include <functional>

namespace entangle {

/// Splits [0, count) into `workers` contiguous blocks and runs
/// body(block_index, begin, end) for each, on separate threads when
/// workers > 1. Block boundaries depend only on (count, workers). Callers
/// merge per-block results in block order.
void for_each_block(std::size_t count, unsigned workers,
                    const std::function<void(std::size_t block, std::size_t begin, std::size_t end)>& body);

}  // namespace entangle
