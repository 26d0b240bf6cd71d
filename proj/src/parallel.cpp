#include "entangle/parallel.hpp"

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace entangle {

void for_each_block(std::size_t count, unsigned workers,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  const std::size_t blocks = std::max<std::size_t>(1, std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  auto bounds = [&](std::size_t b) { return count * b / blocks; };

  if (blocks == 1) {
    body(0, 0, count);
    return;
  }

  std::vector<std::exception_ptr> errors(blocks);
  std::vector<std::thread> threads;
  threads.reserve(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    threads.emplace_back([&, b] {
      try {
        body(b, bounds(b), bounds(b + 1));
      } catch (...) {
        errors[b] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace entangle
