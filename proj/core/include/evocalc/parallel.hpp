#pragma once

#include <cstddef>
#include <functional>

namespace evocalc {

// Width taken from EVOCALC_THREADS when set, else hardware concurrency.
unsigned default_thread_count();

// Splits [0, count) into contiguous chunks. Each chunk runs on its own thread
// and receives [begin, end); chunks never share output slots.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t begin, std::size_t end)>& body);

}  // namespace evocalc
