#pragma once

#include <cstddef>
#include <functional>

namespace aniso {

// Worker count for parallel_for; 0 selects std::thread::hardware_concurrency().
void set_thread_count(int n);
int thread_count();

// Calls fn(i) for i in [0, n) on up to thread_count() threads in contiguous chunks.
// fn must only write to state owned by index i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace aniso
