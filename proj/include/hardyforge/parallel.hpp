#pragma once

#include <cstddef>
#include <functional>

namespace hardyforge {

// Number of workers, capped by HARDY_FORGE_THREADS when set.
int worker_count();

// Runs body(i) for i in [0, count). Nested calls run serially on the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace hardyforge
