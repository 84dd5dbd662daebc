#pragma once

#include <cstddef>
#include <functional>

namespace terra {

/// Number of worker threads used by parallel_for. 0 selects hardware concurrency.
void set_worker_count(std::size_t n);
std::size_t worker_count();

/// Runs body(i) for i in [0, n). Work is split into contiguous chunks; each
/// index is visited exactly once, so any body that writes only slot i yields
/// results independent of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace terra
