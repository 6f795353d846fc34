#pragma once

#include <cstddef>
#include <functional>

namespace prodcat {

// Runs body(i) for i in [0, count). With threads <= 1 this is a plain loop;
// otherwise items are claimed from an atomic counter. Work items must be
// independent and write only to their own result slot, which makes parallel
// and sequential execution produce identical numbers.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace prodcat
