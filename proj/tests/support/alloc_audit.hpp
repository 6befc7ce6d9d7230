#pragma once

#include <cstddef>

// Process-wide malloc interposition used by the acceptance suite to prove
// that the anchor path never materializes an N x N array. While a scope is
// active, the largest single heap allocation is tracked; Eigen and the
// standard library both route through malloc, so nothing escapes the hook.
namespace alloc_audit {

struct Scope {
    Scope();
    ~Scope();
    std::size_t peak_single_bytes() const;
};

}  // namespace alloc_audit
