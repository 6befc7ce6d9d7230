#include "support/alloc_audit.hpp"

#include <atomic>
#include <cstdlib>

// glibc exposes the underlying allocator entry points, which makes malloc
// interposition in the final binary safe: every allocation in the process,
// including Eigen's, funnels through the definitions below.
extern "C" {
void* __libc_malloc(size_t);
void __libc_free(void*);
void* __libc_calloc(size_t, size_t);
void* __libc_realloc(void*, size_t);
void* __libc_memalign(size_t, size_t);
}

namespace {

std::atomic<bool> g_active{false};
std::atomic<std::size_t> g_peak{0};

void record(std::size_t bytes) {
    if (!g_active.load(std::memory_order_relaxed)) return;
    std::size_t prev = g_peak.load(std::memory_order_relaxed);
    while (bytes > prev && !g_peak.compare_exchange_weak(prev, bytes)) {
    }
}

}  // namespace

extern "C" {

void* malloc(size_t n) {
    record(n);
    return __libc_malloc(n);
}

void free(void* p) { __libc_free(p); }

void* calloc(size_t n, size_t size) {
    record(n * size);
    return __libc_calloc(n, size);
}

void* realloc(void* p, size_t n) {
    record(n);
    return __libc_realloc(p, n);
}

void* aligned_alloc(size_t alignment, size_t n) {
    record(n);
    return __libc_memalign(alignment, n);
}

void* memalign(size_t alignment, size_t n) {
    record(n);
    return __libc_memalign(alignment, n);
}

int posix_memalign(void** out, size_t alignment, size_t n) {
    record(n);
    *out = __libc_memalign(alignment, n);
    return *out ? 0 : 12;  // ENOMEM
}

}  // extern "C"

namespace alloc_audit {

Scope::Scope() {
    g_peak.store(0);
    g_active.store(true);
}

Scope::~Scope() { g_active.store(false); }

std::size_t Scope::peak_single_bytes() const { return g_peak.load(); }

}  // namespace alloc_audit
