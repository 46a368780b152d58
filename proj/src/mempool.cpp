// Pooled allocator for GMP/MPFR limb storage.
//
// Enclosure arithmetic allocates and frees small limb buffers at a very
// high rate; routing them through thread-local free lists removes the
// malloc round trips that dominate low-precision runs.  Installed before
// main() runs; falls through to malloc for large or odd-sized blocks.

#include <array>
#include <cstdlib>
#include <cstring>
#include <vector>

#include <gmp.h>

namespace {

constexpr size_t kGranule = 32;
constexpr size_t kClasses = 64;   // up to 2 KiB pooled

struct Pool {
    std::array<std::vector<void*>, kClasses> free_lists;

    ~Pool() {
        for (auto& list : free_lists)
            for (void* p : list) std::free(p);
    }
};

thread_local Pool t_pool;

inline size_t class_of(size_t bytes) { return (bytes + kGranule - 1) / kGranule; }

void* pool_alloc(size_t bytes) {
    size_t cls = class_of(bytes);
    if (cls < kClasses) {
        auto& list = t_pool.free_lists[cls];
        if (!list.empty()) {
            void* p = list.back();
            list.pop_back();
            return p;
        }
        return std::malloc(cls * kGranule);
    }
    return std::malloc(bytes);
}

void pool_free(void* p, size_t bytes) {
    size_t cls = class_of(bytes);
    if (cls < kClasses) {
        auto& list = t_pool.free_lists[cls];
        if (list.size() < 4096) {
            list.push_back(p);
            return;
        }
    }
    std::free(p);
}

void* pool_realloc(void* p, size_t old_bytes, size_t new_bytes) {
    if (class_of(old_bytes) == class_of(new_bytes) && class_of(old_bytes) < kClasses)
        return p;
    void* q = pool_alloc(new_bytes);
    std::memcpy(q, p, old_bytes < new_bytes ? old_bytes : new_bytes);
    pool_free(p, old_bytes);
    return q;
}

struct InstallPool {
    InstallPool() { mp_set_memory_functions(pool_alloc, pool_realloc, pool_free); }
};
InstallPool install_pool;

} // namespace
