#include "parallel.hpp"

#include <cstdlib>
#include <string>

namespace kloostpath {

unsigned worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("KLOOSTPATH_THREADS")) {
        try {
            unsigned long cap = std::stoul(env);
            if (cap >= 1 && cap < hw) hw = static_cast<unsigned>(cap);
        } catch (...) {
            // ignore malformed values, keep hardware default
        }
    }
    return hw;
}

} // namespace kloostpath
