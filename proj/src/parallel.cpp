#include "gowerslab/parallel.hpp"

#include <cstdlib>
#include <string>

namespace gowerslab {

namespace {
int g_workers = 0; // 0 = unresolved
}

int worker_count() {
    if (g_workers > 0) return g_workers;
    if (const char* env = std::getenv("GOWERS_LAB_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (...) {
        }
    }
    return 1;
}

void set_worker_count(int n) {
    g_workers = n >= 1 ? n : 0;
}

} // namespace gowerslab
