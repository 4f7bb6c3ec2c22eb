#include "andova/parallel.hpp"

#include <cstdlib>
#include <string>

namespace andova {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ANDOVA_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace andova
