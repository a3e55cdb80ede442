#include <cstdlib>
#include <cstring>

#include "ionsim/kernels.hpp"

namespace ionsim::kern {

namespace {

const Kernels* select() {
    if (const char* env = std::getenv("IONSIM_KERNEL")) {
        if (std::strcmp(env, "scalar") == 0) return &scalar();
        if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return &avx2();
    }
    return avx2_supported() ? &avx2() : &scalar();
}

}  // namespace

const Kernels& active() {
    static const Kernels* table = select();
    return *table;
}

}  // namespace ionsim::kern
