#pragma once

#include <cstdarg>
#include <cstdio>
#include <string>

namespace tiermon {

inline std::string strf(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    va_list copy;
    va_copy(copy, args);
    int n = std::vsnprintf(nullptr, 0, fmt, copy);
    va_end(copy);
    std::string out(n > 0 ? static_cast<size_t>(n) : 0, '\0');
    if (n > 0)
        std::vsnprintf(out.data(), out.size() + 1, fmt, args);
    va_end(args);
    return out;
}

// shortest %g rendering that stays stable across runs; used by all CSV/SVG writers
inline std::string num10(double x) {
    return strf("%.10g", x);
}

} // namespace tiermon
