#include "kfree/format.hpp"

#include <cstdio>

namespace kfree {

std::string format_real(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

} // namespace kfree
