// format.hpp
// Number formatting shared by every CSV/JSON writer.

#pragma once

#include <string>

namespace kfree {

// Six significant digits, printf "%.6g".
std::string format_real(double value);

} // namespace kfree
