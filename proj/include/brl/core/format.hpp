#pragma once

#include <string>

namespace brl {

// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double value);

}  // namespace brl
