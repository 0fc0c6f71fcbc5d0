#pragma once

#include <string>

namespace edgelogdet {

// 17 significant digits ("%.17g"); round-trips every finite double.
// Non-finite values print as "inf", "-inf" and "nan".
std::string format_double(double value);

}  // namespace edgelogdet
