#pragma once

#include <string>

namespace tsg {

/// Shortest decimal text that round-trips to the same double ("2", "0.25", "1e-10").
std::string format_double(double value);

} // namespace tsg
