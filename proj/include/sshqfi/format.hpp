#pragma once

#include <string>

namespace sshqfi {

/// Shortest decimal that round-trips to the same double; "nan"/"inf"/"-inf"
/// for non-finite values.
std::string format_double(double x);

/// printf-style %.17g.
std::string format_g17(double x);

}  // namespace sshqfi
