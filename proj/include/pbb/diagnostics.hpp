#pragma once

#include <functional>
#include <string>

namespace pbb {

using WarningHandler = std::function<void(const std::string&)>;

/// Routes non-fatal warnings (asymptotic-validity guards, monotonicity
/// violations). Default handler prints to stderr.
void warn(const std::string& message);

/// Installs `handler` and returns the previous one.
WarningHandler set_warning_handler(WarningHandler handler);

}  // namespace pbb
