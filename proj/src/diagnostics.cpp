#include "pbb/diagnostics.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace pbb {

namespace {
std::mutex g_mutex;

WarningHandler& handler_slot() {
    static WarningHandler handler = [](const std::string& msg) {
        std::cerr << "warning: " << msg << '\n';
    };
    return handler;
}
}  // namespace

void warn(const std::string& message) {
    std::lock_guard lock(g_mutex);
    if (handler_slot()) handler_slot()(message);
}

WarningHandler set_warning_handler(WarningHandler handler) {
    std::lock_guard lock(g_mutex);
    return std::exchange(handler_slot(), std::move(handler));
}

}  // namespace pbb
