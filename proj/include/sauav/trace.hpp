#pragma once

#include <cstdarg>
#include <cstdio>
#include <ostream>
#include <string>

#include "sauav/time.hpp"

namespace sauav {

/// Newline-delimited run log: "<micros> <RECORD> key=value ...". Each record
/// type is documented in OUTPUT.md. Writing through a single sink keeps the
/// byte stream identical for identical (config, seed) pairs.
class TraceWriter {
public:
    TraceWriter() = default;
    explicit TraceWriter(std::ostream* sink) : sink_(sink) {}

    bool enabled() const { return sink_ != nullptr; }

    void line(SimTime t, const char* fmt, ...) {
        if (!sink_) return;
        char buf[512];
        va_list args;
        va_start(args, fmt);
        std::vsnprintf(buf, sizeof(buf), fmt, args);
        va_end(args);
        (*sink_) << t.micros() << ' ' << buf << '\n';
    }

    void raw(const std::string& s) {
        if (sink_) (*sink_) << s << '\n';
    }

private:
    std::ostream* sink_ = nullptr;
};

} // namespace sauav
