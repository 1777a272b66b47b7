#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>

#include "rgas/params.hpp"

namespace rgas {

/// Lossless, locale-independent float formatting (round-trips a double).
inline std::string csv_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Line-buffered CSV writer with a mandatory header row.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& header) : out_(path) {
        if (!out_) throw ConfigError("cannot open '" + path + "' for writing");
        out_ << header << '\n';
    }
    void row(const std::string& line) { out_ << line << '\n'; }
    void close() { out_.close(); }

private:
    std::ofstream out_;
};

/// FNV-1a digest used for result-row fingerprints in manifests.
inline uint64_t fnv1a(std::string_view s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace rgas
