#ifndef HPTM_FORMAT_HPP
#define HPTM_FORMAT_HPP

#include <cstdio>
#include <cstdlib>
#include <string>

// Locale-independent number formatting shared by the series printer, the
// problem-file writer and the CLI.

namespace hptm {

/// Shortest decimal string that parses back to exactly the same double.
inline std::string format_double(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) {
            break;
        }
    }
    return buf;
}

/// Fixed-point with at least two decimals, growing until the value round-trips.
/// Grid coordinates print as "0.25", "1.00", "0.125".
inline std::string format_coord(double v) {
    char buf[40];
    for (int prec = 2; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*f", prec, v);
        if (std::strtod(buf, nullptr) == v) {
            break;
        }
    }
    return buf;
}

/// Scientific notation with seven significant digits, e.g. 2.487124E-03.
inline std::string format_sci7(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6E", v);
    return buf;
}

}  // namespace hptm

#endif  // HPTM_FORMAT_HPP
