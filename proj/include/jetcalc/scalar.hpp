#pragma once

#include <cctype>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "error.hpp"

namespace jetcalc {

/// Exact rational number. GMP keeps every value in canonical form
/// (reduced, positive denominator) after each arithmetic operation.
using Scalar = mpq_class;

/// A point of the chart, in exact coordinates.
using Point = std::vector<Scalar>;

/// Parses "p", "-p" or "p/q". Floating-point notation is rejected.
inline Scalar parse_scalar(std::string_view text)
{
    if (text.empty()) {
        throw domain_error("empty rational literal");
    }
    std::size_t slashes = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '/') {
            ++slashes;
        } else if ((c == '-' || c == '+') && i == 0) {
            continue;
        } else if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw domain_error("malformed rational literal '" + std::string(text) + "'");
        }
    }
    if (slashes > 1 || text.back() == '/' || text.front() == '/') {
        throw domain_error("malformed rational literal '" + std::string(text) + "'");
    }
    std::string buf(text);
    if (buf.front() == '+') {
        buf.erase(buf.begin());
    }
    Scalar value;
    if (value.set_str(buf, 10) != 0) {
        throw domain_error("malformed rational literal '" + std::string(text) + "'");
    }
    if (value.get_den() == 0) {
        throw domain_error("zero denominator in '" + std::string(text) + "'");
    }
    value.canonicalize();
    return value;
}

/// Canonical "p/q" text ("p" when the denominator is one).
inline std::string format_scalar(const Scalar& value)
{
    return value.get_str(10);
}

/// p/q in canonical form (the two-argument mpq_class constructor does not reduce).
inline Scalar rational(long p, long q)
{
    if (q == 0) {
        throw domain_error("zero denominator");
    }
    Scalar s(p, q);
    s.canonicalize();
    return s;
}

inline Point make_point(std::initializer_list<long> coords)
{
    Point p;
    p.reserve(coords.size());
    for (long c : coords) {
        p.emplace_back(c);
    }
    return p;
}

inline Point origin(std::size_t n)
{
    return Point(n, Scalar(0));
}

} // namespace jetcalc
