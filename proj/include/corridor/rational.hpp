#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "corridor/errors.hpp"

namespace corridor {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Parses "num/den" or "num" (optional leading '-'). Whitespace is rejected; the
// denominator must be nonzero.
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw parse_error("empty rational literal");
    auto valid_int = [](const std::string& s) {
        if (s.empty()) return false;
        std::size_t start = (s[0] == '-') ? 1 : 0;
        if (start == s.size()) return false;
        for (std::size_t i = start; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9') return false;
        return true;
    };
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            if (!valid_int(text)) throw parse_error("bad rational literal: " + text);
            return Rational(BigInt(text));
        }
        const std::string num = text.substr(0, slash);
        const std::string den = text.substr(slash + 1);
        if (!valid_int(num) || !valid_int(den)) throw parse_error("bad rational literal: " + text);
        BigInt d(den);
        if (d == 0) throw parse_error("zero denominator: " + text);
        return Rational(BigInt(num), d);
    } catch (const std::exception& e) {
        throw parse_error(std::string("bad rational literal '") + text + "': " + e.what());
    }
}

// Canonical form: "num" when the denominator is 1, else "num/den", fully reduced.
inline std::string format_rational(const Rational& value) {
    const BigInt num = boost::multiprecision::numerator(value);
    const BigInt den = boost::multiprecision::denominator(value);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

inline double to_double(const Rational& value) { return value.convert_to<double>(); }

inline BigInt rational_floor(const Rational& value) {
    const BigInt num = boost::multiprecision::numerator(value);
    const BigInt den = boost::multiprecision::denominator(value);
    BigInt q = num / den;  // truncates toward zero
    if (num < 0 && q * den != num) --q;
    return q;
}

inline BigInt rational_ceil(const Rational& value) { return -rational_floor(-value); }

}  // namespace corridor
