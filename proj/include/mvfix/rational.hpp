#pragma once
// Exact rationals (GMP) plus text conversion.
#include <gmpxx.h>

#include <cctype>
#include <stdexcept>
#include <string>

namespace mvfix {

using Rational = mpq_class;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Accepts "p/q", integers, and decimals such as "0.45" or "-1.5e-2"; all exact.
inline Rational parse_rational(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.empty()) throw ParseError("empty rational");

    auto check_int = [&](const std::string& t) {
        size_t i = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
        if (i == t.size()) throw ParseError("malformed rational '" + text + "'");
        for (; i < t.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(t[i])))
                throw ParseError("malformed rational '" + text + "'");
    };

    if (auto slash = s.find('/'); slash != std::string::npos) {
        std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        check_int(num);
        check_int(den);
        if (num[0] == '+') num.erase(0, 1);
        if (den[0] == '+') den.erase(0, 1);
        mpz_class n(num, 10), d(den, 10);
        if (d == 0) throw ParseError("zero denominator in '" + text + "'");
        Rational r(n, d);
        r.canonicalize();
        return r;
    }

    long exp10 = 0;
    if (auto e = s.find_first_of("eE"); e != std::string::npos) {
        std::string ex = s.substr(e + 1);
        check_int(ex);
        exp10 = std::stol(ex);
        s = s.substr(0, e);
    }
    bool neg = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        neg = s[0] == '-';
        s.erase(0, 1);
    }
    std::string digits;
    if (auto dot = s.find('.'); dot != std::string::npos) {
        digits = s.substr(0, dot) + s.substr(dot + 1);
        exp10 -= static_cast<long>(s.size() - dot - 1);
    } else {
        digits = s;
    }
    if (digits.empty() || digits[0] == '-' || digits[0] == '+') throw ParseError("malformed rational '" + text + "'");
    check_int(digits);
    mpz_class n(digits, 10);
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    Rational r = exp10 >= 0 ? Rational(n * p10) : Rational(n, p10);
    r.canonicalize();
    return neg ? Rational(-r) : r;
}

// Canonical "p/q" (or "p" for integers).
inline std::string format_rational(const Rational& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline double to_double(const Rational& r) { return r.get_d(); }

}  // namespace mvfix
