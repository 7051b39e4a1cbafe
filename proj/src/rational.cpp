#include "erglab/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace erglab {

Rational parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw std::invalid_argument("empty rational literal");

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator: " + text);
        return Rational(num, den);
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        size_t frac_len = s.size() - dot - 1;
        if (digits.empty() || digits == "-" || digits == "+")
            throw std::invalid_argument("malformed rational: " + text);
        BigInt num(digits);
        BigInt den = 1;
        for (size_t i = 0; i < frac_len; ++i) den *= 10;
        return Rational(num, den);
    }
    return Rational(BigInt(s));
}

std::string format_rational(const Rational& r) {
    std::string num = numerator(r).str();
    if (denominator(r) == 1) return num;
    return num + "/" + denominator(r).str();
}

}  // namespace erglab
