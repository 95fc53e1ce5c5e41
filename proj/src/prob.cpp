#include "cfl/prob.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

namespace cfl {

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

std::optional<Prob> parse_prob(const std::string& text) {
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        std::string num = text.substr(0, slash);
        std::string den = text.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) return std::nullopt;
        Rational d(den);
        if (d == 0) return std::nullopt;
        return Prob::from_rational(Rational(num) / d);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) {
        if (!all_digits(text)) return std::nullopt;
        return Prob::from_rational(Rational(text));
    }
    std::string ip = text.substr(0, dot);
    std::string fp = text.substr(dot + 1);
    if (ip.empty()) ip = "0";
    if (!all_digits(ip) || (!fp.empty() && !all_digits(fp))) return std::nullopt;
    Rational r(ip);
    if (!fp.empty()) {
        Rational scale = 1;
        for (std::size_t i = 0; i < fp.size(); ++i) scale *= 10;
        r += Rational(fp) / scale;
    }
    return Prob::from_rational(r);
}

std::string to_string(const Prob& p) {
    if (!p.exact) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", p.value);
        return buf;
    }
    const Rational& r = *p.exact;
    mpz_class num = r.get_num();
    mpz_class den = r.get_den();
    // Decimal form exists iff den = 2^a * 5^b; scale numerator to 10^k.
    mpz_class d = den;
    unsigned a = 0, b = 0;
    while (d % 2 == 0) { d /= 2; ++a; }
    while (d % 5 == 0) { d /= 5; ++b; }
    if (d != 1) return num.get_str() + "/" + den.get_str();
    unsigned k = std::max(a, b);
    mpz_class scaled = num;
    for (unsigned i = a; i < k; ++i) scaled *= 2;
    for (unsigned i = b; i < k; ++i) scaled *= 5;
    std::string digits = scaled.get_str();
    if (k == 0) return digits + ".0";
    if (digits.size() <= k) digits.insert(0, k + 1 - digits.size(), '0');
    digits.insert(digits.size() - k, ".");
    return digits;
}

}  // namespace cfl
