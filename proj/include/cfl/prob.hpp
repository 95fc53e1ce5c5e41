#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

namespace cfl {

using Rational = mpq_class;

// Probability value. The engine computes in doubles; the exact rational
// form is kept whenever the source admits one (decimal literals,
// fractions, values derived from exact inputs) so that oracles and
// normalization checks can run without rounding.
struct Prob {
    double value = 0.0;
    std::optional<Rational> exact;

    Prob() = default;

    static Prob from_double(double d) {
        Prob p;
        p.value = d;
        return p;
    }

    static Prob from_rational(const Rational& r) {
        Prob p;
        p.exact = r;
        p.exact->canonicalize();
        p.value = p.exact->get_d();
        return p;
    }

    static Prob from_ratio(long num, long den) { return from_rational(Rational(num, den)); }

    static Prob zero() { return from_ratio(0, 1); }
    static Prob one() { return from_ratio(1, 1); }

    bool is_zero() const { return exact ? *exact == 0 : value == 0.0; }
    bool is_one() const { return exact ? *exact == 1 : value == 1.0; }

    bool operator==(const Prob& o) const {
        if (exact && o.exact) return *exact == *o.exact;
        return value == o.value && exact.has_value() == o.exact.has_value();
    }
    bool operator!=(const Prob& o) const { return !(*this == o); }
};

// Parses "0.3", "1", "3/10". Returns nullopt on malformed input.
std::optional<Prob> parse_prob(const std::string& text);

// Prints a probability so that parse_prob round-trips it. Rationals with
// 2^a*5^b denominators render as decimals ("0.3", "1.0"), others as
// fractions ("1/3"); inexact doubles use shortest round-trip notation.
std::string to_string(const Prob& p);

}  // namespace cfl
