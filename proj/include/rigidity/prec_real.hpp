#ifndef RIGIDITY_PREC_REAL_HPP
#define RIGIDITY_PREC_REAL_HPP

#include <gmpxx.h>

#include <optional>
#include <string>

#include "rigidity/errors.hpp"

namespace rigidity {

// Dyadic ball: the represented value lies in
//   [ (mantissa - radius) * 2^exponent, (mantissa + radius) * 2^exponent ].
// All operations propagate the radius conservatively, so the computed
// interval always contains the exact result. Balls are immutable value
// types and safe to share across threads.
//
// The representation is kept canonical: mantissa and radius never share
// a factor of two (the exponent absorbs it), and an exact zero has
// exponent 0. This makes the decimal serialization round-trip to the
// identical triple.
class PrecReal {
public:
    PrecReal() : man_(0), rad_(0), exp_(0) {}

    static PrecReal exact_int(const mpz_class& n);
    static PrecReal exact_int(long n) { return exact_int(mpz_class(n)); }
    // Doubles are dyadic; this is a lossless conversion.
    static PrecReal exact_double(double d);
    // Dyadic value man * 2^exp with radius rad * 2^exp, rad >= 0.
    static PrecReal ball(mpz_class man, mpz_class rad, long exp);
    // Round num/den to `bits` fractional bits; radius <= one ulp
    // (zero when the division is exact).
    static PrecReal from_mpq(const mpq_class& q, long bits);

    const mpz_class& mantissa() const { return man_; }
    const mpz_class& radius_units() const { return rad_; }
    long exponent() const { return exp_; }

    bool is_exact() const { return rad_ == 0; }
    bool is_zero_exact() const { return rad_ == 0 && man_ == 0; }

    mpq_class lower() const;
    mpq_class upper() const;
    mpq_class midpoint() const;
    mpq_class radius() const;  // absolute radius rad * 2^exp

    PrecReal operator-() const;
    PrecReal operator+(const PrecReal& o) const;
    PrecReal operator-(const PrecReal& o) const;
    PrecReal operator*(const PrecReal& o) const;
    // Exact scaling by an integer.
    PrecReal scaled(const mpz_class& k) const;
    PrecReal scaled(long k) const { return scaled(mpz_class(k)); }

    // Re-round the mantissa to about `bits` significant bits, widening
    // the radius to keep containment. No-op when already small.
    PrecReal rounded(long bits) const;

    // Widen the radius by `extra` absolute units (extra >= 0, exact rational
    // rounded outward).
    PrecReal widened(const mpq_class& extra) const;

    // Exact decimal serialization "d.ddd...e<k>(±r.rr...e<k2>)"; parsing a
    // string we produced reconstructs the identical ball.
    std::string to_string() const;
    static PrecReal parse(const std::string& s);

    // Shortened display (not round-trip): midpoint to ~digits decimals
    // plus an outward-rounded radius.
    std::string display(int digits = 12) const;

    bool operator==(const PrecReal& o) const {
        return man_ == o.man_ && rad_ == o.rad_ && exp_ == o.exp_;
    }

private:
    friend PrecReal add_scaled(const PrecReal&, const PrecReal&, bool);

    void normalize();

    mpz_class man_;
    mpz_class rad_;
    long exp_;
};

// Three-valued certified comparison result. `margin` is the certified
// distance between the compared interval and the threshold (how much
// slack the decision has); for UNDECIDED it is the overlap depth.
struct CertifiedBool {
    enum class Outcome { True, False, Undecided };
    Outcome outcome;
    PrecReal margin;

    bool is_true() const { return outcome == Outcome::True; }
    bool is_false() const { return outcome == Outcome::False; }
    bool undecided() const { return outcome == Outcome::Undecided; }
    const char* name() const {
        switch (outcome) {
            case Outcome::True: return "TRUE";
            case Outcome::False: return "FALSE";
            default: return "UNDECIDED";
        }
    }
};

// Fractional part in [0,1). If the ball straddles an integer the branch
// of the midpoint is taken (the returned ball then pokes outside [0,1);
// `straddled`, when given, reports it). Throws PrecisionExhausted when
// the radius is >= 1/4 and the result would be meaningless on the circle.
PrecReal frac(const PrecReal& x, bool* straddled = nullptr);

// Distance to the nearest integer, in [0, 1/2]. Exact interval evaluation:
// the result ball is the tight image of the input ball under the circle
// metric. Throws PrecisionExhausted when radius >= 1/4.
PrecReal dist_to_int(const PrecReal& x);

// x < threshold, certified. TRUE iff upper(x) < threshold, FALSE iff
// lower(x) >= threshold, UNDECIDED otherwise.
CertifiedBool cert_less(const PrecReal& x, const mpq_class& threshold);
CertifiedBool cert_less(const PrecReal& x, const PrecReal& y);

// Exact counterparts on rationals (the circle metric restricted to Q).
mpq_class frac_exact(const mpq_class& q);
mpq_class dist_to_int_exact(const mpq_class& q);

}  // namespace rigidity

#endif
