#include "rigidity/prec_real.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <sstream>

namespace rigidity {

namespace {

mpz_class pow5(long k) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 5, static_cast<unsigned long>(k));
    return r;
}

mpq_class scale_q(const mpz_class& m, long e) {
    mpq_class q(m);
    if (e >= 0) {
        mpz_mul_2exp(mpq_numref(q.get_mpq_t()), mpq_numref(q.get_mpq_t()),
                     static_cast<unsigned long>(e));
    } else {
        mpz_mul_2exp(mpq_denref(q.get_mpq_t()), mpq_denref(q.get_mpq_t()),
                     static_cast<unsigned long>(-e));
    }
    q.canonicalize();
    return q;
}

long trailing_zeros(const mpz_class& z) {
    if (z == 0) return -1;
    return static_cast<long>(mpz_scan1(z.get_mpz_t(), 0));
}

}  // namespace

void PrecReal::normalize() {
    if (man_ == 0 && rad_ == 0) {
        exp_ = 0;
        return;
    }
    long tm = trailing_zeros(man_);
    long tr = trailing_zeros(rad_);
    long t = (tm < 0) ? tr : (tr < 0 ? tm : std::min(tm, tr));
    if (t > 0) {
        mpz_fdiv_q_2exp(man_.get_mpz_t(), man_.get_mpz_t(),
                        static_cast<unsigned long>(t));
        mpz_fdiv_q_2exp(rad_.get_mpz_t(), rad_.get_mpz_t(),
                        static_cast<unsigned long>(t));
        exp_ += t;
    }
}

PrecReal PrecReal::exact_int(const mpz_class& n) {
    PrecReal r;
    r.man_ = n;
    r.rad_ = 0;
    r.exp_ = 0;
    r.normalize();
    return r;
}

PrecReal PrecReal::exact_double(double d) {
    if (!std::isfinite(d))
        throw Error(ErrorCode::ConfigError, "non-finite double");
    int e = 0;
    double m = std::frexp(d, &e);
    auto mi = static_cast<long long>(std::ldexp(m, 53));
    PrecReal r;
    r.man_ = mpz_class(static_cast<long>(mi));
    r.rad_ = 0;
    r.exp_ = e - 53;
    r.normalize();
    return r;
}

PrecReal PrecReal::ball(mpz_class man, mpz_class rad, long exp) {
    if (rad < 0) throw Error(ErrorCode::ConfigError, "negative ball radius");
    PrecReal r;
    r.man_ = std::move(man);
    r.rad_ = std::move(rad);
    r.exp_ = exp;
    r.normalize();
    return r;
}

PrecReal PrecReal::from_mpq(const mpq_class& q, long bits) {
    mpz_class num = q.get_num();
    mpz_class den = q.get_den();
    mpz_class shifted;
    mpz_mul_2exp(shifted.get_mpz_t(), num.get_mpz_t(),
                 static_cast<unsigned long>(bits));
    mpz_class quot, rem;
    mpz_fdiv_qr(quot.get_mpz_t(), rem.get_mpz_t(), shifted.get_mpz_t(),
                den.get_mpz_t());
    return ball(quot, mpz_class(rem != 0 ? 1 : 0), -bits);
}

mpq_class PrecReal::lower() const { return scale_q(man_ - rad_, exp_); }
mpq_class PrecReal::upper() const { return scale_q(man_ + rad_, exp_); }
mpq_class PrecReal::midpoint() const { return scale_q(man_, exp_); }
mpq_class PrecReal::radius() const { return scale_q(rad_, exp_); }

PrecReal PrecReal::operator-() const {
    PrecReal r(*this);
    r.man_ = -r.man_;
    return r;
}

PrecReal PrecReal::operator+(const PrecReal& o) const {
    long e = std::min(exp_, o.exp_);
    mpz_class m1 = man_, r1 = rad_, m2 = o.man_, r2 = o.rad_;
    if (exp_ > e) {
        unsigned long s = static_cast<unsigned long>(exp_ - e);
        mpz_mul_2exp(m1.get_mpz_t(), m1.get_mpz_t(), s);
        mpz_mul_2exp(r1.get_mpz_t(), r1.get_mpz_t(), s);
    }
    if (o.exp_ > e) {
        unsigned long s = static_cast<unsigned long>(o.exp_ - e);
        mpz_mul_2exp(m2.get_mpz_t(), m2.get_mpz_t(), s);
        mpz_mul_2exp(r2.get_mpz_t(), r2.get_mpz_t(), s);
    }
    return ball(m1 + m2, r1 + r2, e);
}

PrecReal PrecReal::operator-(const PrecReal& o) const { return *this + (-o); }

PrecReal PrecReal::operator*(const PrecReal& o) const {
    mpz_class am = abs(man_), bm = abs(o.man_);
    mpz_class rad = am * o.rad_ + bm * rad_ + rad_ * o.rad_;
    return ball(man_ * o.man_, rad, exp_ + o.exp_);
}

PrecReal PrecReal::scaled(const mpz_class& k) const {
    return ball(man_ * k, rad_ * abs(k), exp_);
}

PrecReal PrecReal::rounded(long bits) const {
    long sz = static_cast<long>(
        std::max(mpz_sizeinbase(man_.get_mpz_t(), 2),
                 mpz_sizeinbase(rad_.get_mpz_t(), 2)));
    long shift = sz - bits;
    if (shift <= 0) return *this;
    mpz_class m, r;
    mpz_fdiv_q_2exp(m.get_mpz_t(), man_.get_mpz_t(),
                    static_cast<unsigned long>(shift));
    mpz_fdiv_q_2exp(r.get_mpz_t(), rad_.get_mpz_t(),
                    static_cast<unsigned long>(shift));
    return ball(m, r + 2, exp_ + shift);
}

PrecReal PrecReal::widened(const mpq_class& extra) const {
    if (extra < 0) throw Error(ErrorCode::ConfigError, "negative widening");
    if (extra == 0) return *this;
    // extra / 2^exp, rounded up to the next unit.
    mpq_class units = extra / scale_q(1, exp_);
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), units.get_num().get_mpz_t(),
               units.get_den().get_mpz_t());
    return ball(man_, rad_ + q, exp_);
}

namespace {

// Exact decimal of m * 2^e in normalized scientific notation.
std::string decimal_sci(const mpz_class& m, long e) {
    if (m == 0) return "0";
    mpz_class n = m;
    long exp10 = 0;
    if (e >= 0) {
        mpz_mul_2exp(n.get_mpz_t(), n.get_mpz_t(),
                     static_cast<unsigned long>(e));
    } else {
        n *= pow5(-e);
        exp10 = e;
    }
    bool neg = n < 0;
    mpz_class an = abs(n);
    std::string digits = an.get_str();
    long point_exp = exp10 + static_cast<long>(digits.size()) - 1;
    // trim trailing zeros (exact)
    size_t last = digits.find_last_not_of('0');
    digits.erase(last + 1);
    std::string out;
    if (neg) out += '-';
    out += digits[0];
    if (digits.size() > 1) {
        out += '.';
        out += digits.substr(1);
    }
    out += 'e';
    out += std::to_string(point_exp);
    return out;
}

// Parse "d.ddd...e<k>" into an exact rational.
mpq_class parse_sci(const std::string& s) {
    if (s == "0") return mpq_class(0);
    size_t epos = s.find('e');
    if (epos == std::string::npos)
        throw Error(ErrorCode::ConfigError, "bad decimal literal: " + s);
    std::string mant = s.substr(0, epos);
    long exp10 = std::stol(s.substr(epos + 1));
    bool neg = false;
    size_t i = 0;
    if (mant[0] == '-') { neg = true; i = 1; }
    else if (mant[0] == '+') { i = 1; }
    std::string digits;
    long frac_len = 0;
    bool seen_point = false;
    for (; i < mant.size(); ++i) {
        if (mant[i] == '.') { seen_point = true; continue; }
        if (!std::isdigit(static_cast<unsigned char>(mant[i])))
            throw Error(ErrorCode::ConfigError, "bad decimal literal: " + s);
        digits += mant[i];
        if (seen_point) ++frac_len;
    }
    mpz_class d(digits, 10);
    if (neg) d = -d;
    long t = exp10 - frac_len;
    mpq_class v(d);
    if (t >= 0) {
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(t));
        v *= mpq_class(p);
    } else {
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(-t));
        v /= mpq_class(p);
    }
    return v;
}

// Exact rational -> dyadic mantissa/exponent if possible; otherwise round
// outward, reporting one extra unit of radius.
bool rational_to_dyadic(const mpq_class& v, mpz_class& man, long& e) {
    mpz_class den = v.get_den();
    long tz = den == 1 ? 0 : static_cast<long>(mpz_scan1(den.get_mpz_t(), 0));
    mpz_class odd;
    mpz_fdiv_q_2exp(odd.get_mpz_t(), den.get_mpz_t(),
                    static_cast<unsigned long>(tz));
    if (odd != 1) return false;
    man = v.get_num();
    e = -tz;
    return true;
}

}  // namespace

std::string PrecReal::to_string() const {
    return decimal_sci(man_, exp_) + "(\xc2\xb1" + decimal_sci(rad_, exp_) + ")";
}

PrecReal PrecReal::parse(const std::string& s) {
    size_t open = s.find("(\xc2\xb1");
    size_t close = s.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw Error(ErrorCode::ConfigError, "bad ball literal: " + s);
    mpq_class v = parse_sci(s.substr(0, open));
    mpq_class r = parse_sci(s.substr(open + 3, close - open - 3));
    if (r < 0) throw Error(ErrorCode::ConfigError, "negative radius: " + s);

    mpz_class vm, rm;
    long ve = 0, re = 0;
    bool v_exact = rational_to_dyadic(v, vm, ve);
    bool r_exact = rational_to_dyadic(r, rm, re);
    if (v_exact && r_exact) {
        long e = std::min(r == 0 ? ve : re, ve);
        mpz_class m = vm, rr = (r == 0) ? mpz_class(0) : rm;
        if (ve > e) mpz_mul_2exp(m.get_mpz_t(), m.get_mpz_t(),
                                 static_cast<unsigned long>(ve - e));
        if (r != 0 && re > e)
            mpz_mul_2exp(rr.get_mpz_t(), rr.get_mpz_t(),
                         static_cast<unsigned long>(re - e));
        return ball(m, rr, e);
    }
    // Inexact decimal input: round to 192 fractional bits and widen.
    PrecReal mid = from_mpq(v, 192);
    return mid.widened(r);
}

std::string PrecReal::display(int digits) const {
    mpq_class mid = midpoint();
    mpq_class rad = radius();
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    mpq_class scaled_mid = mid * mpq_class(scale);
    mpz_class rounded_mid;
    mpz_fdiv_q(rounded_mid.get_mpz_t(), scaled_mid.get_num().get_mpz_t(),
               scaled_mid.get_den().get_mpz_t());
    std::ostringstream os;
    mpq_class shown(rounded_mid, scale);
    shown.canonicalize();
    os << shown.get_d();
    if (rad != 0) os << "(\xc2\xb1" << rad.get_d() << ")";
    return os.str();
}

PrecReal frac(const PrecReal& x, bool* straddled) {
    if (x.radius() * 4 >= 1)
        throw Error(ErrorCode::PrecisionExhausted,
                    "frac: radius " + x.radius().get_str() +
                        " leaves the circle position undetermined");
    long e = std::min(x.exponent(), 0L);
    mpz_class man = x.mantissa(), rad = x.radius_units();
    if (x.exponent() > e) {
        unsigned long s = static_cast<unsigned long>(x.exponent() - e);
        mpz_mul_2exp(man.get_mpz_t(), man.get_mpz_t(), s);
        mpz_mul_2exp(rad.get_mpz_t(), rad.get_mpz_t(), s);
    }
    mpz_class one;
    mpz_ui_pow_ui(one.get_mpz_t(), 2, static_cast<unsigned long>(-e));
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), man.get_mpz_t(), one.get_mpz_t());
    if (straddled) {
        mpz_class fl_lo, fl_hi, lo = man - rad, hi = man + rad;
        mpz_fdiv_q(fl_lo.get_mpz_t(), lo.get_mpz_t(), one.get_mpz_t());
        mpz_fdiv_q(fl_hi.get_mpz_t(), hi.get_mpz_t(), one.get_mpz_t());
        *straddled = (fl_lo != fl_hi);
    }
    return PrecReal::ball(man - fl * one, rad, e);
}

PrecReal dist_to_int(const PrecReal& x) {
    if (x.radius() * 4 >= 1)
        throw Error(ErrorCode::PrecisionExhausted,
                    "dist_to_int: radius " + x.radius().get_str() +
                        " leaves the circle position undetermined");
    long e = std::min(x.exponent(), -1L);
    mpz_class man = x.mantissa(), rad = x.radius_units();
    if (x.exponent() > e) {
        unsigned long s = static_cast<unsigned long>(x.exponent() - e);
        mpz_mul_2exp(man.get_mpz_t(), man.get_mpz_t(), s);
        mpz_mul_2exp(rad.get_mpz_t(), rad.get_mpz_t(), s);
    }
    mpz_class one, half;
    mpz_ui_pow_ui(one.get_mpz_t(), 2, static_cast<unsigned long>(-e));
    mpz_ui_pow_ui(half.get_mpz_t(), 2, static_cast<unsigned long>(-e - 1));
    mpz_class n;
    mpz_class biased = man + half;
    mpz_fdiv_q(n.get_mpz_t(), biased.get_mpz_t(), one.get_mpz_t());
    mpz_class yl = man - rad - n * one;
    mpz_class yh = man + rad - n * one;
    // |y| over the interval
    mpz_class u, v;
    if (yl >= 0) { u = yl; v = yh; }
    else if (yh <= 0) { u = -yh; v = -yl; }
    else { u = 0; v = std::max(mpz_class(-yl), yh); }
    // image of [u, v] under t -> min(t, 1 - t), with v <= 3/4
    mpz_class a, b;
    if (v <= half) { a = u; b = v; }
    else if (u >= half) { a = one - v; b = one - u; }
    else {
        mpz_class flip = one - v;
        a = std::min(u, flip);
        b = half;
    }
    return PrecReal::ball(a + b, b - a, e - 1);
}

namespace {

PrecReal margin_ball(const mpq_class& m) { return PrecReal::from_mpq(m, 128); }

}  // namespace

CertifiedBool cert_less(const PrecReal& x, const mpq_class& threshold) {
    mpq_class hi = x.upper();
    if (hi < threshold)
        return {CertifiedBool::Outcome::True, margin_ball(threshold - hi)};
    mpq_class lo = x.lower();
    if (lo >= threshold)
        return {CertifiedBool::Outcome::False, margin_ball(lo - threshold)};
    return {CertifiedBool::Outcome::Undecided,
            margin_ball(std::min(hi - threshold, threshold - lo))};
}

CertifiedBool cert_less(const PrecReal& x, const PrecReal& y) {
    mpq_class xhi = x.upper(), ylo = y.lower();
    if (xhi < ylo)
        return {CertifiedBool::Outcome::True, margin_ball(ylo - xhi)};
    mpq_class xlo = x.lower(), yhi = y.upper();
    if (xlo >= yhi)
        return {CertifiedBool::Outcome::False, margin_ball(xlo - yhi)};
    return {CertifiedBool::Outcome::Undecided,
            margin_ball(std::min(xhi - ylo, yhi - xlo))};
}

mpq_class frac_exact(const mpq_class& q) {
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), q.get_num().get_mpz_t(),
               q.get_den().get_mpz_t());
    return q - mpq_class(fl);
}

mpq_class dist_to_int_exact(const mpq_class& q) {
    mpq_class f = frac_exact(q);
    mpq_class g = 1 - f;
    return f < g ? f : g;
}

}  // namespace rigidity
