#include <doctest.h>

#include "rigidity/fejer.hpp"

using namespace rigidity;

TEST_CASE("witness construction certifies both bounds") {
    WitnessCertificate cert;
    TrigPoly poly = build_witness(2, 0, &cert);
    CHECK(cert.verdict.is_true());
    CHECK(cert.exterior_margin > 0);
    CHECK(cert.sup_margin > 0);
    CHECK(cert.grid >= 4 * poly.degree * 2);

    // re-verification with a finer grid keeps the certificate
    WitnessCertificate finer = verify_witness(poly, 2, 2 * cert.grid);
    CHECK(finer.verdict.is_true());

    // the dip at the middle of the excluded interval is certified below 1
    PrecReal mid = eval(poly, PrecReal::from_mpq(mpq_class(1, 4), 96));
    CHECK(mid.upper() < 1);

    // mean is structurally zero: integrating the stored form term by term
    // leaves no constant; evaluate instead at complementary points
    PrecReal far = eval(poly, PrecReal::from_mpq(mpq_class(7, 10), 96));
    CHECK(far.lower() > 1);
}

TEST_CASE("eval on hand-built polynomials") {
    TrigPoly zero;
    zero.degree = 4;
    zero.cos_coef = {0, 0, 0};
    zero.sin_coef = {0, 0, 0};
    PrecReal z = eval(zero, PrecReal::from_mpq(mpq_class(1, 3), 64));
    CHECK(z.lower() <= 0);
    CHECK(z.upper() >= 0);

    TrigPoly cosine;  // cos(2 pi y): conjugate pair with weight 1/2 each side
    cosine.degree = 2;
    cosine.cos_coef = {1.0};
    cosine.sin_coef = {0.0};
    PrecReal at0 = eval(cosine, PrecReal::exact_int(0));
    CHECK(at0.lower() <= 1);
    CHECK(at0.upper() >= 1);
    CHECK(at0.upper() - at0.lower() < mpq_class(1, 1000000));
    PrecReal at_half = eval(cosine, PrecReal::from_mpq(mpq_class(1, 2), 96));
    CHECK(at_half.upper() < mpq_class(-9, 10));
    CHECK(at_half.lower() > mpq_class(-11, 10));
}

TEST_CASE("verification rejects bad polynomials") {
    TrigPoly zero;
    zero.degree = 8;
    zero.cos_coef.assign(7, 0.0);
    zero.sin_coef.assign(7, 0.0);
    WitnessCertificate z = verify_witness(zero, 2, 4 * 8 * 2);
    CHECK(z.verdict.is_false());
    CHECK(z.violated_bound == 1);  // 0 is never > 1 outside the interval

    TrigPoly loud;  // amplitude 2 l^2 cosine violates the sup bound
    loud.degree = 2;
    loud.cos_coef = {2.0 * 4};
    loud.sin_coef = {0.0};
    WitnessCertificate l = verify_witness(loud, 2, 64);
    CHECK(l.verdict.is_false());
    CHECK(l.violated_bound == 2);
}

TEST_CASE("the degree cap raises a budget error") {
    CHECK_THROWS_AS(build_witness(8, 0, nullptr, 8), Error);
}

TEST_CASE("verification demands a rigorous grid") {
    TrigPoly poly = build_witness(3, 0);
    CHECK_THROWS_AS(verify_witness(poly, 3, 4 * poly.degree * 3 - 1), Error);
}

TEST_CASE("the certified order depends only on l") {
    WitnessCertificate c1, c2;
    TrigPoly a = build_witness(2, 0, &c1);
    TrigPoly b = build_witness(2, 0, &c2);
    CHECK(a.degree == b.degree);
    CHECK(a.cos_coef == b.cos_coef);
    CHECK(a.sin_coef == b.sin_coef);
}

TEST_CASE("witness csv round-trips through the text form") {
    TrigPoly poly = build_witness(2, 0);
    std::string csv = witness_csv(poly);
    CHECK(csv.find("k,cos_coef,sin_coef") == 0);
    size_t rows = std::count(csv.begin(), csv.end(), '\n');
    CHECK(rows == static_cast<size_t>(poly.degree));  // header + degree-1 rows
}
