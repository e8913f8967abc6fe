#ifndef RIGIDITY_FEJER_HPP
#define RIGIDITY_FEJER_HPP

#include <string>
#include <vector>

#include "rigidity/prec_real.hpp"

namespace rigidity {

// Real trigonometric polynomial with zero constant term,
//   phi(y) = sum_{k=1}^{L-1} cos_coef[k-1] cos(2 pi k y)
//                          + sin_coef[k-1] sin(2 pi k y).
// The cos/sin pairs are the real form of a conjugate-symmetric complex
// coefficient map over 0 < |k| < L; coefficients are exact dyadic values
// (doubles taken at face value), so certification applies to the stored
// object, not to an ideal it approximates.
struct TrigPoly {
    long degree = 1;  // L
    std::vector<double> cos_coef;
    std::vector<double> sin_coef;

    double abs_coef_sum() const;
};

// Certification record for the two witness bounds on an exclusion interval
// [0, 1/l]:
//   (a)  phi(y) > 1        for every y outside [0, 1/l]
//   (b)  |phi(y)| < l^2    everywhere
// checked on a uniform grid with a Lipschitz correction (slope * step) that
// makes the grid decision valid between nodes.
struct WitnessCertificate {
    CertifiedBool verdict;
    int violated_bound = 0;  // 0 none, 1 = exterior lower bound, 2 = sup bound
    double witness_point = 0.0;
    double exterior_margin = 0.0;  // min over exterior nodes of phi - 1 - correction
    double sup_margin = 0.0;       // min over all nodes of l^2 - |phi| - correction
    double slope = 0.0;            // 2 pi sum |k phi_k|
    long grid = 0;
};

// Smooth a mean-zero step profile with a Fejer kernel of order L and tune
// (order, margin) until both witness bounds certify. The step dips on a
// sub-interval of [0, 1/l] shrunk inward by `shrink` = 1/(8l); smoothing a
// dip reaching the interval endpoints cannot stay above 1 arbitrarily close
// to the jump, so the dip is kept strictly inside. Returns the certified
// polynomial; `certificate`, when given, receives the successful record.
TrigPoly build_witness(long l, long grid_density,
                       WitnessCertificate* certificate = nullptr,
                       long degree_cap = 1 << 15);

// Certified point evaluation (exact coefficients, enclosed angles).
PrecReal eval(const TrigPoly& poly, const PrecReal& y);

// Grid-plus-Lipschitz certification of both witness bounds. Requires
// grid_density >= 4 * degree * l. FALSE names the violated bound and a
// witness node.
WitnessCertificate verify_witness(const TrigPoly& poly, long l,
                                  long grid_density);

// CSV rows "k,cos_coef,sin_coef" (one per 1 <= k < L).
std::string witness_csv(const TrigPoly& poly);

}  // namespace rigidity

#endif
