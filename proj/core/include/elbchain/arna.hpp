#ifndef ELBCHAIN_ARNA_HPP
#define ELBCHAIN_ARNA_HPP

/*
 * Guess-and-verify perfect-foresight solver with the policy rule
 * reactivating on exit (the rule-on-exit comparator). The binding set is
 * iterated OccBin-style: solve under the current regime guess by backward
 * induction from the unconstrained terminal law of motion, then re-guess
 * from where the rule-implied rate violates the floor.
 */

#include "elbchain/model.hpp"

#include <vector>

namespace elb {

struct MsvCoefficients {
    Vec theta_x;         // Y_t loading on x_{t-1}
    Vec theta_b, theta_s;
    double q = 0.0;      // x_t = q x_{t-1} + gamma_b w_b + gamma_s w_s
    double gamma_b = 0.0, gamma_s = 0.0;
};

struct ArnaPath {
    Mat y;      // horizon x N
    Vec x;      // horizon
    Vec rate;   // horizon; r_lower inside the binding window, rule value outside
    Vec wb, ws; // deterministic AR shock paths
    int ell_realized = 0;
    int iterations = 0;
};

// Unconstrained law of motion Y_t = theta_x x_{t-1} + theta_b w_b + theta_s w_s
// by undetermined coefficients; the persistence q is cross-checked against the
// generalized-eigenvalue count (exactly one stable root required).
MsvCoefficients msv_unconstrained(const ModelSpec& model);

// Path under a fixed per-period regime guess (true = bound). Exposed so the
// window iteration and exhaustive window searches share one backward pass.
ArnaPath solve_given_regimes(const ModelSpec& model, const MsvCoefficients& msv,
                             double w_b0, double w_s0,
                             const std::vector<bool>& bound);

// Full guess-and-verify iteration; at most 100 window updates. The last 20
// periods must come out slack or HorizonTooShort is thrown.
ArnaPath solve_occbin(const ModelSpec& model, double w_b0, double w_s0, int horizon);

// Impact response to the scenario shock with the binding window held at ell:
// calibrates a baseline shock whose realized window is exactly ell (midpoint
// of the plateau in shock size), then one-sided differences solve_occbin.
Vec arna_multiplier(const ModelSpec& model, int ell, double eps);

} // namespace elb

#endif
