#ifndef ELBCHAIN_MULTIPLIER_HPP
#define ELBCHAIN_MULTIPLIER_HPP

/*
 * Impact-multiplier sequences M(ell): the derivative of impact-period
 * expectations with respect to the scenario shock, as a function of the
 * number of binding periods. Two initial conditions are supported: "peg"
 * (the chain method's own continuation) and "arna" (the rule-on-exit
 * comparator). Both evolve under the same recursion
 *     M(ell) = (A*)^{-1} X_{ell-1} [C*_s + p_s A* M(ell-1)],
 *     X_ell  = A* (I - B*D + rho A* - rho X_{ell-1})^{-1},
 * and the limit, threshold p^D = 1/rho(X_underbar) and sink/saddle class
 * come from the quadratic-matrix-equation solvents.
 */

#include "elbchain/model.hpp"
#include "elbchain/qme.hpp"

#include <vector>

namespace elb {

enum class Flavor { peg, arna };

struct InitialConditions {
    Vec m1;   // M(1)
    Mat x1;   // X_1
    Flavor flavor = Flavor::peg;
};

struct MultiplierSequence {
    std::vector<Vec> values;  // M(1)..M(L)
    std::vector<Mat> x_path;  // X_1..X_{L-1}
    Flavor flavor = Flavor::peg;
};

enum class StabilityClass { sink, saddle, boundary };

struct StabilityReport {
    Mat x_underbar;                 // limit of the X recursion, (S1^T)^{-1}
    double rho_psx = 0.0;           // spectral radius of p_s * x_underbar
    StabilityClass classification = StabilityClass::sink;
    double p_threshold = 0.0;       // p^D = 1 / rho(x_underbar)
    Vec limit;                      // closed-form limit multiplier M
    bool peg_converges = true;      // peg sequence converges in both classes
    bool arna_converges = true;     // false in the saddle class
};

// q is the exit persistence of the rule-reactivated regime (chain::solve_q on
// the normal matrices). rho = 0 routes to the no-endogenous-persistence
// closed forms instead of the formulas that divide by rho.
InitialConditions initial_conditions(const ModelSpec& model, double q, Flavor flavor);

// Plain forward recursion; exact in exact arithmetic but amplifies roundoff
// in the saddle case, so keep length moderate there (see solvent_path).
MultiplierSequence recurse(const InitialConditions& init, const ModelSpec& model, int length);

// Exact solvent-based evaluation of M(ell) for selected ells: algebraically
// identical to recurse but numerically stable at large ell. Uses
// X_j^T = K_{j-1}^T (K_j^T)^{-1}, K_j^T = S1^j C1 + S2^j C2, which turns the
// recursion into geometric sums in S1, S2 and p_s.
std::vector<Vec> solvent_path(const InitialConditions& init, const ModelSpec& model,
                              const std::vector<int>& ells);

StabilityReport limit_multiplier(const ModelSpec& model);

// One-sided difference of impact states with the spell length held fixed:
// peg flavor differences assemble_states, arna flavor defers to the
// rule-on-exit solver. eps is step-halved internally as a consistency check.
// verify_duration re-derives the spell length under base and shifted shocks
// and throws DurationChanged if they differ (needs a rate rule).
Vec finite_difference_multiplier(const ModelSpec& model, int ell, double eps, Flavor flavor,
                                 bool verify_duration = false, double w_b0 = 1.0);

// The saddle-path expression C1^T(p_s I-S1^T)^{-1}C*_s + C2^T(p_s I-S2^T)^{-1}C*_s
// + A* M(1), evaluated at the peg initial condition; zero in exact arithmetic.
Vec saddle_bracket(const ModelSpec& model, double q);

// First index (1-based ell) at which the sequence norm exceeds 1e6 after
// growing for 20 consecutive steps; -1 if it never does.
int divergence_index(const MultiplierSequence& seq);

} // namespace elb

#endif
