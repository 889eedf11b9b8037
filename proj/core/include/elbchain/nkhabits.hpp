#ifndef ELBCHAIN_NKHABITS_HPP
#define ELBCHAIN_NKHABITS_HPP

/*
 * New Keynesian block with consumption habits: marginal utility and inflation
 * are the forward variables, consumption is the backward one,
 *     lambda_t = E lambda_{t+1} + E pi_{t+1} + xi_t - r_t
 *     pi_t     = beta E pi_{t+1} + kappa [lambda_t + eta (s_c c_t + s_g g_t)]
 *     c_t      = h c_{t-1} + (1-h)/sigma * lambda_t
 * with r_t = max(r_lower, phi_pi pi_t + phi_xi xi_t + phi_y (s_c c_t + s_g g_t)).
 * Beyond the generic machinery this module carries the one-period-spell
 * restriction system in explicit form, the everlasting-bound persistence q*,
 * impact-period AD/AS lines, and the scenario-persistence threshold where
 * their slopes cross.
 */

#include "elbchain/model.hpp"

namespace elb {

struct HabitsParams {
    double sigma = 1.0;
    double beta = 0.99;
    double kappa = 0.05;
    double eta = 1.0;
    double h = 0.5;
    double s_c = 0.8;
    double s_g = 0.2;
    double phi_pi = 1.5;
    double phi_y = 0.0;
    double phi_xi = 0.0;
    double r_lower = -0.01;
    double p_b = 0.8;
    double p_s = 0.8;
};

// The default-constructed values above are the bench calibration used across
// the test suite (conventional quarterly NK magnitudes).
inline HabitsParams desk_calibration() { return HabitsParams{}; }

// Field ranges plus a determinacy check on the rule-substituted regime.
ValidationReport validate(const HabitsParams& params);

ModelSpec build_model(const HabitsParams& params);

// One-period-spell state values (three active states each; the absorbing
// fourth state is identically zero).
struct Ell1States {
    Vec c, lambda, pi, rate;  // length 3
    double s_xi2 = 0.0;       // implied second baseline-shock state
};

// Solves the nine-restriction linear system for a spell of one period with
// the rule reactivating on exit. q is the exit persistence of the
// rule-substituted regime.
Ell1States restrictions_ell1(const HabitsParams& params, double q, double s_xi1, double s_g1);

// Everlasting-bound exit persistence: same fixed-point equation as the exit
// q but on the bound-regime matrices.
double solve_qstar(const HabitsParams& params);

enum class AsAdMode { ell1, ell_inf };

struct AsAdLines {
    double ad_slope = 0.0, ad_intercept = 0.0;
    double as_slope = 0.0, as_intercept = 0.0;
    double as_g_shift = 0.0;   // d(AS intercept) / d(scenario shock)
    double as_xi_shift = 0.0;  // d(AS intercept) / d(baseline shock)
    double q_used = 0.0;
    AsAdMode mode = AsAdMode::ell1;
};

// Impact-period demand and supply lines in (pi_1, c_1) coordinates,
// c_1 = slope * pi_1 + intercept. The demand line drops the impact Phillips
// restriction and re-solves the rest with pi_1 swept over two values; the
// supply line drops the impact consumption-Euler restriction symmetrically.
// In ell_inf mode the rate is pegged in every state and q should be q*;
// rate_zero selects the peg-at-zero bookkeeping convention instead of
// peg-at-r_lower (slopes are unaffected, intercepts move).
AsAdLines asad_lines(const HabitsParams& params, double q_or_qstar, double s_xi1, double s_g1,
                     AsAdMode mode, bool rate_zero = false);

// Scenario persistence at which the everlasting-bound AD and AS slopes cross,
// found by bracketing + bisection over p_s in (0,1) at fixed q value.
double threshold_pbar_at(const HabitsParams& params, double q_value);

// Same, evaluated at q* (the threshold that matches 1/spectral_radius(X)).
double threshold_pbar(const HabitsParams& params);

} // namespace elb

#endif
