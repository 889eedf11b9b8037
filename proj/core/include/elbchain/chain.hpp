#ifndef ELBCHAIN_CHAIN_HPP
#define ELBCHAIN_CHAIN_HPP

/*
 * Markov-chain representation of bound-exit dynamics.
 *
 * A spell of ell binding periods is encoded with ell+3 states: ell-1
 * deterministic lead-in states, one last binding state that lingers with
 * probability p_s, one post-exit state that decays with p_b, one exit state
 * with endogenous persistence q, and an absorbing steady state (the origin,
 * except under peg_rlower where the peg intercept moves the steady state).
 * Expected paths are u P^n S_z. All state values are solved jointly from one
 * dense linear system: the backward-variable identities plus the
 * regime-specific forward equations, state by state.
 */

#include "elbchain/model.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace elb {

// Restriction applied to the two post-exit states.
//   taylor     - normal-regime (rule-substituted) matrices, rate states from
//                the reconstruction rule. The standard finite-spell solution.
//   peg_rlower - bound-regime matrices everywhere, rate pegged at r_lower;
//                uses the bound-regime q. The everlasting-bound variant.
//   peg_zero   - same but rate pegged at zero (intercept dropped).
//   arna_msv   - deterministic spell of exactly ell periods closed with the
//                unconstrained minimum-state-variable law at exit; shocks
//                decay geometrically with no lingering correction. This
//                reproduces a fixed-window piecewise solve, so impact states
//                match the guess-and-verify path solver. Post-exit columns
//                hold the first two continuation periods; expected paths are
//                only meaningful up to n = ell+1 (the chain truncates to the
//                absorbing state afterwards while the true continuation
//                keeps decaying).
enum class PostExitRule { taylor, peg_rlower, peg_zero, arna_msv };

struct ChainSpec {
    Vec u;         // initial distribution, unit mass on state 1
    Mat p_matrix;  // (ell+3) x (ell+3), row-stochastic
    double q = 0.0;
    int ell = 1;
};

struct ChainSolution {
    ChainSpec spec;
    int ell = 1;
    double gamma = 0.0;             // (p_b - p_s) / (1 - p_s)
    double w_b0 = 0.0, w_s0 = 0.0;
    PostExitRule rule = PostExitRule::taylor;
    Mat y_states;                   // N x (ell+3), last column the absorbing state
    Vec x_states;                   // ell+3
    Vec wb_states, ws_states;       // ell+3
    Vec rate_states;                // ell+3, empty when no rate rule is attached
    double condition_estimate = 0.0;
    bool ill_conditioned = false;   // condition estimate above 1e10

    std::map<std::string, Vec> state_map(const ModelSpec& model) const;
};

struct SimResult {
    Vec mean;  // horizon+1 entries, n = 0..horizon
    Vec se;    // standard error of the mean per horizon
    int runs = 0;
};

struct QDiagnostics {
    double q = 0.0;
    std::vector<std::complex<double>> poly_roots;  // all roots of the cleared polynomial
    double residual = 0.0;                         // |q - rho - q D (I-qA)^{-1} B|
    int stable_pencil_count = 0;                   // generalized eigenvalues inside the unit circle
    double stable_pencil_root = 0.0;               // the stable one, when unique
};

// Exit persistence: the root of q = rho + q D (I - qA)^{-1} B selected by
// continuity from q(rho=0)=0 along a 100-step homotopy in rho. The cleared
// polynomial (q-rho)det(I-qA) - q D adj(I-qA) B is solved by companion-matrix
// rootfinding. Throws NoAdmissibleRoot / ComplexExitDynamics.
double solve_q(const Mat& a, const Vec& b, const RowVec& d, double rho);

// Same, plus the root list and an independent cross-check: the candidates are
// exactly the generalized eigenvalues of the pencil
// lambda blkdiag(1, A) - [[rho, D], [-rho B, I - BD]], and under determinacy
// the unique stable one must equal q.
QDiagnostics solve_q_diag(const Mat& a, const Vec& b, const RowVec& d, double rho);

// Transition matrix with a deterministic lead-in and the 4-state core.
ChainSpec build_transition(double p_s, double p_b, double q, int ell);

// Occupation probabilities u P^n.
Vec occupation(const ChainSpec& spec, int n);

// u P^n S_z.
double expected_path(const ChainSpec& spec, const Vec& s_z, int n);

// Solve all state values for a spell of the given length. When verify_elb is
// set (and the model has a rate rule), checks that the reconstructed rate is
// at the floor during the spell and strictly above it afterwards, throwing
// ElbVerificationFailed otherwise. Eternal-peg modes skip the check.
ChainSolution assemble_states(const ModelSpec& model, int ell, double w_b0, double w_s0,
                              PostExitRule rule = PostExitRule::taylor,
                              bool verify_elb = true);

// Smallest ell in 1..ell_max whose assembled solution passes verification.
int find_duration(const ModelSpec& model, double w_b0, double w_s0, int ell_max = 40);

// Seeded Monte-Carlo average of chain realizations.
SimResult simulate_chain(const ChainSpec& spec, const Vec& s_z, int runs, int horizon,
                         std::uint64_t seed);

// Max-abs residuals: keyed "bound_regime" (state-wise, states 1..ell),
// "normal_regime" (state-wise, post-exit states), "backward" (expected-path
// identity for n = 0..horizon), "shock_baseline", "shock_scenario"
// (geometric-decay checks).
std::map<std::string, double> equilibrium_residuals(const ChainSolution& sol,
                                                    const ModelSpec& model, int horizon);

// Expected rate path u P^n S_r; equals r_lower for n < ell.
double peg_path(const ChainSolution& sol, int n);

} // namespace elb

#endif
