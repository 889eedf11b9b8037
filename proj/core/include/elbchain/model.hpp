#ifndef ELBCHAIN_MODEL_HPP
#define ELBCHAIN_MODEL_HPP

// Two-regime piecewise-linear model with N forward variables Y, one scalar
// backward variable x, and two AR(1) shocks:
//
//   Y_t = A E_t Y_{t+1} + B x_t + C_b w_b,t + C_s w_s,t (+ E at the bound)
//   x_t = rho x_{t-1} + D Y_t
//
// The bound regime carries the intercept E (the pinned policy rate); the
// normal regime has the policy rule already substituted in and E = 0.

#include "elbchain/qme.hpp"

#include <optional>
#include <string>
#include <vector>

namespace elb {

struct RegimeMatrices {
    Mat a;    // N x N
    Vec b;    // N x 1
    Vec c_b;  // N x 1
    Vec c_s;  // N x 1
    Vec e;    // N x 1, zero outside the bound regime
};

// Reconstruction of the nominal rate from model variables, used for
// shadow-rate checks and post-exit rate states:
//   r_t = on_y . Y_t + on_x * x_t + on_wb * w_b,t + on_ws * w_s,t
struct PolicyRule {
    RowVec on_y;
    double on_x = 0.0;
    double on_wb = 0.0;
    double on_ws = 0.0;
};

struct ModelSpec {
    int n = 0;
    RegimeMatrices elb;     // bound regime
    RegimeMatrices normal;  // rule substituted, e == 0
    RowVec d;               // 1 x N
    double rho = 0.0;       // persistence of x, in [0,1)
    double p_b = 0.0;       // baseline-shock persistence, in (0,1)
    double p_s = 0.0;       // scenario-shock persistence, in (0,1)
    double r_lower = 0.0;   // rate floor, < 0 in deviations
    std::vector<std::string> variable_names;
    std::string x_name = "x";  // label of the backward variable
    std::optional<PolicyRule> rate_rule;
};

struct StructuralForm {
    Mat a0, a1;
    Vec b0, c0_b, c0_s, e0;
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> violations;
};

// a0 Y_t = a1 E_t Y_{t+1} + b0 x_t + ...  ->  reduced matrices a0^{-1}(.)
RegimeMatrices reduce(const StructuralForm& structural, double condition_cap = 1e12);

// Total check of all ModelSpec invariants; never throws.
ValidationReport validate(const ModelSpec& spec);

// JSON model files, keys: n, a_star, b_star, c_b_star, c_s_star, e_star,
// a, b, c_b, c_s, d, rho, p_b, p_s, r_lower, variable_names, and optionally
// rate_rule {on_y, on_x, on_wb, on_ws}. Matrices are row-major arrays.
ModelSpec load_model(const std::string& path);
void save_model(const ModelSpec& spec, const std::string& path);
ModelSpec model_from_json_text(const std::string& text);
std::string model_to_json_text(const ModelSpec& spec);

} // namespace elb

#endif
