#ifndef ELBCHAIN_ESTIMATE_HPP
#define ELBCHAIN_ESTIMATE_HPP

/*
 * Penalized minimum distance against conditional-expectations data. The
 * objective stacks weighted model-minus-data expectation gaps G and returns
 *     G' W G  +  tau_e * E  +  tau_ell * (ell - ell_data)^2
 * where E is an equilibrium-error penalty (defaults to the squared max
 * linear residual, which is ~0 for any valid solution and only bites with a
 * user-supplied evaluator) and the last term pins the model-implied bound
 * duration to its observed counterpart. The square on the duration gap can
 * be switched to an indicator.
 */

#include "elbchain/model.hpp"
#include "elbchain/nkhabits.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace elb {

struct ExpectationRow {
    std::string variable;
    int horizon = 0;
    double value = 0.0;
    double weight = 1.0;
};

struct ExpectationsData {
    std::vector<ExpectationRow> rows;
    int ell_data = 1;  // observed expected bound duration (periods)
};

struct FreeParam {
    std::string name;
    double lower = 0.0;
    double upper = 1.0;
};

// External equilibrium-error evaluator: full parameter map plus the implied
// expectation paths, returns a scalar >= 0.
using EulerOracle = std::function<double(const std::map<std::string, double>&,
                                         const std::map<std::string, Vec>&)>;

struct EstimationConfig {
    std::vector<FreeParam> free_params;
    std::map<std::string, double> fixed;  // overrides for any parameter, incl. w_b0 / w_s0
    Mat weight_matrix;                    // empty -> identity over data rows
    double tau_e = 1000.0;
    double tau_ell = 1000.0;
    bool indicator_duration = false;  // tau_ell * 1{ell != ell_data} instead of the square
    int restarts = 8;
    int max_evaluations = 2000;  // per restart
    double tolerance = 1e-10;    // absolute simplex spread
    std::uint64_t seed = 0;
    EulerOracle euler_oracle;  // unset -> linear-residual surrogate
};

struct ObjectiveValue {
    double total = 0.0;
    double fit = 0.0;
    double euler = 0.0;
    double duration = 0.0;
    int ell_model = 0;
    bool ok = true;      // false: solver failed inside, total is +inf
    std::string reason;  // failure description when !ok
};

struct EstimationResult {
    Vec theta_md;
    std::vector<std::string> names;  // matches theta_md ordering
    ObjectiveValue best;
    std::vector<double> trace;  // accepted best objective values, non-increasing
    int evaluations = 0;
    bool improved = false;  // best strictly beat the first evaluated point
};

// Known parameter names: the habit-model fields (sigma, beta, kappa, eta, h,
// s_c, s_g, phi_pi, phi_y, phi_xi, r_lower, p_b, p_s) plus the date-t shock
// loadings w_b0 and w_s0. Freeing s_c without fixing s_g keeps s_g = 1 - s_c.
std::map<std::string, double> default_parameter_map();
HabitsParams params_from_map(const std::map<std::string, double>& values, double* w_b0,
                             double* w_s0);

// Expected paths n = 0..horizon for every model variable, the backward
// variable, the shocks and (with a rate rule) the nominal rate, from the
// spell-of-ell chain.
std::map<std::string, Vec> model_expectations(const ModelSpec& model, int ell, int horizon,
                                              double w_b0, double w_s0);
// Same, plus the output mapping "y" = s_c * c + s_g * g.
std::map<std::string, Vec> model_expectations(const HabitsParams& params, int ell, int horizon,
                                              double w_b0, double w_s0);

ObjectiveValue objective(const Vec& theta, const ExpectationsData& data,
                         const EstimationConfig& config);

EstimationResult minimize(const ExpectationsData& data, const EstimationConfig& config);

// CSV layout: variable,horizon,value,weight (any column order).
ExpectationsData ingest_csv(const std::string& path);
void export_csv(const ExpectationsData& data, const std::string& path);

} // namespace elb

#endif
