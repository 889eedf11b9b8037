#include "elbchain/estimate.hpp"
#include "elbchain/chain.hpp"
#include "elbchain/csv.hpp"
#include "elbchain/errors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace elb {

namespace {

const char* kParamNames[] = {"sigma", "beta",  "kappa",  "eta",    "h",
                             "s_c",   "s_g",   "phi_pi", "phi_y",  "phi_xi",
                             "r_lower", "p_b", "p_s",    "w_b0",   "w_s0"};

bool known_param(const std::string& name) {
    for (const char* n : kParamNames)
        if (name == n) return true;
    return false;
}

// Defaults + fixed overrides + free values, with the budget-share implication
// s_g = 1 - s_c when only s_c is pinned by the configuration.
std::map<std::string, double> assemble_values(const Vec& theta, const EstimationConfig& cfg) {
    std::map<std::string, double> values = default_parameter_map();
    bool set_sc = false, set_sg = false;
    for (const auto& [name, v] : cfg.fixed) {
        if (!known_param(name)) throw std::invalid_argument("unknown parameter '" + name + "'");
        values[name] = v;
        set_sc |= (name == "s_c");
        set_sg |= (name == "s_g");
    }
    for (size_t i = 0; i < cfg.free_params.size(); ++i) {
        const std::string& name = cfg.free_params[i].name;
        if (!known_param(name)) throw std::invalid_argument("unknown parameter '" + name + "'");
        values[name] = theta[static_cast<Eigen::Index>(i)];
        set_sc |= (name == "s_c");
        set_sg |= (name == "s_g");
    }
    if (set_sc && !set_sg) values["s_g"] = 1.0 - values["s_c"];
    return values;
}

ObjectiveValue sentinel(const std::string& reason) {
    ObjectiveValue v;
    v.ok = false;
    v.reason = reason;
    v.total = std::numeric_limits<double>::infinity();
    return v;
}

bool lex_less(const Vec& a, const Vec& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return false;
}

} // namespace

std::map<std::string, double> default_parameter_map() {
    HabitsParams d;
    return {{"sigma", d.sigma},     {"beta", d.beta},     {"kappa", d.kappa},
            {"eta", d.eta},         {"h", d.h},           {"s_c", d.s_c},
            {"s_g", d.s_g},         {"phi_pi", d.phi_pi}, {"phi_y", d.phi_y},
            {"phi_xi", d.phi_xi},   {"r_lower", d.r_lower}, {"p_b", d.p_b},
            {"p_s", d.p_s},         {"w_b0", -0.02},      {"w_s0", 0.0}};
}

HabitsParams params_from_map(const std::map<std::string, double>& values, double* w_b0,
                             double* w_s0) {
    HabitsParams p;
    auto get = [&](const char* name, double fallback) {
        auto it = values.find(name);
        return it == values.end() ? fallback : it->second;
    };
    p.sigma = get("sigma", p.sigma);
    p.beta = get("beta", p.beta);
    p.kappa = get("kappa", p.kappa);
    p.eta = get("eta", p.eta);
    p.h = get("h", p.h);
    p.s_c = get("s_c", p.s_c);
    p.s_g = get("s_g", p.s_g);
    p.phi_pi = get("phi_pi", p.phi_pi);
    p.phi_y = get("phi_y", p.phi_y);
    p.phi_xi = get("phi_xi", p.phi_xi);
    p.r_lower = get("r_lower", p.r_lower);
    p.p_b = get("p_b", p.p_b);
    p.p_s = get("p_s", p.p_s);
    if (w_b0) *w_b0 = get("w_b0", -0.02);
    if (w_s0) *w_s0 = get("w_s0", 0.0);
    return p;
}

std::map<std::string, Vec> model_expectations(const ModelSpec& model, int ell, int horizon,
                                              double w_b0, double w_s0) {
    ChainSolution sol = assemble_states(model, ell, w_b0, w_s0, PostExitRule::taylor, false);
    std::map<std::string, Vec> out;
    auto path_of = [&](const Vec& s_z) {
        Vec p(horizon + 1);
        for (int n = 0; n <= horizon; ++n) p[n] = expected_path(sol.spec, s_z, n);
        return p;
    };
    for (int i = 0; i < model.n; ++i) {
        std::string name = i < static_cast<int>(model.variable_names.size())
                               ? model.variable_names[i]
                               : "y" + std::to_string(i);
        out[name] = path_of(sol.y_states.row(i).transpose());
    }
    out[model.x_name.empty() ? "x" : model.x_name] = path_of(sol.x_states);
    out["w_b"] = path_of(sol.wb_states);
    out["w_s"] = path_of(sol.ws_states);
    if (sol.rate_states.size() > 0) out["r"] = path_of(sol.rate_states);
    return out;
}

std::map<std::string, Vec> model_expectations(const HabitsParams& params, int ell, int horizon,
                                              double w_b0, double w_s0) {
    ModelSpec model = build_model(params);
    auto out = model_expectations(model, ell, horizon, w_b0, w_s0);
    out["y"] = params.s_c * out.at("c") + params.s_g * out.at("w_s");
    return out;
}

ObjectiveValue objective(const Vec& theta, const ExpectationsData& data,
                         const EstimationConfig& config) {
    if (theta.size() != static_cast<Eigen::Index>(config.free_params.size()))
        throw std::invalid_argument("theta length does not match the free-parameter list");
    const Eigen::Index m = static_cast<Eigen::Index>(data.rows.size());
    if (config.weight_matrix.size() > 0 &&
        (config.weight_matrix.rows() != m || config.weight_matrix.cols() != m))
        throw std::invalid_argument("weight matrix does not match the number of data rows");

    std::map<std::string, double> values = assemble_values(theta, config);

    ObjectiveValue out;
    try {
        double w_b0 = 0.0, w_s0 = 0.0;
        HabitsParams params = params_from_map(values, &w_b0, &w_s0);
        ModelSpec model = build_model(params);
        out.ell_model = find_duration(model, w_b0, w_s0);

        int horizon = 0;
        for (const auto& r : data.rows) horizon = std::max(horizon, r.horizon);
        auto paths = model_expectations(params, out.ell_model, horizon, w_b0, w_s0);

        Vec gaps(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const ExpectationRow& row = data.rows[i];
            auto it = paths.find(row.variable);
            if (it == paths.end()) return sentinel("unknown variable '" + row.variable + "'");
            gaps[i] = row.weight * (it->second[row.horizon] - row.value);
        }
        out.fit = config.weight_matrix.size() > 0
                      ? double(gaps.transpose() * config.weight_matrix * gaps)
                      : gaps.squaredNorm();

        if (config.euler_oracle) {
            out.euler = config.tau_e * config.euler_oracle(values, paths);
        } else {
            ChainSolution sol =
                assemble_states(model, out.ell_model, w_b0, w_s0, PostExitRule::taylor, false);
            double worst = 0.0;
            for (const auto& [key, r] : equilibrium_residuals(sol, model, 20))
                worst = std::max(worst, r);
            out.euler = config.tau_e * worst * worst;
        }

        double gap = out.ell_model - data.ell_data;
        out.duration =
            config.indicator_duration ? (gap != 0.0 ? config.tau_ell : 0.0)
                                      : config.tau_ell * gap * gap;
        out.total = out.fit + out.euler + out.duration;
    } catch (const std::exception& e) {
        return sentinel(e.what());
    }
    return out;
}

EstimationResult minimize(const ExpectationsData& data, const EstimationConfig& config) {
    const int d = static_cast<int>(config.free_params.size());
    if (d < 1) throw std::invalid_argument("at least one free parameter required");
    if (data.rows.empty()) throw std::invalid_argument("no data rows");
    for (const auto& fp : config.free_params) {
        if (!(std::isfinite(fp.lower) && std::isfinite(fp.upper) && fp.lower < fp.upper))
            throw std::invalid_argument("bounds for '" + fp.name + "' must be finite and ordered");
    }
    if (config.weight_matrix.size() > 0) {
        const Mat& W = config.weight_matrix;
        if ((W - W.transpose()).cwiseAbs().maxCoeff() > 1e-12)
            throw std::invalid_argument("weight matrix must be symmetric");
        Eigen::SelfAdjointEigenSolver<Mat> es(W);
        if (es.eigenvalues().minCoeff() < -1e-10)
            throw std::invalid_argument("weight matrix must be positive semidefinite");
    }

    Vec lo(d), hi(d);
    for (int i = 0; i < d; ++i) {
        lo[i] = config.free_params[i].lower;
        hi[i] = config.free_params[i].upper;
    }
    auto clamp = [&](Vec x) {
        for (int i = 0; i < d; ++i) x[i] = std::min(hi[i], std::max(lo[i], x[i]));
        return x;
    };

    EstimationResult result;
    for (const auto& fp : config.free_params) result.names.push_back(fp.name);

    bool have_best = false, have_first = false;
    double first_total = 0.0;
    Vec best_theta;
    ObjectiveValue best_value;

    auto evaluate = [&](const Vec& x) {
        ObjectiveValue v = objective(x, data, config);
        ++result.evaluations;
        if (!have_first) {
            have_first = true;
            first_total = v.total;
        }
        bool better = !have_best || v.total < best_value.total ||
                      (v.total == best_value.total && lex_less(x, best_theta));
        if (better) {
            if (!have_best || v.total < best_value.total) result.trace.push_back(v.total);
            have_best = true;
            best_value = v;
            best_theta = x;
        }
        return v.total;
    };

    // Jittered starts are drawn up front so the search path is a pure
    // function of the seed.
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vec> starts;
    for (int r = 0; r < std::max(1, config.restarts); ++r) {
        Vec s(d);
        for (int i = 0; i < d; ++i)
            s[i] = r == 0 ? 0.5 * (lo[i] + hi[i]) : lo[i] + (hi[i] - lo[i]) * unit(rng);
        starts.push_back(s);
    }

    for (const Vec& start : starts) {
        // Simplex: start plus one vertex shifted 10% of the range per axis.
        std::vector<Vec> xs(d + 1);
        std::vector<double> fs(d + 1);
        xs[0] = clamp(start);
        for (int i = 0; i < d; ++i) {
            Vec v = xs[0];
            double step = 0.1 * (hi[i] - lo[i]);
            v[i] = (v[i] + step <= hi[i]) ? v[i] + step : v[i] - step;
            xs[i + 1] = clamp(v);
        }
        int evals = 0;
        for (int i = 0; i <= d; ++i) fs[i] = evaluate(xs[i]), ++evals;

        while (evals < config.max_evaluations) {
            // Order vertices: best first, deterministic tie-break.
            std::vector<int> idx(d + 1);
            for (int i = 0; i <= d; ++i) idx[i] = i;
            std::sort(idx.begin(), idx.end(), [&](int a, int b) {
                if (fs[a] != fs[b]) return fs[a] < fs[b];
                return lex_less(xs[a], xs[b]);
            });
            std::vector<Vec> ox(d + 1);
            std::vector<double> of(d + 1);
            for (int i = 0; i <= d; ++i) ox[i] = xs[idx[i]], of[i] = fs[idx[i]];
            xs = ox;
            fs = of;

            double spread_f = 0.0, spread_x = 0.0;
            for (int i = 1; i <= d; ++i) {
                if (std::isfinite(fs[i]) && std::isfinite(fs[0]))
                    spread_f = std::max(spread_f, std::abs(fs[i] - fs[0]));
                spread_x = std::max(spread_x, (xs[i] - xs[0]).cwiseAbs().maxCoeff());
            }
            if (std::max(spread_f, spread_x) < config.tolerance && std::isfinite(fs[0])) break;

            Vec centroid = Vec::Zero(d);
            for (int i = 0; i < d; ++i) centroid += xs[i];
            centroid /= d;

            Vec xr = clamp(centroid + (centroid - xs[d]));
            double fr = evaluate(xr);
            ++evals;
            if (fr < fs[0]) {
                Vec xe = clamp(centroid + 2.0 * (centroid - xs[d]));
                double fe = evaluate(xe);
                ++evals;
                if (fe < fr) {
                    xs[d] = xe;
                    fs[d] = fe;
                } else {
                    xs[d] = xr;
                    fs[d] = fr;
                }
            } else if (fr < fs[d - 1]) {
                xs[d] = xr;
                fs[d] = fr;
            } else {
                bool outside = fr < fs[d];
                Vec xc = outside ? clamp(centroid + 0.5 * (xr - centroid))
                                 : clamp(centroid + 0.5 * (xs[d] - centroid));
                double fc = evaluate(xc);
                ++evals;
                if (fc < std::min(fr, fs[d])) {
                    xs[d] = xc;
                    fs[d] = fc;
                } else {
                    for (int i = 1; i <= d; ++i) {
                        xs[i] = clamp(xs[0] + 0.5 * (xs[i] - xs[0]));
                        fs[i] = evaluate(xs[i]);
                        ++evals;
                        if (evals >= config.max_evaluations) break;
                    }
                }
            }
        }
    }

    result.theta_md = best_theta;
    result.best = best_value;
    result.improved = have_best && best_value.total < first_total;
    return result;
}

ExpectationsData ingest_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    int cv = column_index(t, "variable");
    int ch = column_index(t, "horizon");
    int cval = column_index(t, "value");
    int cw = column_index(t, "weight");
    if (cv < 0) throw MissingColumn("missing column 'variable'");
    if (ch < 0) throw MissingColumn("missing column 'horizon'");
    if (cval < 0) throw MissingColumn("missing column 'value'");
    if (cw < 0) throw MissingColumn("missing column 'weight'");
    if (t.rows.empty()) throw ParseError(path + ": no data rows", 1);

    ExpectationsData data;
    for (size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        const int line = static_cast<int>(i) + 2;  // header is line 1
        ExpectationRow row;
        row.variable = r[cv];
        long h = parse_long(r[ch], line);
        if (h < 0) throw ParseError("horizon must be nonnegative", line);
        row.horizon = static_cast<int>(h);
        row.value = parse_double(r[cval], line);
        row.weight = parse_double(r[cw], line);
        if (row.weight < 0) throw ParseError("weight must be nonnegative", line);
        data.rows.push_back(row);
    }
    return data;
}

void export_csv(const ExpectationsData& data, const std::string& path) {
    CsvTable t;
    t.header = {"variable", "horizon", "value", "weight"};
    for (const auto& r : data.rows)
        t.rows.push_back({r.variable, std::to_string(r.horizon), format_double(r.value),
                          format_double(r.weight)});
    write_csv(path, t);
}

} // namespace elb
