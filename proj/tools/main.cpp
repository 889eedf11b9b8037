// Command-line front end: wires JSON configs to the chain solver, multiplier
// recursions, stability/AS-AD analysis, the path comparator, the estimator,
// and the chain simulator. Emits deterministic CSV tables only.
//
// Exit codes: 0 success, 1 configuration or user error, 2 solver failure.

#include <elbchain/arna.hpp>
#include <elbchain/chain.hpp>
#include <elbchain/csv.hpp>
#include <elbchain/errors.hpp>
#include <elbchain/estimate.hpp>
#include <elbchain/model.hpp>
#include <elbchain/multiplier.hpp>
#include <elbchain/nkhabits.hpp>
#include <elbchain/qme.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace elb;

namespace {

struct Options {
    std::string config_path;
    std::string out_dir = "out";
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
};

json load_config(const Options& opt) {
    if (opt.config_path.empty()) return json::object();
    if (!fs::exists(opt.config_path))
        throw std::invalid_argument("config file not found: " + opt.config_path);
    std::ifstream in(opt.config_path);
    return json::parse(in);
}

HabitsParams habits_from_json(const json& j) {
    static const std::vector<std::string> keys = {
        "sigma", "beta", "kappa", "eta",     "h",       "s_c", "s_g",
        "phi_pi", "phi_y", "phi_xi", "r_lower", "p_b",  "p_s"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw std::invalid_argument("unknown habits parameter '" + key + "'");
    }
    HabitsParams p;
    p.sigma = j.value("sigma", p.sigma);
    p.beta = j.value("beta", p.beta);
    p.kappa = j.value("kappa", p.kappa);
    p.eta = j.value("eta", p.eta);
    p.h = j.value("h", p.h);
    p.s_c = j.value("s_c", p.s_c);
    p.s_g = j.value("s_g", p.s_g);
    p.phi_pi = j.value("phi_pi", p.phi_pi);
    p.phi_y = j.value("phi_y", p.phi_y);
    p.phi_xi = j.value("phi_xi", p.phi_xi);
    p.r_lower = j.value("r_lower", p.r_lower);
    p.p_b = j.value("p_b", p.p_b);
    p.p_s = j.value("p_s", p.p_s);
    return p;
}

ModelSpec model_from_config(const json& cfg) {
    if (cfg.contains("model") && cfg.contains("habits"))
        throw std::invalid_argument("give either 'model' (file) or 'habits', not both");
    if (cfg.contains("model")) {
        std::string path = cfg.at("model").get<std::string>();
        if (!fs::exists(path)) throw std::invalid_argument("model file not found: " + path);
        return load_model(path);
    }
    return build_model(habits_from_json(cfg.value("habits", json::object())));
}

PostExitRule rule_from_string(const std::string& s) {
    if (s == "taylor") return PostExitRule::taylor;
    if (s == "peg_rlower") return PostExitRule::peg_rlower;
    if (s == "peg_zero") return PostExitRule::peg_zero;
    if (s == "arna_msv") return PostExitRule::arna_msv;
    throw std::invalid_argument("unknown rule '" + s + "'");
}

const char* class_name(StabilityClass c) {
    switch (c) {
        case StabilityClass::sink: return "sink";
        case StabilityClass::saddle: return "saddle";
        default: return "boundary";
    }
}

std::vector<std::string> value_names(const ModelSpec& m, bool with_rate) {
    std::vector<std::string> names;
    for (int i = 0; i < m.n; ++i)
        names.push_back(i < static_cast<int>(m.variable_names.size())
                            ? m.variable_names[i]
                            : "y" + std::to_string(i));
    names.push_back(m.x_name.empty() ? "x" : m.x_name);
    names.push_back("w_b");
    names.push_back("w_s");
    if (with_rate) names.push_back("r");
    return names;
}

Vec state_column(const ChainSolution& sol, const ModelSpec& m, int which, int state) {
    if (which < m.n) return Vec::Constant(1, sol.y_states(which, state));
    if (which == m.n) return Vec::Constant(1, sol.x_states[state]);
    if (which == m.n + 1) return Vec::Constant(1, sol.wb_states[state]);
    if (which == m.n + 2) return Vec::Constant(1, sol.ws_states[state]);
    return Vec::Constant(1, sol.rate_states[state]);
}

void write_table(const Options& opt, const std::string& name, const CsvTable& t) {
    fs::create_directories(opt.out_dir);
    write_csv((fs::path(opt.out_dir) / name).string(), t);
}

int ell_from_config(const json& cfg, const ModelSpec& m, double wb, double ws) {
    if (!cfg.contains("ell") || cfg.at("ell").is_null() ||
        (cfg.at("ell").is_string() && cfg.at("ell").get<std::string>() == "auto"))
        return find_duration(m, wb, ws);
    return cfg.at("ell").get<int>();
}

// ---------------------------------------------------------------- solve

int run_solve(const Options& opt, const json& cfg) {
    ModelSpec m = model_from_config(cfg);
    const double wb = cfg.value("w_b0", 0.0);
    const double ws = cfg.value("w_s0", 0.0);
    const int horizon = cfg.value("horizon", 40);
    const std::string method = cfg.value("method", "chain");

    if (method == "occbin") {
        ArnaPath path = solve_occbin(m, wb, ws, cfg.value("occbin_horizon", 200));
        CsvTable t;
        t.header = {"t"};
        auto names = value_names(m, true);
        for (const auto& n : names) t.header.push_back(n);
        int rows = std::min<int>(horizon + 1, static_cast<int>(path.x.size()));
        for (int tt = 0; tt < rows; ++tt) {
            std::vector<std::string> row = {std::to_string(tt)};
            for (int i = 0; i < m.n; ++i) row.push_back(format_double(path.y(tt, i)));
            row.push_back(format_double(path.x[tt]));
            row.push_back(format_double(path.wb[tt]));
            row.push_back(format_double(path.ws[tt]));
            row.push_back(format_double(path.rate[tt]));
            t.rows.push_back(row);
        }
        write_table(opt, "path.csv", t);

        CsvTable s;
        s.header = {"key", "value"};
        s.rows = {{"ell_realized", std::to_string(path.ell_realized)},
                  {"iterations", std::to_string(path.iterations)}};
        write_table(opt, "summary.csv", s);
        return 0;
    }

    PostExitRule rule = rule_from_string(cfg.value("rule", std::string("taylor")));
    int ell = ell_from_config(cfg, m, wb, ws);
    bool verify = cfg.value("verify", rule == PostExitRule::taylor);
    ChainSolution sol = assemble_states(m, ell, wb, ws, rule, verify);
    const bool with_rate = sol.rate_states.size() > 0;
    auto names = value_names(m, with_rate);

    CsvTable states;
    states.header = {"state", "bound"};
    for (const auto& n : names) states.header.push_back(n);
    const int nstate = ell + 3;
    for (int s = 0; s < nstate; ++s) {
        std::vector<std::string> row = {std::to_string(s + 1),
                                        s < ell ? "1" : "0"};
        for (size_t w = 0; w < names.size(); ++w)
            row.push_back(format_double(state_column(sol, m, static_cast<int>(w), s)[0]));
        states.rows.push_back(row);
    }
    write_table(opt, "states.csv", states);

    CsvTable paths;
    paths.header = {"n"};
    for (const auto& n : names) paths.header.push_back(n);
    for (int k = 0; k <= horizon; ++k) {
        std::vector<std::string> row = {std::to_string(k)};
        for (int i = 0; i < m.n; ++i)
            row.push_back(format_double(expected_path(sol.spec, sol.y_states.row(i).transpose(), k)));
        row.push_back(format_double(expected_path(sol.spec, sol.x_states, k)));
        row.push_back(format_double(expected_path(sol.spec, sol.wb_states, k)));
        row.push_back(format_double(expected_path(sol.spec, sol.ws_states, k)));
        if (with_rate) row.push_back(format_double(peg_path(sol, k)));
        paths.rows.push_back(row);
    }
    write_table(opt, "expected_paths.csv", paths);

    CsvTable resid;
    resid.header = {"restriction", "max_abs_residual"};
    for (const auto& [k, v] : equilibrium_residuals(sol, m, horizon))
        resid.rows.push_back({k, format_double(v)});
    write_table(opt, "residuals.csv", resid);

    CsvTable s;
    s.header = {"key", "value"};
    s.rows = {{"ell", std::to_string(sol.ell)},
              {"q", format_double(sol.spec.q)},
              {"gamma", format_double(sol.gamma)},
              {"condition_estimate", format_double(sol.condition_estimate)},
              {"ill_conditioned", sol.ill_conditioned ? "1" : "0"}};
    write_table(opt, "summary.csv", s);
    return 0;
}

// ---------------------------------------------------------------- multipliers

int run_multipliers(const Options& opt, const json& cfg) {
    ModelSpec m = model_from_config(cfg);
    const int ell_max = cfg.value("ell_max", 12);
    if (ell_max < 1) throw std::invalid_argument("ell_max must be at least 1");
    double q = solve_q(m.normal.a, m.normal.b, m.d, m.rho);

    std::vector<int> ells(ell_max);
    for (int i = 0; i < ell_max; ++i) ells[i] = i + 1;

    InitialConditions icp = initial_conditions(m, q, Flavor::peg);
    std::vector<Vec> peg = solvent_path(icp, m, ells);
    MultiplierSequence pegseq;
    pegseq.flavor = Flavor::peg;
    pegseq.values = peg;

    InitialConditions ica = initial_conditions(m, q, Flavor::arna);
    MultiplierSequence arna = recurse(ica, m, ell_max);

    int div_peg = divergence_index(pegseq);
    int div_arna = divergence_index(arna);

    CsvTable t;
    t.header = {"ell"};
    auto var = [&](int i) {
        return i < static_cast<int>(m.variable_names.size()) ? m.variable_names[i]
                                                             : "y" + std::to_string(i);
    };
    for (int i = 0; i < m.n; ++i) t.header.push_back("peg_" + var(i));
    for (int i = 0; i < m.n; ++i) t.header.push_back("arna_" + var(i));
    t.header.push_back("peg_divergent");
    t.header.push_back("arna_divergent");
    for (int e = 1; e <= ell_max; ++e) {
        std::vector<std::string> row = {std::to_string(e)};
        for (int i = 0; i < m.n; ++i) row.push_back(format_double(peg[e - 1][i]));
        for (int i = 0; i < m.n; ++i) row.push_back(format_double(arna.values[e - 1][i]));
        row.push_back(div_peg >= 0 && e >= div_peg + 1 ? "1" : "0");
        row.push_back(div_arna >= 0 && e >= div_arna + 1 ? "1" : "0");
        t.rows.push_back(row);
    }
    write_table(opt, "multipliers.csv", t);

    StabilityReport st = limit_multiplier(m);
    CsvTable s;
    s.header = {"key", "value"};
    s.rows = {{"rho_ps_x", format_double(st.rho_psx)},
              {"classification", class_name(st.classification)},
              {"p_threshold", format_double(st.p_threshold)},
              {"peg_converges", st.peg_converges ? "1" : "0"},
              {"arna_converges", st.arna_converges ? "1" : "0"},
              {"q", format_double(q)}};
    for (int i = 0; i < m.n; ++i)
        s.rows.push_back({"limit_" + var(i), format_double(st.limit[i])});
    write_table(opt, "stability.csv", s);
    return 0;
}

// ---------------------------------------------------------------- stability

int run_stability(const Options& opt, const json& cfg) {
    ModelSpec m = model_from_config(cfg);
    StabilityReport st = limit_multiplier(m);
    double q = solve_q(m.normal.a, m.normal.b, m.d, m.rho);
    double qstar = solve_q(m.elb.a, m.elb.b, m.d, m.rho);
    auto var = [&](int i) {
        return i < static_cast<int>(m.variable_names.size()) ? m.variable_names[i]
                                                             : "y" + std::to_string(i);
    };
    CsvTable s;
    s.header = {"key", "value"};
    s.rows = {{"rho_ps_x", format_double(st.rho_psx)},
              {"classification", class_name(st.classification)},
              {"p_threshold", format_double(st.p_threshold)},
              {"p_s", format_double(m.p_s)},
              {"peg_converges", st.peg_converges ? "1" : "0"},
              {"arna_converges", st.arna_converges ? "1" : "0"},
              {"q", format_double(q)},
              {"q_star", format_double(qstar)}};
    for (int i = 0; i < m.n; ++i)
        s.rows.push_back({"limit_" + var(i), format_double(st.limit[i])});
    write_table(opt, "stability.csv", s);
    return 0;
}

// ---------------------------------------------------------------- asad

int run_asad(const Options& opt, const json& cfg) {
    if (cfg.contains("model"))
        throw std::invalid_argument(
            "asad works on habit-model parameters; give a 'habits' block, not a model file");
    HabitsParams p = habits_from_json(cfg.value("habits", json::object()));
    const std::string mode_s = cfg.value("mode", std::string("ell_inf"));
    AsAdMode mode;
    if (mode_s == "ell1")
        mode = AsAdMode::ell1;
    else if (mode_s == "ell_inf")
        mode = AsAdMode::ell_inf;
    else
        throw std::invalid_argument("mode must be 'ell1' or 'ell_inf'");
    const bool rate_zero = cfg.value("qstar_rate_zero", false);
    const double s_xi1 = cfg.value("s_xi1", 0.0);
    const double s_g1 = cfg.value("s_g1", 0.0);

    double q;
    if (cfg.contains("q") && cfg.at("q").is_number()) {
        q = cfg.at("q").get<double>();
    } else if (mode == AsAdMode::ell_inf) {
        q = solve_qstar(p);
    } else {
        ModelSpec m = build_model(p);
        q = solve_q(m.normal.a, m.normal.b, m.d, m.rho);
    }

    AsAdLines ln = asad_lines(p, q, s_xi1, s_g1, mode, rate_zero);
    CsvTable t;
    t.header = {"key", "value"};
    t.rows = {{"mode", mode_s},
              {"q_used", format_double(ln.q_used)},
              {"ad_slope", format_double(ln.ad_slope)},
              {"ad_intercept", format_double(ln.ad_intercept)},
              {"as_slope", format_double(ln.as_slope)},
              {"as_intercept", format_double(ln.as_intercept)},
              {"as_g_shift", format_double(ln.as_g_shift)},
              {"as_xi_shift", format_double(ln.as_xi_shift)}};
    write_table(opt, "asad.csv", t);

    if (cfg.value("threshold", false)) {
        double pbar = threshold_pbar(p);
        StabilityReport st = limit_multiplier(build_model(p));
        CsvTable th;
        th.header = {"key", "value"};
        th.rows = {{"pbar_qstar", format_double(pbar)},
                   {"p_threshold", format_double(st.p_threshold)},
                   {"difference", format_double(pbar - st.p_threshold)}};
        write_table(opt, "threshold.csv", th);
    }

    if (cfg.contains("sweep_ps")) {
        const json& sw = cfg.at("sweep_ps");
        double from = sw.value("from", 0.05);
        double to = sw.value("to", 0.95);
        int points = sw.value("points", 19);
        if (points < 2 || !(from < to))
            throw std::invalid_argument("sweep_ps needs from < to and points >= 2");
        CsvTable sweep;
        sweep.header = {"p_s", "ad_slope", "as_slope", "gap"};
        for (int i = 0; i < points; ++i) {
            HabitsParams ps = p;
            ps.p_s = from + (to - from) * i / (points - 1);
            AsAdLines l = asad_lines(ps, q, 0.0, 0.0, mode, rate_zero);
            sweep.rows.push_back({format_double(ps.p_s), format_double(l.ad_slope),
                                  format_double(l.as_slope),
                                  format_double(l.ad_slope - l.as_slope)});
        }
        write_table(opt, "sweep.csv", sweep);
    }
    return 0;
}

// ---------------------------------------------------------------- estimate

Mat weight_from_json(const json& j, size_t rows) {
    if (j.is_string()) {
        if (j.get<std::string>() == "identity") return Mat();
        throw std::invalid_argument("weight_matrix string must be 'identity'");
    }
    if (j.is_array() && !j.empty() && j.at(0).is_array()) {
        Mat w(j.size(), j.at(0).size());
        for (size_t r = 0; r < j.size(); ++r)
            for (size_t c = 0; c < j.at(r).size(); ++c) w(r, c) = j.at(r).at(c).get<double>();
        return w;
    }
    if (j.is_array()) {
        if (j.size() != rows)
            throw std::invalid_argument("diagonal weight list does not match data rows");
        Mat w = Mat::Zero(rows, rows);
        for (size_t r = 0; r < j.size(); ++r) w(r, r) = j.at(r).get<double>();
        return w;
    }
    throw std::invalid_argument("weight_matrix must be 'identity', a list, or a matrix");
}

int run_estimate(const Options& opt, const json& cfg) {
    if (!cfg.contains("data")) throw std::invalid_argument("estimate needs a 'data' CSV path");
    std::string data_path = cfg.at("data").get<std::string>();
    if (!fs::exists(data_path))
        throw std::invalid_argument("data file not found: " + data_path);
    ExpectationsData data = ingest_csv(data_path);
    data.ell_data = cfg.value("ell_data", 1);

    EstimationConfig ec;
    if (cfg.contains("free")) {
        for (const auto& f : cfg.at("free")) {
            FreeParam fp;
            fp.name = f.at("name").get<std::string>();
            fp.lower = f.at("lower").get<double>();
            fp.upper = f.at("upper").get<double>();
            ec.free_params.push_back(fp);
        }
    }
    if (cfg.contains("fixed"))
        for (const auto& [k, v] : cfg.at("fixed").items()) ec.fixed[k] = v.get<double>();
    if (cfg.contains("weight_matrix"))
        ec.weight_matrix = weight_from_json(cfg.at("weight_matrix"), data.rows.size());
    ec.tau_e = cfg.value("tau_e", ec.tau_e);
    ec.tau_ell = cfg.value("tau_ell", ec.tau_ell);
    ec.indicator_duration = cfg.value("indicator_duration", ec.indicator_duration);
    ec.restarts = cfg.value("restarts", ec.restarts);
    ec.max_evaluations = cfg.value("max_evaluations", ec.max_evaluations);
    ec.tolerance = cfg.value("tolerance", ec.tolerance);
    ec.seed = cfg.value("seed", ec.seed);
    if (opt.seed) ec.seed = *opt.seed;

    EstimationResult res = minimize(data, ec);

    CsvTable t;
    t.header = {"key", "value"};
    for (size_t i = 0; i < res.names.size(); ++i)
        t.rows.push_back({res.names[i], format_double(res.theta_md[i])});
    t.rows.push_back({"objective", format_double(res.best.total)});
    t.rows.push_back({"fit_term", format_double(res.best.fit)});
    t.rows.push_back({"euler_term", format_double(res.best.euler)});
    t.rows.push_back({"duration_term", format_double(res.best.duration)});
    t.rows.push_back({"ell_model", std::to_string(res.best.ell_model)});
    t.rows.push_back({"ell_data", std::to_string(data.ell_data)});
    t.rows.push_back({"evaluations", std::to_string(res.evaluations)});
    t.rows.push_back({"improved", res.improved ? "1" : "0"});
    write_table(opt, "estimate.csv", t);

    CsvTable tr;
    tr.header = {"step", "objective"};
    for (size_t i = 0; i < res.trace.size(); ++i)
        tr.rows.push_back({std::to_string(i), format_double(res.trace[i])});
    write_table(opt, "trace.csv", tr);

    // Fitted-against-observed table at the estimated parameters.
    std::map<std::string, double> values = default_parameter_map();
    for (const auto& [k, v] : ec.fixed) values[k] = v;
    for (size_t i = 0; i < res.names.size(); ++i) values[res.names[i]] = res.theta_md[i];
    if (values.count("s_c") && !ec.fixed.count("s_g")) {
        bool sg_free = false;
        for (const auto& fp : ec.free_params) sg_free |= fp.name == "s_g";
        bool sc_pinned = ec.fixed.count("s_c") > 0;
        for (const auto& fp : ec.free_params) sc_pinned |= fp.name == "s_c";
        if (sc_pinned && !sg_free) values["s_g"] = 1.0 - values["s_c"];
    }
    double wb = 0.0, ws = 0.0;
    HabitsParams fitted = params_from_map(values, &wb, &ws);
    int horizon = 0;
    for (const auto& r : data.rows) horizon = std::max(horizon, r.horizon);
    auto paths = model_expectations(fitted, res.best.ell_model, horizon, wb, ws);
    CsvTable fit;
    fit.header = {"variable", "horizon", "data", "model", "weight"};
    for (const auto& r : data.rows) {
        auto it = paths.find(r.variable);
        fit.rows.push_back({r.variable, std::to_string(r.horizon), format_double(r.value),
                            it == paths.end() ? "nan" : format_double(it->second[r.horizon]),
                            format_double(r.weight)});
    }
    write_table(opt, "fit.csv", fit);
    return 0;
}

// ---------------------------------------------------------------- compare

int run_compare(const Options& opt, const json& cfg) {
    ModelSpec m = model_from_config(cfg);
    const double wb = cfg.value("w_b0", 0.0);
    const double ws = cfg.value("w_s0", 0.0);
    const int horizon = cfg.value("horizon", 40);

    int ell = ell_from_config(cfg, m, wb, ws);
    ChainSolution sol = assemble_states(m, ell, wb, ws, PostExitRule::taylor,
                                        cfg.value("verify", true));
    ArnaPath path = solve_occbin(m, wb, ws, cfg.value("occbin_horizon", 200));

    auto var = [&](int i) {
        return i < static_cast<int>(m.variable_names.size()) ? m.variable_names[i]
                                                             : "y" + std::to_string(i);
    };
    CsvTable t;
    t.header = {"n"};
    for (int i = 0; i < m.n; ++i) {
        t.header.push_back("chain_" + var(i));
        t.header.push_back("occbin_" + var(i));
    }
    t.header.push_back("chain_" + (m.x_name.empty() ? std::string("x") : m.x_name));
    t.header.push_back("occbin_" + (m.x_name.empty() ? std::string("x") : m.x_name));
    const bool with_rate = sol.rate_states.size() > 0;
    if (with_rate) {
        t.header.push_back("chain_r");
        t.header.push_back("occbin_r");
    }
    const int rows = std::min<int>(horizon + 1, static_cast<int>(path.x.size()));
    for (int k = 0; k < rows; ++k) {
        std::vector<std::string> row = {std::to_string(k)};
        for (int i = 0; i < m.n; ++i) {
            row.push_back(format_double(expected_path(sol.spec, sol.y_states.row(i).transpose(), k)));
            row.push_back(format_double(path.y(k, i)));
        }
        row.push_back(format_double(expected_path(sol.spec, sol.x_states, k)));
        row.push_back(format_double(path.x[k]));
        if (with_rate) {
            row.push_back(format_double(peg_path(sol, k)));
            row.push_back(format_double(path.rate[k]));
        }
        t.rows.push_back(row);
    }
    write_table(opt, "compare.csv", t);

    CsvTable s;
    s.header = {"key", "value"};
    s.rows = {{"ell_chain", std::to_string(sol.ell)},
              {"ell_occbin", std::to_string(path.ell_realized)},
              {"occbin_iterations", std::to_string(path.iterations)},
              {"q", format_double(sol.spec.q)}};
    write_table(opt, "summary.csv", s);
    return 0;
}

// ---------------------------------------------------------------- simulate-chain

int run_simulate(const Options& opt, const json& cfg) {
    ModelSpec m = model_from_config(cfg);
    const double wb = cfg.value("w_b0", 0.0);
    const double ws = cfg.value("w_s0", 0.0);
    const int horizon = cfg.value("horizon", 40);
    const int runs = cfg.value("runs", 100000);
    std::uint64_t seed = cfg.value("seed", 0);
    if (opt.seed) seed = *opt.seed;

    int ell = ell_from_config(cfg, m, wb, ws);
    ChainSolution sol =
        assemble_states(m, ell, wb, ws, PostExitRule::taylor, cfg.value("verify", true));

    std::string variable = cfg.value("variable", m.x_name.empty() ? "x" : m.x_name);
    auto states = sol.state_map(m);
    auto it = states.find(variable);
    if (it == states.end()) throw std::invalid_argument("unknown variable '" + variable + "'");
    const Vec& sz = it->second;

    SimResult sim = simulate_chain(sol.spec, sz, runs, horizon, seed);
    CsvTable t;
    t.header = {"n", "analytic", "mc_mean", "mc_se"};
    for (int k = 0; k <= horizon; ++k)
        t.rows.push_back({std::to_string(k), format_double(expected_path(sol.spec, sz, k)),
                          format_double(sim.mean[k]), format_double(sim.se[k])});
    write_table(opt, "simulate.csv", t);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bound-spell chain solver, multiplier analyzer, and estimator"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opt;
    std::uint64_t seed_arg = 0;
    auto* seed_opt = app.add_option("--seed", seed_arg, "Override the config seed");
    app.add_option("--config", opt.config_path, "JSON config file");
    app.add_option("--out", opt.out_dir, "Output directory (default: out)");
    app.add_option("--format", opt.format, "Output format (csv)");

    auto* c_solve = app.add_subcommand("solve", "Solve spell states and expected paths");
    auto* c_mult = app.add_subcommand("multipliers", "Impact multipliers per spell length");
    auto* c_stab = app.add_subcommand("stability", "Classification and limit multiplier");
    auto* c_asad = app.add_subcommand("asad", "Impact demand/supply lines and threshold");
    auto* c_est = app.add_subcommand("estimate", "Penalized minimum-distance estimation");
    auto* c_cmp = app.add_subcommand("compare", "Chain expected path vs fixed-window path");
    auto* c_sim = app.add_subcommand("simulate-chain", "Monte-Carlo check of expected paths");

    CLI11_PARSE(app, argc, argv);

    if (opt.format != "csv") {
        std::cerr << "error: unsupported format '" << opt.format << "'\n";
        return 1;
    }
    if (seed_opt->count() > 0) opt.seed = seed_arg;

    try {
        json cfg = load_config(opt);
        if (c_solve->parsed()) return run_solve(opt, cfg);
        if (c_mult->parsed()) return run_multipliers(opt, cfg);
        if (c_stab->parsed()) return run_stability(opt, cfg);
        if (c_asad->parsed()) return run_asad(opt, cfg);
        if (c_est->parsed()) return run_estimate(opt, cfg);
        if (c_cmp->parsed()) return run_compare(opt, cfg);
        if (c_sim->parsed()) return run_simulate(opt, cfg);
        std::cerr << "error: no command\n";
        return 1;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
