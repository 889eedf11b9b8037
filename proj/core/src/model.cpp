#include "elbchain/model.hpp"
#include "elbchain/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace elb {

using nlohmann::json;

RegimeMatrices reduce(const StructuralForm& s, double condition_cap) {
    const int n = static_cast<int>(s.a0.rows());
    if (s.a0.cols() != n || s.a1.rows() != n || s.a1.cols() != n || s.b0.size() != n ||
        s.c0_b.size() != n || s.c0_s.size() != n || s.e0.size() != n)
        throw std::invalid_argument("reduce: inconsistent dimensions");

    Eigen::JacobiSVD<Mat> svd(s.a0, Eigen::ComputeThinU | Eigen::ComputeThinV);
    double smin = svd.singularValues()(n - 1);
    if (smin <= 0.0 || svd.singularValues()(0) / smin > condition_cap)
        throw SingularA0("reduce: contemporaneous coefficient matrix is singular");

    Mat inv = s.a0.inverse();
    RegimeMatrices r;
    r.a = inv * s.a1;
    r.b = inv * s.b0;
    r.c_b = inv * s.c0_b;
    r.c_s = inv * s.c0_s;
    r.e = inv * s.e0;
    return r;
}

namespace {

void check_regime(const RegimeMatrices& r, int n, const std::string& tag,
                  ValidationReport& rep) {
    auto bad = [&](const std::string& what) {
        rep.ok = false;
        rep.violations.push_back(tag + ": " + what);
    };
    if (r.a.rows() != n || r.a.cols() != n) bad("forward matrix must be N x N");
    if (r.b.size() != n) bad("backward loading must be N x 1");
    if (r.c_b.size() != n) bad("baseline-shock loading must be N x 1");
    if (r.c_s.size() != n) bad("scenario-shock loading must be N x 1");
    if (r.e.size() != n) bad("intercept must be N x 1");
    if (!(r.a.allFinite() && r.b.allFinite() && r.c_b.allFinite() && r.c_s.allFinite() &&
          r.e.allFinite()))
        bad("non-finite entries");
}

} // namespace

ValidationReport validate(const ModelSpec& m) {
    ValidationReport rep;
    auto bad = [&](const std::string& what) {
        rep.ok = false;
        rep.violations.push_back(what);
    };

    if (m.n < 1) bad("n must be >= 1");
    check_regime(m.elb, m.n, "bound regime", rep);
    check_regime(m.normal, m.n, "normal regime", rep);
    if (m.normal.e.size() == m.n && m.normal.e.cwiseAbs().maxCoeff() != 0.0)
        bad("normal-regime intercept must be identically zero");
    if (m.d.size() != m.n) bad("d must be 1 x N");
    if (!(m.rho >= 0.0 && m.rho < 1.0)) bad("rho out of [0,1)");
    if (!(m.p_b > 0.0 && m.p_b < 1.0)) bad("p_b out of (0,1)");
    if (!(m.p_s > 0.0 && m.p_s < 1.0)) bad("p_s out of (0,1)");
    if (!(m.r_lower < 0.0)) bad("r_lower must be negative");
    if (!m.variable_names.empty() && static_cast<int>(m.variable_names.size()) != m.n)
        bad("variable_names length must equal n");
    if (m.rate_rule && m.rate_rule->on_y.size() != m.n)
        bad("rate_rule.on_y length must equal n");
    return rep;
}

namespace {

json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

json vec_to_json(const Vec& v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Mat mat_from_json(const json& j, int rows, int cols, const std::string& key) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows)
        throw std::invalid_argument("model json: key '" + key + "' must have " +
                                    std::to_string(rows) + " rows");
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const json& row = j[i];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw std::invalid_argument("model json: key '" + key + "' row " +
                                        std::to_string(i) + " must have " +
                                        std::to_string(cols) + " entries");
        for (int c = 0; c < cols; ++c) m(i, c) = row[c].get<double>();
    }
    return m;
}

Vec vec_from_json(const json& j, int n, const std::string& key) {
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw std::invalid_argument("model json: key '" + key + "' must have " +
                                    std::to_string(n) + " entries");
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = j[i].get<double>();
    return v;
}

const json& require(const json& j, const std::string& key) {
    auto it = j.find(key);
    if (it == j.end()) throw std::invalid_argument("model json: missing key '" + key + "'");
    return *it;
}

} // namespace

ModelSpec model_from_json_text(const std::string& text) {
    json j = json::parse(text);
    ModelSpec m;
    m.n = require(j, "n").get<int>();
    if (m.n < 1) throw std::invalid_argument("model json: n must be >= 1");

    m.elb.a = mat_from_json(require(j, "a_star"), m.n, m.n, "a_star");
    m.elb.b = vec_from_json(require(j, "b_star"), m.n, "b_star");
    m.elb.c_b = vec_from_json(require(j, "c_b_star"), m.n, "c_b_star");
    m.elb.c_s = vec_from_json(require(j, "c_s_star"), m.n, "c_s_star");
    m.elb.e = vec_from_json(require(j, "e_star"), m.n, "e_star");

    m.normal.a = mat_from_json(require(j, "a"), m.n, m.n, "a");
    m.normal.b = vec_from_json(require(j, "b"), m.n, "b");
    m.normal.c_b = vec_from_json(require(j, "c_b"), m.n, "c_b");
    m.normal.c_s = vec_from_json(require(j, "c_s"), m.n, "c_s");
    m.normal.e = Vec::Zero(m.n);

    m.d = vec_from_json(require(j, "d"), m.n, "d").transpose();
    m.rho = require(j, "rho").get<double>();
    m.p_b = require(j, "p_b").get<double>();
    m.p_s = require(j, "p_s").get<double>();
    m.r_lower = require(j, "r_lower").get<double>();

    if (j.contains("variable_names"))
        m.variable_names = j["variable_names"].get<std::vector<std::string>>();
    m.x_name = j.value("x_name", std::string("x"));

    if (j.contains("rate_rule")) {
        const json& rr = j["rate_rule"];
        PolicyRule rule;
        rule.on_y = vec_from_json(require(rr, "on_y"), m.n, "rate_rule.on_y").transpose();
        rule.on_x = rr.value("on_x", 0.0);
        rule.on_wb = rr.value("on_wb", 0.0);
        rule.on_ws = rr.value("on_ws", 0.0);
        m.rate_rule = rule;
    }
    return m;
}

std::string model_to_json_text(const ModelSpec& m) {
    json j;
    j["n"] = m.n;
    j["a_star"] = mat_to_json(m.elb.a);
    j["b_star"] = vec_to_json(m.elb.b);
    j["c_b_star"] = vec_to_json(m.elb.c_b);
    j["c_s_star"] = vec_to_json(m.elb.c_s);
    j["e_star"] = vec_to_json(m.elb.e);
    j["a"] = mat_to_json(m.normal.a);
    j["b"] = vec_to_json(m.normal.b);
    j["c_b"] = vec_to_json(m.normal.c_b);
    j["c_s"] = vec_to_json(m.normal.c_s);
    j["d"] = vec_to_json(m.d.transpose());
    j["rho"] = m.rho;
    j["p_b"] = m.p_b;
    j["p_s"] = m.p_s;
    j["r_lower"] = m.r_lower;
    if (!m.variable_names.empty()) j["variable_names"] = m.variable_names;
    if (m.x_name != "x") j["x_name"] = m.x_name;
    if (m.rate_rule) {
        json rr;
        rr["on_y"] = vec_to_json(m.rate_rule->on_y.transpose());
        rr["on_x"] = m.rate_rule->on_x;
        rr["on_wb"] = m.rate_rule->on_wb;
        rr["on_ws"] = m.rate_rule->on_ws;
        j["rate_rule"] = rr;
    }
    return j.dump(2);
}

ModelSpec load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("model file not found: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return model_from_json_text(ss.str());
}

void save_model(const ModelSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open for writing: " + path);
    out << model_to_json_text(spec) << "\n";
}

} // namespace elb
