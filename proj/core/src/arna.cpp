#include "elbchain/arna.hpp"
#include "elbchain/chain.hpp"
#include "elbchain/errors.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace elb {

namespace {

double rule_rate(const PolicyRule& rule, const Vec& y, double x, double wb, double ws) {
    return rule.on_y.dot(y) + rule.on_x * x + rule.on_wb * wb + rule.on_ws * ws;
}

} // namespace

MsvCoefficients msv_unconstrained(const ModelSpec& model) {
    const int n = model.n;
    const Mat eye = Mat::Identity(n, n);
    QDiagnostics diag = solve_q_diag(model.normal.a, model.normal.b, model.d, model.rho);
    if (diag.stable_pencil_count == 0) throw NoStableSolution("no stable root in the exit pencil");
    if (diag.stable_pencil_count > 1) throw Indeterminacy(diag.stable_pencil_count);

    MsvCoefficients msv;
    msv.q = diag.q;
    Eigen::PartialPivLU<Mat> iqa(eye - msv.q * model.normal.a);
    msv.theta_x = msv.q * iqa.solve(model.normal.b);

    Mat common = (model.normal.a * msv.theta_x + model.normal.b) * model.d;
    auto solve_theta = [&](double p, const Vec& c) {
        Mat lhs = eye - p * model.normal.a - common;
        Eigen::FullPivLU<Mat> lu(lhs);
        if (!lu.isInvertible()) throw SingularSystem("shock-loading system is singular");
        return Vec(lu.solve(c));
    };
    msv.theta_b = solve_theta(model.p_b, model.normal.c_b);
    msv.theta_s = solve_theta(model.p_s, model.normal.c_s);
    msv.gamma_b = model.d.dot(msv.theta_b);
    msv.gamma_s = model.d.dot(msv.theta_s);
    return msv;
}

ArnaPath solve_given_regimes(const ModelSpec& model, const MsvCoefficients& msv,
                             double w_b0, double w_s0, const std::vector<bool>& bound) {
    const int n = model.n;
    const int horizon = static_cast<int>(bound.size());
    if (horizon < 1) throw std::invalid_argument("empty horizon");
    const Mat eye = Mat::Identity(n, n);

    ArnaPath path;
    path.wb = Vec::Zero(horizon);
    path.ws = Vec::Zero(horizon);
    for (int t = 0; t < horizon; ++t) {
        path.wb[t] = std::pow(model.p_b, t) * w_b0;
        path.ws[t] = std::pow(model.p_s, t) * w_s0;
    }

    // Backward induction on Y_t = G_t x_{t-1} + g_t, with the unconstrained
    // law of motion as terminal condition (it is the fixed point of the
    // slack-regime step, so an all-slack tail reproduces it exactly).
    Mat g_coef(n, horizon + 1);
    Mat g_int(n, horizon + 1);
    g_coef.col(horizon) = msv.theta_x;
    g_int.col(horizon) = msv.theta_b * std::pow(model.p_b, horizon) * w_b0 +
                         msv.theta_s * std::pow(model.p_s, horizon) * w_s0;
    for (int t = horizon - 1; t >= 0; --t) {
        const RegimeMatrices& rm = bound[t] ? model.elb : model.normal;
        Vec lead = rm.a * g_coef.col(t + 1) + rm.b;
        Mat phi = eye - lead * model.d;
        Eigen::FullPivLU<Mat> lu(phi);
        if (!lu.isInvertible()) throw SingularSystem("backward-induction step is singular");
        Vec c = rm.c_b * path.wb[t] + rm.c_s * path.ws[t] + rm.e;
        g_coef.col(t) = lu.solve(model.rho * lead);
        g_int.col(t) = lu.solve(rm.a * g_int.col(t + 1) + c);
    }

    path.y = Mat::Zero(horizon, n);
    path.x = Vec::Zero(horizon);
    path.rate = Vec::Zero(horizon);
    double x_prev = 0.0;
    for (int t = 0; t < horizon; ++t) {
        Vec yt = g_coef.col(t) * x_prev + g_int.col(t);
        path.y.row(t) = yt.transpose();
        path.x[t] = model.rho * x_prev + model.d.dot(yt);
        if (bound[t]) {
            path.rate[t] = model.r_lower;
        } else if (model.rate_rule) {
            path.rate[t] =
                rule_rate(*model.rate_rule, yt, path.x[t], path.wb[t], path.ws[t]);
        }
        x_prev = path.x[t];
    }
    return path;
}

ArnaPath solve_occbin(const ModelSpec& model, double w_b0, double w_s0, int horizon) {
    if (!model.rate_rule)
        throw std::invalid_argument("guess-and-verify needs a rate reconstruction rule");
    if (horizon < 24) throw std::invalid_argument("horizon must be at least 24");

    MsvCoefficients msv = msv_unconstrained(model);
    const int max_updates = 100;
    std::vector<bool> bound(horizon, false);

    for (int it = 1; it <= max_updates; ++it) {
        ArnaPath path = solve_given_regimes(model, msv, w_b0, w_s0, bound);

        // Re-guess from the rule-implied (shadow) rate along the solved path.
        std::vector<bool> next(horizon, false);
        for (int t = 0; t < horizon; ++t) {
            double shadow = rule_rate(*model.rate_rule, path.y.row(t).transpose(), path.x[t],
                                      path.wb[t], path.ws[t]);
            next[t] = shadow < model.r_lower;
        }
        if (next == bound) {
            for (int t = horizon - 20; t < horizon; ++t)
                if (bound[t]) throw HorizonTooShort();
            int ell = 0;
            while (ell < horizon && bound[ell]) ++ell;
            for (int t = ell; t < horizon; ++t)
                if (bound[t]) throw SolverError("binding window is not a prefix");
            path.ell_realized = ell;
            path.iterations = it;
            return path;
        }
        bound = next;
    }
    throw NoConvergence(max_updates);
}

namespace {

int realized_window(const ModelSpec& model, double w, int horizon) {
    return solve_occbin(model, w, 0.0, horizon).ell_realized;
}

// Baseline shock whose realized window is exactly ell, placed mid-plateau so
// small scenario perturbations cannot tip the window.
double calibrate_baseline(const ModelSpec& model, int ell, int horizon) {
    double w_unit = 0.0;
    double mag = std::abs(model.r_lower);
    for (double sign : {-1.0, 1.0}) {
        double w = sign * mag * 0.25;
        for (int k = 0; k < 48 && w_unit == 0.0; ++k) {
            if (realized_window(model, w, horizon) >= 1) w_unit = w;
            w *= 2.0;
        }
        if (w_unit != 0.0) break;
    }
    if (w_unit == 0.0) throw NoConvergence("no baseline shock makes the bound bind");

    double lo = 0.0, hi = std::abs(w_unit);
    const double sign = w_unit > 0.0 ? 1.0 : -1.0;
    while (realized_window(model, sign * hi, horizon) < ell) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) throw NoConvergence("cannot reach the requested window length");
    }
    // Invariant: window(lo) < ell <= window(hi). Bisect to the lower edge of
    // the ell plateau, then find its upper edge the same way.
    for (int k = 0; k < 200 && realized_window(model, sign * lo, horizon) != ell; ++k) {
        double mid = 0.5 * (lo + hi);
        if (realized_window(model, sign * mid, horizon) >= ell)
            hi = mid;
        else
            lo = mid;
        if (hi - lo < 1e-13 * std::max(1.0, hi)) break;
    }
    double lower_edge = hi;
    if (realized_window(model, sign * lower_edge, horizon) != ell)
        throw NoConvergence("no shock size realizes the requested window length");

    lo = lower_edge;
    hi = 2.0 * lower_edge;
    while (realized_window(model, sign * hi, horizon) == ell) {
        hi *= 2.0;
        if (hi > 1e13) break;  // plateau effectively unbounded; stay near its base
    }
    for (int k = 0; k < 200 && hi - lo > 1e-10 * std::max(1.0, lo); ++k) {
        double mid = 0.5 * (lo + hi);
        if (realized_window(model, sign * mid, horizon) == ell)
            lo = mid;
        else
            hi = mid;
    }
    return sign * std::sqrt(lower_edge * lo);
}

} // namespace

Vec arna_multiplier(const ModelSpec& model, int ell, double eps) {
    if (ell < 1) throw std::invalid_argument("ell must be at least 1");
    if (eps <= 0.0) throw std::invalid_argument("eps must be positive");
    const int horizon = std::max(120, 8 * ell + 40);
    double w_b0 = calibrate_baseline(model, ell, horizon);

    ArnaPath base = solve_occbin(model, w_b0, 0.0, horizon);
    if (base.ell_realized != ell) throw DurationChanged(ell, base.ell_realized);

    auto once = [&](double step) {
        ArnaPath bumped = solve_occbin(model, w_b0, step, horizon);
        if (bumped.ell_realized != ell) throw DurationChanged(ell, bumped.ell_realized);
        return Vec((bumped.y.row(0) - base.y.row(0)).transpose() / step);
    };
    Vec m = once(eps);
    Vec m_half = once(eps / 2.0);
    if ((m - m_half).cwiseAbs().maxCoeff() > 1e-6 * std::max(1.0, m.cwiseAbs().maxCoeff()))
        throw SolverError("finite-difference step-halving check failed");
    return m;
}

} // namespace elb
