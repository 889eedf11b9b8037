#include "elbchain/nkhabits.hpp"
#include "elbchain/chain.hpp"
#include "elbchain/errors.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace elb {

namespace {

// Unknown ordering for the one-period-spell system: impact, post, exit.
enum { C1, L1, P1, C2, L2, P2, C3, L3, P3, NU };

struct SpellSystem {
    Mat a = Mat::Zero(NU, NU);
    Vec b = Vec::Zero(NU);
    double rate1 = 0.0;  // impact-state rate (fixed, not an unknown)
};

// Nine restrictions on the spell-of-one states. Rows:
//   0 entry:   c_1 = (1-h)/sigma * lambda_1
//   1,2        consumption recursions conditional on the impact / post state
//   3,4,5      Euler equations, one per active state
//   6,7,8      Phillips curves, one per active state
// In ell1 mode the post and exit rates follow the policy rule; in ell_inf
// mode every rate is pegged (at r_lower, or at zero under the alternative
// bookkeeping convention) and the caller passes q*.
SpellSystem build_spell_system(const HabitsParams& p, double q, double s_xi1, double s_g1,
                               AsAdMode mode, bool rate_zero) {
    SpellSystem sys;
    const double gam = (1.0 - p.h) / p.sigma;
    const double decay_fix = (p.p_b - p.p_s) / (1.0 - p.p_s);
    const double s_xi2 = decay_fix * s_xi1;
    const bool pegged = (mode == AsAdMode::ell_inf);
    const double peg = pegged && rate_zero ? 0.0 : p.r_lower;
    sys.rate1 = pegged && rate_zero ? 0.0 : p.r_lower;

    Mat& A = sys.a;
    Vec& b = sys.b;

    A(0, C1) = 1.0;
    A(0, L1) = -gam;

    A(1, C1) = p.p_s - p.h;
    A(1, C2) = 1.0 - p.p_s;
    A(1, L1) = -gam * p.p_s;
    A(1, L2) = -gam * (1.0 - p.p_s);

    A(2, C2) = p.p_b - p.h;
    A(2, C3) = 1.0 - p.p_b;
    A(2, L2) = -gam * p.p_b;
    A(2, L3) = -gam * (1.0 - p.p_b);

    // lambda_i = E[lambda'|i] + E[pi'|i] + xi_i - r_i
    A(3, L1) = 1.0 - p.p_s;
    A(3, L2) = -(1.0 - p.p_s);
    A(3, P1) = -p.p_s;
    A(3, P2) = -(1.0 - p.p_s);
    b(3) = s_xi1 - sys.rate1;

    A(4, L2) = 1.0 - p.p_b;
    A(4, L3) = -(1.0 - p.p_b);
    A(4, P2) = -p.p_b;
    A(4, P3) = -(1.0 - p.p_b);
    if (pegged) {
        b(4) = s_xi2 - peg;
    } else {
        A(4, P2) += p.phi_pi;
        A(4, C2) += p.phi_y * p.s_c;
        b(4) = (1.0 - p.phi_xi) * s_xi2;
    }

    A(5, L3) = 1.0 - q;
    A(5, P3) = -q;
    if (pegged) {
        b(5) = -peg;
    } else {
        A(5, P3) += p.phi_pi;
        A(5, C3) += p.phi_y * p.s_c;
    }

    // pi_i = beta E[pi'|i] + kappa [lambda_i + eta (s_c c_i + s_g g_i)]
    A(6, P1) = 1.0 - p.beta * p.p_s;
    A(6, P2) = -p.beta * (1.0 - p.p_s);
    A(6, L1) = -p.kappa;
    A(6, C1) = -p.kappa * p.eta * p.s_c;
    b(6) = p.kappa * p.eta * p.s_g * s_g1;

    A(7, P2) = 1.0 - p.beta * p.p_b;
    A(7, P3) = -p.beta * (1.0 - p.p_b);
    A(7, L2) = -p.kappa;
    A(7, C2) = -p.kappa * p.eta * p.s_c;

    A(8, P3) = 1.0 - p.beta * q;
    A(8, L3) = -p.kappa;
    A(8, C3) = -p.kappa * p.eta * p.s_c;

    return sys;
}

Vec solve_full(const SpellSystem& sys) {
    Eigen::FullPivLU<Mat> lu(sys.a);
    if (!lu.isInvertible()) throw SingularSystem("spell restriction system is singular");
    return lu.solve(sys.b);
}

// Drop one restriction, treat pi_1 as a parameter, and solve the remaining
// 8x8 system. Returns c_1 for the given pi_1 value.
double c1_given_pi1(const SpellSystem& sys, int drop_row, double pi1) {
    Mat a(NU - 1, NU - 1);
    Vec b(NU - 1);
    int r = 0;
    for (int i = 0; i < NU; ++i) {
        if (i == drop_row) continue;
        int c = 0;
        for (int j = 0; j < NU; ++j) {
            if (j == P1) continue;
            a(r, c++) = sys.a(i, j);
        }
        b(r) = sys.b(i) - sys.a(i, P1) * pi1;
        ++r;
    }
    Eigen::FullPivLU<Mat> lu(a);
    if (!lu.isInvertible()) throw SingularSystem("reduced spell system is singular");
    Vec u = lu.solve(b);
    return u[C1];  // C1 keeps index 0 after removing the later P1 column
}

constexpr int kImpactEulerRow = 3;
constexpr int kImpactPhillipsRow = 6;

AsAdLines lines_impl(const HabitsParams& params, double q, double s_xi1, double s_g1,
                     AsAdMode mode, bool rate_zero, bool cross_check) {
    SpellSystem sys = build_spell_system(params, q, s_xi1, s_g1, mode, rate_zero);

    AsAdLines out;
    out.q_used = q;
    out.mode = mode;

    // Demand: everything but the impact Phillips restriction.
    out.ad_intercept = c1_given_pi1(sys, kImpactPhillipsRow, 0.0);
    out.ad_slope = c1_given_pi1(sys, kImpactPhillipsRow, 1.0) - out.ad_intercept;
    // Supply: everything but the impact Euler restriction.
    out.as_intercept = c1_given_pi1(sys, kImpactEulerRow, 0.0);
    out.as_slope = c1_given_pi1(sys, kImpactEulerRow, 1.0) - out.as_intercept;

    {
        SpellSystem bumped = build_spell_system(params, q, s_xi1, s_g1 + 1.0, mode, rate_zero);
        out.as_g_shift = c1_given_pi1(bumped, kImpactEulerRow, 0.0) - out.as_intercept;
    }
    {
        SpellSystem bumped = build_spell_system(params, q, s_xi1 + 1.0, s_g1, mode, rate_zero);
        out.as_xi_shift = c1_given_pi1(bumped, kImpactEulerRow, 0.0) - out.as_intercept;
    }

    if (cross_check) {
        if (std::abs(out.ad_slope - out.as_slope) < 1e-12)
            throw NonIntersecting("demand and supply lines are parallel");
        Vec full = solve_full(sys);
        double pi_star = (out.as_intercept - out.ad_intercept) / (out.ad_slope - out.as_slope);
        double c_star = out.ad_slope * pi_star + out.ad_intercept;
        double scale = 1.0 + std::abs(full[C1]) + std::abs(full[P1]);
        if (std::abs(pi_star - full[P1]) > 1e-8 * scale ||
            std::abs(c_star - full[C1]) > 1e-8 * scale)
            throw SolverError("line intersection disagrees with the full spell solve");
    }
    return out;
}

} // namespace

ValidationReport validate(const HabitsParams& p) {
    ValidationReport rep;
    auto fail = [&](const std::string& msg) {
        rep.ok = false;
        rep.violations.push_back(msg);
    };
    if (!(p.sigma > 0)) fail("sigma must be positive");
    if (!(p.beta > 0 && p.beta < 1)) fail("beta must lie in (0,1)");
    if (!(p.kappa > 0)) fail("kappa must be positive");
    if (!(p.eta >= 0)) fail("eta must be nonnegative");
    if (!(p.h >= 0 && p.h < 1)) fail("h must lie in [0,1)");
    if (!(p.s_c > 0 && p.s_c <= 1)) fail("s_c must lie in (0,1]");
    if (!(p.s_g >= 0)) fail("s_g must be nonnegative");
    if (std::abs(p.s_c + p.s_g - 1.0) > 1e-9) fail("s_c + s_g must equal 1");
    if (!(p.r_lower < 0)) fail("r_lower must be negative (deviation from steady state)");
    if (!(p.p_b > 0 && p.p_b < 1)) fail("p_b must lie in (0,1)");
    if (!(p.p_s > 0 && p.p_s < 1)) fail("p_s must lie in (0,1)");
    if (!rep.ok) return rep;

    // Determinacy of the rule-substituted regime: the exit pencil must carry
    // exactly one stable root.
    try {
        HabitsParams copy = p;
        ModelSpec m = build_model(copy);
        QDiagnostics diag = solve_q_diag(m.normal.a, m.normal.b, m.d, m.rho);
        if (diag.stable_pencil_count != 1) {
            std::ostringstream os;
            os << "rule-substituted regime is not determinate (" << diag.stable_pencil_count
               << " stable roots)";
            fail(os.str());
        }
    } catch (const std::exception& e) {
        fail(std::string("determinacy check failed: ") + e.what());
    }
    return rep;
}

ModelSpec build_model(const HabitsParams& p) {
    {
        // Range checks only; the determinacy probe in validate() calls back
        // into build_model and must not recurse.
        auto bad = [](bool cond) { return !cond; };
        if (bad(p.sigma > 0) || bad(p.beta > 0 && p.beta < 1) || bad(p.kappa > 0) ||
            bad(p.eta >= 0) || bad(p.h >= 0 && p.h < 1) ||
            bad(std::abs(p.s_c + p.s_g - 1.0) <= 1e-9) || bad(p.r_lower < 0) ||
            bad(p.p_b > 0 && p.p_b < 1) || bad(p.p_s > 0 && p.p_s < 1))
            throw std::invalid_argument("habit model parameters out of range");
    }

    const double kes_c = p.kappa * p.eta * p.s_c;
    const double kes_g = p.kappa * p.eta * p.s_g;

    StructuralForm bound;
    bound.a0 = (Mat(2, 2) << 1.0, 0.0, -p.kappa, 1.0).finished();
    bound.a1 = (Mat(2, 2) << 1.0, 1.0, 0.0, p.beta).finished();
    bound.b0 = (Vec(2) << 0.0, kes_c).finished();
    bound.c0_b = (Vec(2) << 1.0, 0.0).finished();
    bound.c0_s = (Vec(2) << 0.0, kes_g).finished();
    bound.e0 = (Vec(2) << -p.r_lower, 0.0).finished();

    StructuralForm ruled;
    ruled.a0 = (Mat(2, 2) << 1.0, p.phi_pi, -p.kappa, 1.0).finished();
    ruled.a1 = bound.a1;
    ruled.b0 = (Vec(2) << -p.phi_y * p.s_c, kes_c).finished();
    ruled.c0_b = (Vec(2) << 1.0 - p.phi_xi, 0.0).finished();
    ruled.c0_s = (Vec(2) << -p.phi_y * p.s_g, kes_g).finished();
    ruled.e0 = Vec::Zero(2);

    ModelSpec m;
    m.n = 2;
    m.elb = reduce(bound);
    m.normal = reduce(ruled);
    m.d = (RowVec(2) << (1.0 - p.h) / p.sigma, 0.0).finished();
    m.rho = p.h;
    m.p_b = p.p_b;
    m.p_s = p.p_s;
    m.r_lower = p.r_lower;
    m.variable_names = {"lambda", "pi"};
    m.x_name = "c";
    PolicyRule rule;
    rule.on_y = (RowVec(2) << 0.0, p.phi_pi).finished();
    rule.on_x = p.phi_y * p.s_c;
    rule.on_wb = p.phi_xi;
    rule.on_ws = p.phi_y * p.s_g;
    m.rate_rule = rule;
    return m;
}

Ell1States restrictions_ell1(const HabitsParams& p, double q, double s_xi1, double s_g1) {
    SpellSystem sys = build_spell_system(p, q, s_xi1, s_g1, AsAdMode::ell1, false);
    Vec u = solve_full(sys);

    Ell1States st;
    st.c = (Vec(3) << u[C1], u[C2], u[C3]).finished();
    st.lambda = (Vec(3) << u[L1], u[L2], u[L3]).finished();
    st.pi = (Vec(3) << u[P1], u[P2], u[P3]).finished();
    st.s_xi2 = (p.p_b - p.p_s) / (1.0 - p.p_s) * s_xi1;
    st.rate = Vec(3);
    st.rate[0] = p.r_lower;
    st.rate[1] = p.phi_pi * u[P2] + p.phi_y * p.s_c * u[C2] + p.phi_xi * st.s_xi2;
    st.rate[2] = p.phi_pi * u[P3] + p.phi_y * p.s_c * u[C3];
    return st;
}

double solve_qstar(const HabitsParams& p) {
    ModelSpec m = build_model(p);
    return solve_q(m.elb.a, m.elb.b, m.d, m.rho);
}

AsAdLines asad_lines(const HabitsParams& params, double q_or_qstar, double s_xi1, double s_g1,
                     AsAdMode mode, bool rate_zero) {
    return lines_impl(params, q_or_qstar, s_xi1, s_g1, mode, rate_zero, true);
}

double threshold_pbar_at(const HabitsParams& params, double q_value) {
    auto slope_gap = [&](double ps) {
        HabitsParams p = params;
        p.p_s = ps;
        AsAdLines ln = lines_impl(p, q_value, 0.0, 0.0, AsAdMode::ell_inf, false, false);
        return ln.ad_slope - ln.as_slope;
    };

    const double lo_end = 1e-4, hi_end = 1.0 - 1e-4;
    const int grid = 500;
    double prev_p = lo_end;
    double prev_f = slope_gap(prev_p);
    double lo = 0.0, hi = 0.0;
    bool bracketed = false;
    for (int i = 1; i <= grid; ++i) {
        double ps = lo_end + (hi_end - lo_end) * double(i) / grid;
        double f = slope_gap(ps);
        if (prev_f == 0.0) return prev_p;
        if ((prev_f < 0) != (f < 0)) {
            lo = prev_p;
            hi = ps;
            bracketed = true;
            break;
        }
        prev_p = ps;
        prev_f = f;
    }
    if (!bracketed)
        throw NoRootInUnitInterval("demand and supply slopes never cross for p_s in (0,1)");

    double f_lo = slope_gap(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        double mid = 0.5 * (lo + hi);
        double f_mid = slope_gap(mid);
        if (f_mid == 0.0) return mid;
        if ((f_lo < 0) != (f_mid < 0)) {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    return 0.5 * (lo + hi);
}

double threshold_pbar(const HabitsParams& params) {
    return threshold_pbar_at(params, solve_qstar(params));
}

} // namespace elb
