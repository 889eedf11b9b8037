#include "elbchain/multiplier.hpp"
#include "elbchain/arna.hpp"
#include "elbchain/chain.hpp"
#include "elbchain/errors.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>

namespace elb {

namespace {

Mat robust_inverse(const Mat& m, const char* what) {
    Eigen::FullPivLU<Mat> lu(m);
    if (!lu.isInvertible()) throw SingularOmega(what);
    return lu.inverse();
}

} // namespace

InitialConditions initial_conditions(const ModelSpec& model, double q, Flavor flavor) {
    const int n = model.n;
    const Mat eye = Mat::Identity(n, n);
    const Mat& a_star = model.elb.a;
    const Vec& b_star = model.elb.b;
    const Mat& a = model.normal.a;
    const Vec& b = model.normal.b;
    const RowVec& d = model.d;
    const double rho = model.rho, p_s = model.p_s;

    InitialConditions out;
    out.flavor = flavor;

    // The q-dependent column q A (I-qA)^{-1} B / rho; at rho = 0 the exact
    // limit uses q/rho -> 1/(1 - D B) and q = 0.
    auto persistence_column = [&](const Mat& lead) -> Vec {
        if (rho > 0.0) {
            Mat iqa = eye - q * a;
            Eigen::PartialPivLU<Mat> lu(iqa);
            return (q / rho) * (lead * lu.solve(b));
        }
        double denom = 1.0 - d.dot(b);
        if (std::abs(denom) < 1e-14) throw SingularOmega("1 - D B vanishes at rho = 0");
        return (lead * b) / denom;
    };

    if (flavor == Flavor::peg) {
        Vec t = persistence_column(a_star);
        Mat omega_y = -(eye - p_s * a_star) + p_s * t * d;
        Vec omega_x = b_star - (p_s - rho) * t;
        Mat omega_f = robust_inverse(-omega_y - omega_x * d, "peg impact system");
        out.m1 = omega_f * model.elb.c_s;
        out.x1 = a_star *
                 robust_inverse(eye - b_star * d - rho * a_star * omega_f * omega_x * d,
                                "peg X1");
    } else {
        Vec t = persistence_column(a);
        Mat omega_y = -(eye - p_s * a) + p_s * t * d;
        Vec omega_x = (rho - p_s) * t + b;
        Mat omega_phi = robust_inverse(-omega_y - omega_x * d, "exit-rule impact system");
        Mat f = eye - b_star * d - rho * a_star * omega_phi * omega_x * d;
        Mat f_inv = robust_inverse(f, "exit-rule F");
        out.m1 = f_inv * (model.elb.c_s + p_s * a_star * omega_phi * model.normal.c_s);
        out.x1 = a_star *
                 robust_inverse(eye + rho * a_star - b_star * d - rho * a_star * f_inv,
                                "exit-rule X1");
    }
    return out;
}

MultiplierSequence recurse(const InitialConditions& init, const ModelSpec& model, int length) {
    if (length < 1) throw std::invalid_argument("length must be at least 1");
    const int n = model.n;
    const Mat eye = Mat::Identity(n, n);
    const Mat& a_star = model.elb.a;
    Eigen::PartialPivLU<Mat> a_star_lu(a_star);

    MultiplierSequence seq;
    seq.flavor = init.flavor;
    seq.values.reserve(length);
    seq.values.push_back(init.m1);
    if (length == 1) return seq;
    seq.x_path.reserve(length - 1);
    seq.x_path.push_back(init.x1);

    const Mat base = eye - model.elb.b * model.d + model.rho * a_star;
    const double scale = base.cwiseAbs().maxCoeff() + init.x1.cwiseAbs().maxCoeff();
    for (int ell = 2; ell <= length; ++ell) {
        const Mat& x_prev = seq.x_path.back();
        Vec m = a_star_lu.solve(x_prev * (model.elb.c_s + model.p_s * a_star * seq.values.back()));
        seq.values.push_back(m);
        if (ell == length) break;
        Mat arg = base - model.rho * x_prev;
        Eigen::PartialPivLU<Mat> lu(arg);
        double det_scale = std::pow(std::max(scale, 1.0), n);
        if (std::abs(lu.determinant()) < 1e-14 * det_scale) throw SingularIterate(ell);
        seq.x_path.push_back(a_star * lu.inverse());
    }
    return seq;
}

namespace {

struct SolventBasis {
    Mat s1t, s2t;     // transposed solvents
    Mat c1t, c2t;     // transposed combination weights, from the X1 start
    Mat p1, p2;       // (p_s I - S_i^T)^{-1}
    Mat c1t_inv;
    Mat s1t_inv;
};

SolventBasis solvent_basis(const InitialConditions& init, const ModelSpec& model) {
    QmeProblem prob = build_qme(model.elb.a, model.elb.b, model.d, model.rho);
    SolventPair pair = solve_solvents(prob);
    if (!pair.real_dominant || !pair.real_minimal) throw ComplexMinimalSolution();

    SolventBasis basis;
    Mat s1 = pair.s1_real(), s2 = pair.s2_real();
    basis.s1t = s1.transpose();
    basis.s2t = s2.transpose();
    Mat k1t = robust_inverse(init.x1.transpose(), "X1 transpose");
    Mat c2 = robust_inverse(s2 - s1, "solvent difference") * (k1t - s1);
    Mat c1 = Mat::Identity(prob.n, prob.n) - c2;
    basis.c1t = c1.transpose();
    basis.c2t = c2.transpose();
    const Mat eye = Mat::Identity(prob.n, prob.n);
    basis.p1 = robust_inverse(model.p_s * eye - basis.s1t, "p_s I - S1^T");
    basis.p2 = robust_inverse(model.p_s * eye - basis.s2t, "p_s I - S2^T");
    basis.c1t_inv = robust_inverse(basis.c1t, "C1");
    basis.s1t_inv = robust_inverse(basis.s1t, "S1");
    return basis;
}

} // namespace

std::vector<Vec> solvent_path(const InitialConditions& init, const ModelSpec& model,
                              const std::vector<int>& ells) {
    const int n = model.n;
    const Mat eye = Mat::Identity(n, n);
    SolventBasis basis = solvent_basis(init, model);
    Eigen::PartialPivLU<Mat> a_star_lu(model.elb.a);

    Vec bracket = model.elb.a * init.m1 +
                  (basis.c1t * basis.p1 + basis.c2t * basis.p2) * model.elb.c_s;
    // The bracket multiplies a term that grows like (p_s/|s1|)^ell, so a
    // roundoff-sized residue here would swamp long horizons. When it sits at
    // the noise floor of its two O(scale) summands it is an exact zero in
    // real arithmetic (the convergent-path condition) and is treated as such.
    double bracket_scale = (model.elb.a * init.m1).norm() +
                           ((basis.c1t * basis.p1 + basis.c2t * basis.p2) * model.elb.c_s).norm();
    if (bracket.norm() <= 1e-10 * std::max(bracket_scale, 1e-300)) bracket.setZero();

    int m_max = 0;
    for (int ell : ells) {
        if (ell < 1) throw std::invalid_argument("ell must be at least 1");
        m_max = std::max(m_max, ell - 1);
    }
    std::vector<bool> wanted(m_max + 1, false);
    for (int ell : ells) wanted[ell - 1] = true;

    // A* M(ell) = (I + W_m)^{-1} [ R_m C1^{-T} bracket - (P1 + W_m P2) C*_s ],
    // m = ell-1, W_m = S1^{-T} W_{m-1} S2^T (geometric decay),
    // R_m = p_s S1^{-T} R_{m-1} (decays in the sink case, grows in the saddle).
    std::map<int, Vec> results;
    Mat w = basis.c1t_inv * basis.c2t;
    Mat r = eye;
    for (int m = 0; m <= m_max; ++m) {
        if (m > 0) {
            w = basis.s1t_inv * w * basis.s2t;
            r = model.p_s * basis.s1t_inv * r;
        }
        if (!wanted[m]) continue;
        Vec rhs = r * (basis.c1t_inv * bracket) - (basis.p1 + w * basis.p2) * model.elb.c_s;
        Vec am = robust_inverse(eye + w, "solvent-path system") * rhs;
        results[m] = a_star_lu.solve(am);
    }

    std::vector<Vec> out;
    out.reserve(ells.size());
    for (int ell : ells) out.push_back(results[ell - 1]);
    return out;
}

StabilityReport limit_multiplier(const ModelSpec& model) {
    const int n = model.n;
    const Mat eye = Mat::Identity(n, n);
    QmeProblem prob = build_qme(model.elb.a, model.elb.b, model.d, model.rho);
    SolventPair pair = solve_solvents(prob);
    if (!pair.real_dominant) throw ComplexMinimalSolution();

    StabilityReport rep;
    rep.x_underbar = robust_inverse(pair.s1_real().transpose(), "S1 transpose");
    rep.rho_psx = spectral_radius(model.p_s * rep.x_underbar);
    rep.p_threshold = 1.0 / spectral_radius(rep.x_underbar);

    const double band = 1e-6;
    if (std::abs(rep.rho_psx - 1.0) <= band)
        rep.classification = StabilityClass::boundary;
    else
        rep.classification =
            rep.rho_psx < 1.0 ? StabilityClass::sink : StabilityClass::saddle;

    Mat x_tilde = robust_inverse(model.elb.a, "A*") * rep.x_underbar;
    rep.limit = robust_inverse(eye - model.p_s * x_tilde * model.elb.a, "limit system") *
                (x_tilde * model.elb.c_s);
    rep.peg_converges = true;
    rep.arna_converges = rep.rho_psx < 1.0;
    return rep;
}

Vec finite_difference_multiplier(const ModelSpec& model, int ell, double eps, Flavor flavor,
                                 bool verify_duration, double w_b0) {
    if (eps <= 0.0) throw std::invalid_argument("eps must be positive");
    if (flavor == Flavor::arna) return arna_multiplier(model, ell, eps);

    auto once = [&](double step) {
        ChainSolution base =
            assemble_states(model, ell, w_b0, 0.0, PostExitRule::taylor, false);
        ChainSolution bumped =
            assemble_states(model, ell, w_b0, step, PostExitRule::taylor, false);
        return Vec((bumped.y_states.col(0) - base.y_states.col(0)) / step);
    };
    Vec m = once(eps);
    Vec m_half = once(eps / 2.0);
    double drift = (m - m_half).cwiseAbs().maxCoeff();
    if (drift > 1e-6 * std::max(1.0, m.cwiseAbs().maxCoeff()))
        throw SolverError("finite-difference step-halving check failed");

    if (verify_duration) {
        int ell_base = find_duration(model, w_b0, 0.0);
        int ell_bumped = find_duration(model, w_b0, eps);
        if (ell_base != ell || ell_bumped != ell) throw DurationChanged(ell_base, ell_bumped);
    }
    return m;
}

Vec saddle_bracket(const ModelSpec& model, double q) {
    InitialConditions init = initial_conditions(model, q, Flavor::peg);
    SolventBasis basis = solvent_basis(init, model);
    return model.elb.a * init.m1 +
           (basis.c1t * basis.p1 + basis.c2t * basis.p2) * model.elb.c_s;
}

int divergence_index(const MultiplierSequence& seq) {
    const double cap = 1e6;
    int streak = 0;
    double prev = -1.0;
    for (std::size_t i = 0; i < seq.values.size(); ++i) {
        double norm = seq.values[i].cwiseAbs().maxCoeff();
        streak = (norm > prev) ? streak + 1 : 0;
        prev = norm;
        if (norm > cap && streak >= 20) return static_cast<int>(i) + 1;
    }
    return -1;
}

} // namespace elb
