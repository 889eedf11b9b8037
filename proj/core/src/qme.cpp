#include "elbchain/qme.hpp"
#include "elbchain/errors.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>

namespace elb {

namespace {

// Condition estimate via the ratio of extreme singular values.
double cond2(const Mat& m) {
    Eigen::JacobiSVD<Mat> svd(m);
    double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return svd.singularValues()(0) / smin;
}

CMat truncate_if_real(const CMat& m, double tol, bool* is_real) {
    *is_real = m.imag().cwiseAbs().maxCoeff() < tol;
    if (*is_real) {
        CMat out = m;
        out.imag().setZero();
        return out;
    }
    return m;
}

} // namespace

Mat SolventPair::s1_real() const {
    if (!real_dominant)
        throw ComplexMinimalSolution("dominant solvent has non-negligible imaginary part");
    return s1.real();
}

Mat SolventPair::s2_real() const {
    if (!real_minimal)
        throw ComplexMinimalSolution("minimal solvent has non-negligible imaginary part");
    return s2.real();
}

QmeProblem build_qme(const Mat& a_star, const Vec& b_star, const RowVec& d, double rho,
                     double condition_cap) {
    const int n = static_cast<int>(a_star.rows());
    if (a_star.cols() != n || b_star.size() != n || d.size() != n)
        throw std::invalid_argument("build_qme: inconsistent dimensions");
    if (!a_star.allFinite() || !b_star.allFinite() || !d.allFinite())
        throw std::invalid_argument("build_qme: non-finite entries");

    if (cond2(a_star) > condition_cap)
        throw SingularAStar("build_qme: forward matrix is numerically singular");

    Mat a_inv = a_star.inverse();
    QmeProblem p;
    p.n = n;
    p.psi1 = (Mat::Identity(n, n) - b_star * d + rho * a_star) * a_inv;
    p.psi2 = rho * a_inv;
    return p;
}

SolventPair solve_solvents(const QmeProblem& problem, const QmeOptions& opts) {
    const int n = problem.n;
    const Mat p1t = problem.psi1.transpose();
    const Mat p2t = problem.psi2.transpose();

    // First companion form of lambda^2 I - lambda Psi1' + Psi2':
    //   [ Psi1'  -Psi2' ] [ lambda v ]            [ lambda v ]
    //   [  I        0   ] [    v     ]  = lambda  [    v     ]
    Mat companion = Mat::Zero(2 * n, 2 * n);
    companion.topLeftCorner(n, n) = p1t;
    companion.topRightCorner(n, n) = -p2t;
    companion.bottomLeftCorner(n, n) = Mat::Identity(n, n);

    Eigen::EigenSolver<Mat> es(companion);
    if (es.info() != Eigen::Success)
        throw SolverError("solve_solvents: eigensolver failed on the companion matrix");

    CVec lambda = es.eigenvalues();
    CMat vecs = es.eigenvectors();

    std::vector<int> order(2 * n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        double ma = std::abs(lambda(a)), mb = std::abs(lambda(b));
        if (ma != mb) return ma > mb;
        // tie-break so conjugate pairs stay adjacent and ordering is deterministic
        if (lambda(a).real() != lambda(b).real()) return lambda(a).real() > lambda(b).real();
        return lambda(a).imag() > lambda(b).imag();
    });

    SolventPair out;
    out.eigenvalues.resize(2 * n);
    for (int i = 0; i < 2 * n; ++i) out.eigenvalues(i) = lambda(order[i]);

    const double mod_n = std::abs(out.eigenvalues(n - 1));
    const double mod_n1 = std::abs(out.eigenvalues(n));
    out.gap = mod_n - mod_n1;
    if (out.gap < opts.gap_scale * std::max(1.0, mod_n))
        throw NoModulusGap("solve_solvents: no modulus gap between eigenvalues N and N+1");

    // Eigenvector blocks: companion eigenvectors stack (lambda v; v), the
    // plain QEP eigenvector is the bottom half.
    auto assemble = [&](int lo, int hi) -> CMat {
        CMat v(n, n);
        CMat lam = CMat::Zero(n, n);
        for (int i = lo; i < hi; ++i) {
            v.col(i - lo) = vecs.col(order[i]).tail(n);
            lam(i - lo, i - lo) = out.eigenvalues(i);
        }
        Eigen::JacobiSVD<CMat> svd(v);
        if (svd.singularValues()(n - 1) < opts.eigenvector_rank_tol)
            throw DefectiveEigenvectors("solve_solvents: eigenvector block is rank-deficient");
        // S = V diag(lambda) V^{-1}, so S v_i = lambda_i v_i for the selected pairs.
        return v * lam * v.inverse();
    };

    CMat s1 = assemble(0, n);
    CMat s2 = assemble(n, 2 * n);

    const double res_tol =
        opts.residual_scale * (1.0 + problem.psi1.norm() + problem.psi2.norm());
    auto residual = [&](const CMat& s) {
        return (s * s - p1t.cast<std::complex<double>>() * s +
                p2t.cast<std::complex<double>>())
            .cwiseAbs()
            .maxCoeff();
    };
    if (residual(s1) > res_tol || residual(s2) > res_tol)
        throw SolverError("solve_solvents: solvent residual above tolerance");

    out.s1 = truncate_if_real(s1, opts.complex_truncate_tol, &out.real_dominant);
    out.s2 = truncate_if_real(s2, opts.complex_truncate_tol, &out.real_minimal);

    // Block Vandermonde [[I, I], [S1, S2]] must be comfortably nonsingular.
    CMat vand(2 * n, 2 * n);
    vand.topLeftCorner(n, n) = CMat::Identity(n, n);
    vand.topRightCorner(n, n) = CMat::Identity(n, n);
    vand.bottomLeftCorner(n, n) = out.s1;
    vand.bottomRightCorner(n, n) = out.s2;
    Eigen::JacobiSVD<CMat> vsvd(vand);
    if (vsvd.singularValues()(2 * n - 1) < opts.vandermonde_tol)
        throw SolverError("solve_solvents: block Vandermonde nearly singular");

    return out;
}

FixedPointReport iterate_f(const Mat& x1, const Mat& a_star, const Vec& b_star,
                           const RowVec& d, double rho, int max_iter, double tol) {
    const int n = static_cast<int>(a_star.rows());
    const Mat base = Mat::Identity(n, n) - b_star * d + rho * a_star;

    FixedPointReport report;
    report.iterates.push_back(x1);

    Mat x = x1;
    for (int j = 1; j <= max_iter; ++j) {
        Mat arg = base - rho * x;
        Eigen::PartialPivLU<Mat> lu(arg);
        // PartialPivLU has no rank query; use the determinant magnitude
        // relative to the matrix scale as the degeneracy signal.
        double scale = std::max(1.0, arg.norm());
        if (std::abs(lu.determinant()) < 1e-14 * std::pow(scale, n))
            throw SingularIterate("iterate_f: singular inverse argument", j);
        Mat x_next = a_star * lu.inverse();
        double step = (x_next - x).norm();
        x = x_next;
        report.iterates.push_back(x);
        report.iterations = j;
        report.final_step_norm = step;
        if (step < tol) {
            report.converged = true;
            break;
        }
    }
    report.x_limit = x;
    return report;
}

double spectral_radius(const Mat& m) {
    if (m.rows() != m.cols() || !m.allFinite())
        throw std::invalid_argument("spectral_radius: square finite matrix required");
    return m.eigenvalues().cwiseAbs().maxCoeff();
}

} // namespace elb
