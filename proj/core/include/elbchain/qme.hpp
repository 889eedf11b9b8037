#ifndef ELBCHAIN_QME_HPP
#define ELBCHAIN_QME_HPP

/*
 * Monic quadratic matrix equation solver.
 *
 *   Q(S) = S^2 - Psi1' S + Psi2' = 0
 *
 * with Psi1 = (I - B*D + rho A*) (A*)^{-1} and Psi2 = rho (A*)^{-1}.
 * The dominant solvent S1 carries the N largest-modulus eigenvalues of the
 * associated quadratic eigenvalue problem, the minimal solvent S2 the N
 * smallest, and a valid split requires |lambda_N| > |lambda_{N+1}|.
 *
 * The map F(X) = A* (I - B*D + rho A* - rho X)^{-1} has the fixed points
 * (S1')^{-1} (attracting) and (S2')^{-1}; iterate_f tracks the sequence
 * X_{j+1} = F(X_j) and reports convergence to the attracting one.
 */

#include <Eigen/Dense>
#include <vector>

namespace elb {

using Mat  = Eigen::MatrixXd;
using Vec  = Eigen::VectorXd;
using RowVec = Eigen::RowVectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

struct QmeProblem {
    Mat psi1;
    Mat psi2;
    int n = 0;
};

struct SolventPair {
    CMat s1;              // dominant solvent; imaginary part zeroed when below tolerance
    CMat s2;              // minimal solvent, same convention
    CVec eigenvalues;     // all 2N eigenvalues, sorted by decreasing modulus
    double gap = 0.0;     // |lambda_N| - |lambda_{N+1}|
    bool real_dominant = false;
    bool real_minimal = false;

    // Real views. s1_real() throws ComplexMinimalSolution if the dominant
    // solvent kept an imaginary part above the truncation tolerance.
    Mat s1_real() const;
    Mat s2_real() const;
};

struct FixedPointReport {
    Mat x_limit;
    std::vector<Mat> iterates;   // X_1, X_2, ... up to the stopping point
    bool converged = false;
    int iterations = 0;
    double final_step_norm = 0.0;
};

struct QmeOptions {
    double residual_scale = 1e-9;   // residual tol = scale * (1 + |Psi1| + |Psi2|)
    double gap_scale = 1e-8;        // gap tol = scale * max(1, |lambda_N|)
    double eigenvector_rank_tol = 1e-10;
    double vandermonde_tol = 1e-10;
    double complex_truncate_tol = 1e-9;
};

// Assemble Psi1, Psi2 from the ELB-regime matrices. Throws SingularAStar when
// A* is not (comfortably) invertible.
QmeProblem build_qme(const Mat& a_star, const Vec& b_star, const RowVec& d, double rho,
                     double condition_cap = 1e12);

// Solve for the dominant/minimal solvent pair through the companion
// linearization of lambda^2 I - lambda Psi1' + Psi2'. Throws NoModulusGap or
// DefectiveEigenvectors when the split does not exist.
SolventPair solve_solvents(const QmeProblem& problem, const QmeOptions& opts = {});

// Iterate X_{j+1} = F(X_j) from x1. Throws SingularIterate when the inverse
// argument degenerates at some step.
FixedPointReport iterate_f(const Mat& x1, const Mat& a_star, const Vec& b_star,
                           const RowVec& d, double rho,
                           int max_iter = 500, double tol = 1e-12);

// Largest eigenvalue modulus.
double spectral_radius(const Mat& m);

} // namespace elb

#endif
