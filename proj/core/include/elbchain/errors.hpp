#ifndef ELBCHAIN_ERRORS_HPP
#define ELBCHAIN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace elb {

// Base class for every numerical/solver failure raised by the library.
// Configuration mistakes (bad dimensions, out-of-range parameters) throw
// std::invalid_argument instead.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularAStar : SolverError {
    explicit SingularAStar(const std::string& msg) : SolverError(msg) {}
};

struct NoModulusGap : SolverError {
    explicit NoModulusGap(const std::string& msg) : SolverError(msg) {}
};

struct DefectiveEigenvectors : SolverError {
    explicit DefectiveEigenvectors(const std::string& msg) : SolverError(msg) {}
};

struct SingularIterate : SolverError {
    int iteration;
    SingularIterate(const std::string& msg, int j) : SolverError(msg), iteration(j) {}
    explicit SingularIterate(int j)
        : SolverError("map iterate is singular at step " + std::to_string(j)), iteration(j) {}
};

struct SingularA0 : SolverError {
    explicit SingularA0(const std::string& msg) : SolverError(msg) {}
};

struct NoAdmissibleRoot : SolverError {
    explicit NoAdmissibleRoot(const std::string& msg =
                                  "no admissible real root of the exit-persistence "
                                  "equation in [0,1)")
        : SolverError(msg) {}
};

struct ComplexExitDynamics : SolverError {
    explicit ComplexExitDynamics(const std::string& msg =
                                     "exit dynamics admit only complex candidate roots")
        : SolverError(msg) {}
};

struct SingularSystem : SolverError {
    explicit SingularSystem(const std::string& msg = "state restriction system is singular")
        : SolverError(msg) {}
};

struct ElbVerificationFailed : SolverError {
    int period;
    double shadow_rate;
    ElbVerificationFailed(const std::string& msg, int n, double shadow)
        : SolverError(msg), period(n), shadow_rate(shadow) {}
    ElbVerificationFailed(int n, double shadow)
        : SolverError("lower-bound verification failed at period " + std::to_string(n) +
                      " (shadow rate " + std::to_string(shadow) + ")"),
          period(n), shadow_rate(shadow) {}
};

struct SingularOmega : SolverError {
    explicit SingularOmega(const std::string& msg) : SolverError(msg) {}
};

// Kept for completeness of the error taxonomy. rho=0 inputs are routed to a
// closed-form branch in initial_conditions, so this is not raised from there.
struct RhoZeroWithHabits : SolverError {
    explicit RhoZeroWithHabits(const std::string& msg) : SolverError(msg) {}
};

struct ComplexMinimalSolution : SolverError {
    explicit ComplexMinimalSolution(const std::string& msg =
                                        "dominant solvent has complex entries; the limit "
                                        "analysis requires a real solvent")
        : SolverError(msg) {}
};

struct DurationChanged : SolverError {
    int ell_before, ell_after;
    DurationChanged(const std::string& msg, int before, int after)
        : SolverError(msg), ell_before(before), ell_after(after) {}
    DurationChanged(int before, int after)
        : SolverError("shock perturbation changed the binding duration from " +
                      std::to_string(before) + " to " + std::to_string(after)),
          ell_before(before), ell_after(after) {}
};

struct Indeterminacy : SolverError {
    int stable_count;
    Indeterminacy(const std::string& msg, int count) : SolverError(msg), stable_count(count) {}
    explicit Indeterminacy(int count)
        : SolverError("indeterminate: " + std::to_string(count) +
                      " stable roots where exactly one was expected"),
          stable_count(count) {}
};

struct NoStableSolution : SolverError {
    explicit NoStableSolution(const std::string& msg) : SolverError(msg) {}
};

struct NoConvergence : SolverError {
    explicit NoConvergence(const std::string& msg) : SolverError(msg) {}
    explicit NoConvergence(int limit)
        : SolverError("no convergence within " + std::to_string(limit) + " iterations") {}
};

struct HorizonTooShort : SolverError {
    explicit HorizonTooShort(const std::string& msg =
                                 "binding window reaches the terminal buffer; "
                                 "increase the horizon")
        : SolverError(msg) {}
};

struct NoRootInUnitInterval : SolverError {
    explicit NoRootInUnitInterval(const std::string& msg) : SolverError(msg) {}
};

struct NonIntersecting : SolverError {
    explicit NonIntersecting(const std::string& msg) : SolverError(msg) {}
};

struct ParseError : std::invalid_argument {
    int line;
    ParseError(const std::string& msg, int l) : std::invalid_argument(msg), line(l) {}
};

struct MissingColumn : std::invalid_argument {
    explicit MissingColumn(const std::string& msg) : std::invalid_argument(msg) {}
};

} // namespace elb

#endif
