#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace rampflex {

// Finite stand-ins for "no bound" on the epigraph variables.
inline constexpr double kSentinelMin = -1e9;
inline constexpr double kSentinelMax = 1e9;

// minimize f'X  subject to  A X <= b,  lb <= X <= ub
struct LpProblem {
    Eigen::VectorXd f;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::VectorXd lb;
    Eigen::VectorXd ub;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;

    std::size_t num_rows() const { return static_cast<std::size_t>(A.rows()); }
    std::size_t num_cols() const { return static_cast<std::size_t>(A.cols()); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

std::string to_string(LpStatus status);

struct LpStats {
    std::size_t iterations = 0;
    std::size_t phase_one_iterations = 0;
    double wall_seconds = 0.0;
};

struct LpSolution {
    LpStatus status = LpStatus::NumericalFailure;
    Eigen::VectorXd x;
    double objective = 0.0;
    LpStats stats;

    bool optimal() const { return status == LpStatus::Optimal; }
};

enum class LpDiagnosticKind { DimensionMismatch, NonFinite, InvertedBounds, LabelMismatch };

struct LpDiagnostic {
    LpDiagnosticKind kind;
    std::string message;
};

// Empty result iff the problem is well formed.
std::vector<LpDiagnostic> validate_lp(const LpProblem& problem);

struct Residuals {
    double max_row_violation = 0.0;   // max_r (A x - b)_r, scaled by the row's largest |a_rj|
    double max_bound_violation = 0.0;
};

Residuals feasibility_residuals(const LpProblem& problem, const Eigen::VectorXd& x);

// Plain-text dump: one matrix row per line, space separated. Sections are
// introduced by "# f", "# A", "# b", "# lb", "# ub".
void write_lp_dump(std::ostream& out, const LpProblem& problem);
void write_matrix(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(std::istream& in);

}  // namespace rampflex
