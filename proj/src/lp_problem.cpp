#include "rampflex/lp_problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rampflex {

std::string to_string(LpStatus status) {
    switch (status) {
    case LpStatus::Optimal: return "OPTIMAL";
    case LpStatus::Infeasible: return "INFEASIBLE";
    case LpStatus::Unbounded: return "UNBOUNDED";
    case LpStatus::NumericalFailure: return "NUMERICAL_FAILURE";
    }
    return "UNKNOWN";
}

namespace {

void check_finite(std::vector<LpDiagnostic>& out, const Eigen::Ref<const Eigen::MatrixXd>& m,
                  const char* name) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (!std::isfinite(m(i, j))) {
                std::ostringstream msg;
                msg << name << "(" << i << (m.cols() > 1 ? "," + std::to_string(j) : std::string{})
                    << ") is not finite";
                out.push_back({LpDiagnosticKind::NonFinite, msg.str()});
                return;
            }
        }
    }
}

}  // namespace

std::vector<LpDiagnostic> validate_lp(const LpProblem& p) {
    std::vector<LpDiagnostic> out;
    const auto cols = p.A.cols();
    auto mismatch = [&](const char* what, Eigen::Index got, Eigen::Index want) {
        std::ostringstream msg;
        msg << what << " has length " << got << ", expected " << want;
        out.push_back({LpDiagnosticKind::DimensionMismatch, msg.str()});
    };
    if (p.f.size() != cols) mismatch("f", p.f.size(), cols);
    if (p.lb.size() != cols) mismatch("lb", p.lb.size(), cols);
    if (p.ub.size() != cols) mismatch("ub", p.ub.size(), cols);
    if (p.b.size() != p.A.rows()) mismatch("b", p.b.size(), p.A.rows());
    if (!p.row_labels.empty() && static_cast<Eigen::Index>(p.row_labels.size()) != p.A.rows()) {
        out.push_back({LpDiagnosticKind::LabelMismatch, "row_labels does not match rows(A)"});
    }
    if (!p.col_labels.empty() && static_cast<Eigen::Index>(p.col_labels.size()) != cols) {
        out.push_back({LpDiagnosticKind::LabelMismatch, "col_labels does not match cols(A)"});
    }

    check_finite(out, p.f, "f");
    check_finite(out, p.A, "A");
    check_finite(out, p.b, "b");
    check_finite(out, p.lb, "lb");
    check_finite(out, p.ub, "ub");

    const auto n = std::min(p.lb.size(), p.ub.size());
    for (Eigen::Index j = 0; j < n; ++j) {
        if (p.lb[j] > p.ub[j]) {
            std::ostringstream msg;
            msg << "lb(" << j << ") = " << p.lb[j] << " exceeds ub(" << j << ") = " << p.ub[j];
            out.push_back({LpDiagnosticKind::InvertedBounds, msg.str()});
        }
    }
    return out;
}

Residuals feasibility_residuals(const LpProblem& p, const Eigen::VectorXd& x) {
    Residuals r;
    const Eigen::VectorXd ax = p.A * x;
    for (Eigen::Index i = 0; i < p.A.rows(); ++i) {
        double scale = p.A.row(i).cwiseAbs().maxCoeff();
        if (scale == 0.0) scale = 1.0;
        r.max_row_violation = std::max(r.max_row_violation, (ax[i] - p.b[i]) / scale);
    }
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        r.max_bound_violation = std::max({r.max_bound_violation, p.lb[j] - x[j], x[j] - p.ub[j]});
    }
    return r;
}

namespace {

void write_number(std::ostream& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}

void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out << ' ';
        write_number(out, v[i]);
    }
    out << '\n';
}

}  // namespace

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            write_number(out, m(i, j));
        }
        out << '\n';
    }
}

void write_lp_dump(std::ostream& out, const LpProblem& p) {
    out << "# f\n";
    write_vector(out, p.f);
    out << "# A\n";
    write_matrix(out, p.A);
    out << "# b\n";
    write_vector(out, p.b);
    out << "# lb\n";
    write_vector(out, p.lb);
    out << "# ub\n";
    write_vector(out, p.ub);
}

Eigen::MatrixXd read_matrix(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        std::istringstream ls(line);
        std::vector<double> row;
        double v;
        while (ls >> v) row.push_back(v);
        if (!ls.eof()) throw std::runtime_error("read_matrix: non-numeric entry in line '" + line + "'");
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw std::runtime_error("read_matrix: ragged row '" + line + "'");
        }
        rows.push_back(std::move(row));
    }
    Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

}  // namespace rampflex
