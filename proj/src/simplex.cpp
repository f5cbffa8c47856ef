#include "rampflex/simplex.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace rampflex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPrimalTol = 1e-9;     // bound classification inside the iteration
constexpr double kDegenerateStep = 1e-12;
constexpr std::size_t kRefreshEvery = 64;

// Exchange tableau: basic(r) = bbar(r) - sum_k T(r,k) * nonbasic(k).
class Tableau {
public:
    Tableau(const LpProblem& p, const SimplexOptions& opt) : opt_(opt) {
        n_ = p.num_cols();
        lo_.assign(p.lb.data(), p.lb.data() + n_);
        hi_.assign(p.ub.data(), p.ub.data() + n_);
        cost_.assign(p.f.data(), p.f.data() + n_);

        for (std::size_t r = 0; r < p.num_rows(); ++r) {
            const double scale = p.A.row(r).cwiseAbs().maxCoeff();
            if (scale == 0.0) {
                if (p.b[r] < -opt_.feasibility_tol) trivially_infeasible_ = true;
                continue;
            }
            kept_rows_.push_back(r);
            for (std::size_t j = 0; j < n_; ++j) t_.push_back(p.A(r, j) / scale);
            bbar_.push_back(p.b[r] / scale);
        }
        m_ = kept_rows_.size();
        for (std::size_t r = 0; r < m_; ++r) {
            lo_.push_back(0.0);
            hi_.push_back(kInf);
            cost_.push_back(0.0);
            basic_.push_back(n_ + r);
        }
        for (std::size_t j = 0; j < n_; ++j) {
            nonbasic_.push_back(j);
            xn_.push_back(std::clamp(0.0, lo_[j], hi_[j]));
        }
        d_.assign(cost_.begin(), cost_.begin() + static_cast<std::ptrdiff_t>(n_));
        xb_.resize(m_);
        refresh_basic_values();
    }

    bool trivially_infeasible() const { return trivially_infeasible_; }

    LpStatus run(LpStats& stats) {
        std::vector<double> price(n_);
        std::vector<int> violation(m_);
        bool bland = false;

        for (std::size_t iter = 0;; ++iter) {
            if (iter >= opt_.max_iterations) return LpStatus::NumericalFailure;
            if (iter % kRefreshEvery == 0) refresh_basic_values();

            bool phase_one = false;
            for (std::size_t r = 0; r < m_; ++r) {
                const std::size_t v = basic_[r];
                violation[r] = xb_[r] < lo_[v] - kPrimalTol ? 1 : (xb_[r] > hi_[v] + kPrimalTol ? -1 : 0);
                phase_one = phase_one || violation[r] != 0;
            }
            if (phase_one) {
                std::fill(price.begin(), price.end(), 0.0);
                for (std::size_t r = 0; r < m_; ++r) {
                    if (violation[r] == 0) continue;
                    const double* row = &t_[r * n_];
                    const double s = violation[r];
                    for (std::size_t k = 0; k < n_; ++k) price[k] += s * row[k];
                }
                ++stats.phase_one_iterations;
            } else {
                std::copy(d_.begin(), d_.end(), price.begin());
            }

            const auto entering = choose_entering(price, bland);
            if (!entering) {
                return phase_one ? LpStatus::Infeasible : LpStatus::Optimal;
            }
            const std::size_t k = entering->slot;
            const double dir = entering->direction;

            // Ratio test. Entering range first; rows may only undercut it.
            const std::size_t ev = nonbasic_[k];
            double theta = dir > 0 ? hi_[ev] - xn_[k] : xn_[k] - lo_[ev];
            std::size_t leave = m_;
            double leave_bound = 0.0;
            double best_pivot = 0.0;
            for (std::size_t r = 0; r < m_; ++r) {
                const double a = t_[r * n_ + k];
                if (std::abs(a) <= opt_.pivot_tol) continue;
                const double rate = -a * dir;
                const std::size_t v = basic_[r];
                double limit = kInf;
                double bound = 0.0;
                if (rate < 0) {
                    if (xb_[r] > hi_[v] + kPrimalTol) {
                        limit = (xb_[r] - hi_[v]) / -rate;
                        bound = hi_[v];
                    } else if (xb_[r] >= lo_[v] - kPrimalTol) {
                        limit = std::max(0.0, xb_[r] - lo_[v]) / -rate;
                        bound = lo_[v];
                    }
                } else {
                    if (xb_[r] < lo_[v] - kPrimalTol) {
                        limit = (lo_[v] - xb_[r]) / rate;
                        bound = lo_[v];
                    } else if (xb_[r] <= hi_[v] + kPrimalTol && std::isfinite(hi_[v])) {
                        limit = std::max(0.0, hi_[v] - xb_[r]) / rate;
                        bound = hi_[v];
                    }
                }
                if (!std::isfinite(limit)) continue;
                bool take = limit < theta - kDegenerateStep;
                if (!take && leave != m_ && limit <= theta + kDegenerateStep) {
                    take = bland ? v < basic_[leave] : std::abs(a) > best_pivot;
                }
                if (take) {
                    theta = limit;
                    leave = r;
                    leave_bound = bound;
                    best_pivot = std::abs(a);
                }
            }

            if (!std::isfinite(theta)) {
                return phase_one ? LpStatus::NumericalFailure : LpStatus::Unbounded;
            }
            bland = theta <= kDegenerateStep;

            const double step = dir * theta;
            xn_[k] += step;
            if (step != 0.0) {
                for (std::size_t r = 0; r < m_; ++r) xb_[r] -= t_[r * n_ + k] * step;
            }
            ++stats.iterations;

            if (leave == m_) {
                // bound flip
                xn_[k] = dir > 0 ? hi_[ev] : lo_[ev];
                continue;
            }
            pivot(leave, k, leave_bound);
        }
    }

    // Structural values in original column order.
    Eigen::VectorXd structural_values() {
        refresh_basic_values();
        Eigen::VectorXd x(n_);
        for (std::size_t k = 0; k < n_; ++k) {
            if (nonbasic_[k] < n_) x[nonbasic_[k]] = xn_[k];
        }
        for (std::size_t r = 0; r < m_; ++r) {
            if (basic_[r] < n_) x[basic_[r]] = xb_[r];
        }
        for (std::size_t j = 0; j < n_; ++j) x[j] = std::clamp(x[j], lo_[j], hi_[j]);
        return x;
    }

    // True when the optimum is held in place only by a sentinel bound.
    bool leans_on_sentinel(const Eigen::VectorXd& x) const {
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t v = nonbasic_[k];
            if (v >= n_) continue;
            if (xn_[k] <= lo_[v] && lo_[v] <= kSentinelMin && d_[k] > opt_.optimality_tol) return true;
            if (xn_[k] >= hi_[v] && hi_[v] >= kSentinelMax && d_[k] < -opt_.optimality_tol) return true;
        }
        for (std::size_t j = 0; j < n_; ++j) {
            if (cost_[j] != 0.0 && std::abs(x[static_cast<Eigen::Index>(j)]) >= kSentinelMax * (1 - 1e-9)) {
                return true;
            }
        }
        return false;
    }

private:
    struct Entering {
        std::size_t slot;
        double direction;
    };

    std::optional<Entering> choose_entering(const std::vector<double>& price, bool bland) const {
        std::optional<Entering> best;
        double best_score = 0.0;
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t v = nonbasic_[k];
            double dir = 0.0;
            if (price[k] < -opt_.optimality_tol && xn_[k] < hi_[v]) {
                dir = 1.0;
            } else if (price[k] > opt_.optimality_tol && xn_[k] > lo_[v]) {
                dir = -1.0;
            } else {
                continue;
            }
            if (bland) {
                if (!best || v < nonbasic_[best->slot]) best = Entering{k, dir};
                continue;
            }
            const double score = std::abs(price[k]);
            if (!best || score > best_score || (score == best_score && v < nonbasic_[best->slot])) {
                best = Entering{k, dir};
                best_score = score;
            }
        }
        return best;
    }

    void pivot(std::size_t r, std::size_t k, double leave_bound) {
        double* row = &t_[r * n_];
        const double p = row[k];
        const double inv = 1.0 / p;
        for (std::size_t j = 0; j < n_; ++j) row[j] *= inv;
        row[k] = inv;
        bbar_[r] *= inv;

        nz_.clear();
        for (std::size_t j = 0; j < n_; ++j) {
            if (row[j] != 0.0) nz_.push_back(j);
        }
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            double* other = &t_[i * n_];
            const double factor = other[k];
            if (factor == 0.0) continue;
            other[k] = 0.0;
            for (std::size_t j : nz_) other[j] -= factor * row[j];
            bbar_[i] -= factor * bbar_[r];
        }
        const double dk = d_[k];
        if (dk != 0.0) {
            d_[k] = 0.0;
            for (std::size_t j : nz_) d_[j] -= dk * row[j];
        }

        const double entering_value = xn_[k];
        std::swap(basic_[r], nonbasic_[k]);
        xn_[k] = leave_bound;
        xb_[r] = entering_value;
    }

    void refresh_basic_values() {
        for (std::size_t r = 0; r < m_; ++r) {
            const double* row = &t_[r * n_];
            double v = bbar_[r];
            for (std::size_t k = 0; k < n_; ++k) v -= row[k] * xn_[k];
            xb_[r] = v;
        }
    }

    const SimplexOptions& opt_;
    std::size_t n_ = 0;
    std::size_t m_ = 0;
    bool trivially_infeasible_ = false;
    std::vector<std::size_t> kept_rows_;
    std::vector<double> t_;
    std::vector<double> bbar_;
    std::vector<double> lo_, hi_, cost_;
    std::vector<std::size_t> basic_, nonbasic_;
    std::vector<double> xn_, xb_, d_;
    std::vector<std::size_t> nz_;
};

}  // namespace

LpSolution solve_lp(const LpProblem& problem, const SimplexOptions& options) {
    const auto diagnostics = validate_lp(problem);
    if (!diagnostics.empty()) {
        throw std::invalid_argument("solve_lp: malformed problem: " + diagnostics.front().message);
    }
    const auto start = std::chrono::steady_clock::now();
    LpSolution sol;
    sol.x = Eigen::VectorXd::Zero(problem.f.size());

    Tableau tableau(problem, options);
    if (tableau.trivially_infeasible()) {
        sol.status = LpStatus::Infeasible;
    } else {
        sol.status = tableau.run(sol.stats);
        if (sol.status == LpStatus::Optimal) {
            sol.x = tableau.structural_values();
            const auto res = feasibility_residuals(problem, sol.x);
            if (res.max_row_violation > options.feasibility_tol ||
                res.max_bound_violation > options.feasibility_tol) {
                sol.status = LpStatus::NumericalFailure;
            } else if (tableau.leans_on_sentinel(sol.x)) {
                sol.status = LpStatus::Unbounded;
            }
            sol.objective = problem.f.dot(sol.x);
        }
    }
    sol.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return sol;
}

}  // namespace rampflex
