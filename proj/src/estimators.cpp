// SPDX-License-Identifier: Apache-2.0
//
// pathfuse: robust fusion of ABG path-loss models
// Copyright (C) 2026 The pathfuse authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "pathfuse/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "pathfuse/errors.hpp"
#include "pathfuse/rng.hpp"

namespace pathfuse {

std::string_view to_string(RegressorKind kind)
{
    switch (kind) {
    case RegressorKind::OLS: return "OLS";
    case RegressorKind::WLS: return "WLS";
    case RegressorKind::Ridge: return "Ridge";
    case RegressorKind::Lasso: return "Lasso";
    case RegressorKind::ElasticNet: return "ElasticNet";
    case RegressorKind::RANSAC: return "RANSAC";
    case RegressorKind::TheilSen: return "TheilSen";
    }
    return "?";
}

RegressorKind parse_regressor_kind(std::string_view text)
{
    std::string t(text);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "ols" || t == "lineal" || t == "linear") return RegressorKind::OLS;
    if (t == "wls") return RegressorKind::WLS;
    if (t == "ridge") return RegressorKind::Ridge;
    if (t == "lasso") return RegressorKind::Lasso;
    if (t == "elasticnet" || t == "elastic-net") return RegressorKind::ElasticNet;
    if (t == "ransac") return RegressorKind::RANSAC;
    if (t == "theilsen" || t == "theil-sen") return RegressorKind::TheilSen;
    throw Error(ErrorKind::Config, "unknown regressor '" + std::string(text) + "'");
}

void RegressorConfig::validate() const
{
    auto fail = [](const std::string& why) { throw Error(ErrorKind::Config, "regressor config: " + why); };
    if (!(lambda >= 0.0)) fail("lambda must be >= 0");
    if (!(lambda1 >= 0.0 && lambda1 <= 1.0)) fail("lambda1 must lie in [0, 1]");
    if (!(lambda2 >= 0.0)) fail("lambda2 must be >= 0");
    if (ransac_iters < 1) fail("ransac_iters must be >= 1");
    if (ransac_inlier_threshold && !(*ransac_inlier_threshold > 0.0)) fail("ransac_inlier_threshold must be > 0");
    if (theilsen_subsets < 1) fail("theilsen_subsets must be >= 1");
    if (kfold_k < 1) fail("kfold_k must be >= 1");
    if (!(tol > 0.0)) fail("tol must be > 0");
    if (max_iters < 1) fail("max_iters must be >= 1");
}

double median(std::vector<double> values)
{
    if (values.empty()) throw Error(ErrorKind::Metric, "median of an empty set");
    const auto mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double mad_scale(std::span<const double> residuals)
{
    std::vector<double> r(residuals.begin(), residuals.end());
    const double m = median(r);
    for (double& v : r) v = std::abs(v - m);
    return 1.4826 * median(std::move(r));
}

namespace {

void check_system(const Eigen::MatrixXd& X, const Eigen::VectorXd& y)
{
    if (X.rows() != y.size()) throw Error(ErrorKind::Contract, "design matrix and response differ in length");
    if (X.rows() < X.cols()) {
        throw Error(ErrorKind::InsufficientData, "system has " + std::to_string(X.rows()) + " rows for " +
                                                     std::to_string(X.cols()) + " unknowns");
    }
    if (!X.allFinite() || !y.allFinite()) throw Error(ErrorKind::Data, "non-finite entries in the system");
}

struct Equilibrated {
    Eigen::MatrixXd A;        // sqrt(w) X with unit-norm columns
    Eigen::VectorXd b;        // sqrt(w) y
    Eigen::VectorXd scales;   // original column norms
};

Equilibrated equilibrate(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w)
{
    if (w.size() != X.rows()) throw Error(ErrorKind::Contract, "weight vector length mismatch");
    if (!w.allFinite() || (w.array() < 0.0).any()) throw Error(ErrorKind::Data, "weights must be finite and >= 0");
    const Eigen::VectorXd sw = w.cwiseSqrt();
    Equilibrated e{sw.asDiagonal() * X, sw.cwiseProduct(y), Eigen::VectorXd(X.cols())};
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double s = e.A.col(j).norm();
        if (s == 0.0) {
            throw Error(ErrorKind::SingularSystem,
                        "singular system: column " + std::to_string(j) + " has zero weighted norm");
        }
        e.scales(j) = s;
        e.A.col(j) /= s;
    }
    return e;
}

struct ConditionInfo {
    double condition = 0.0;
    Eigen::VectorXd null_direction;
};

ConditionInfo condition_of(const Eigen::MatrixXd& R)
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(R, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    ConditionInfo info;
    const double smin = s(s.size() - 1);
    info.condition = smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
    info.null_direction = svd.matrixV().col(s.size() - 1);
    return info;
}

Eigen::MatrixXd upper_r(const Eigen::HouseholderQR<Eigen::MatrixXd>& qr, Eigen::Index p)
{
    return qr.matrixQR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
}

}  // namespace

double condition_estimate(const Eigen::MatrixXd& X, const Eigen::VectorXd& w)
{
    const auto e = equilibrate(X, Eigen::VectorXd::Zero(X.rows()), w);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(e.A);
    return condition_of(upper_r(qr, X.cols())).condition;
}

Eigen::VectorXd solve_wls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                          double max_condition)
{
    check_system(X, y);
    const auto e = equilibrate(X, y, w);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(e.A);
    const auto info = condition_of(upper_r(qr, X.cols()));
    if (!(info.condition <= max_condition)) {
        std::vector<Eigen::Index> cols;
        for (Eigen::Index j = 0; j < info.null_direction.size(); ++j)
            if (std::abs(info.null_direction(j)) > 0.1) cols.push_back(j);
        std::sort(cols.begin(), cols.end(), [&](auto a, auto b) {
            return std::abs(info.null_direction(a)) > std::abs(info.null_direction(b));
        });
        std::ostringstream os;
        os << "singular system (condition estimate " << info.condition << "); offending columns:";
        for (auto j : cols) os << ' ' << j;
        throw Error(ErrorKind::SingularSystem, os.str());
    }
    const Eigen::VectorXd scaled = qr.solve(e.b);
    return scaled.cwiseQuotient(e.scales);
}

Eigen::VectorXd solve_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y)
{
    return solve_wls(X, y, Eigen::VectorXd::Ones(X.rows()));
}

// --- penalized fits -------------------------------------------------------

namespace {

/// Centred (when an intercept exists), unit-norm copy of the penalized columns.
struct Standardized {
    Eigen::MatrixXd Z;             // columns = penalized columns of X
    Eigen::VectorXd yc;
    std::vector<Eigen::Index> cols;
    Eigen::VectorXd means;
    Eigen::VectorXd scales;
    std::optional<Eigen::Index> intercept;
    double y_mean = 0.0;

    Eigen::VectorXd to_original(const Eigen::VectorXd& b, const Eigen::MatrixXd& X) const
    {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(X.cols());
        double shift = 0.0;
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const auto i = static_cast<Eigen::Index>(k);
            const double coef = scales(i) > 0.0 ? b(i) / scales(i) : 0.0;
            out(cols[k]) = coef;
            shift += coef * means(i);
        }
        if (intercept) out(*intercept) = (y_mean - shift) / X(0, *intercept);
        return out;
    }
};

std::optional<Eigen::Index> find_intercept(const Eigen::MatrixXd& X)
{
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double v = X(0, j);
        if (v != 0.0 && (X.col(j).array() == v).all()) return j;
    }
    return std::nullopt;
}

Standardized standardize(const Eigen::MatrixXd& X, const Eigen::VectorXd& y)
{
    Standardized s;
    s.intercept = find_intercept(X);
    for (Eigen::Index j = 0; j < X.cols(); ++j)
        if (!s.intercept || j != *s.intercept) s.cols.push_back(j);
    const auto m = static_cast<Eigen::Index>(s.cols.size());
    s.Z.resize(X.rows(), m);
    s.means = Eigen::VectorXd::Zero(m);
    s.scales = Eigen::VectorXd::Zero(m);
    s.y_mean = s.intercept ? y.mean() : 0.0;
    s.yc = y.array() - s.y_mean;
    for (Eigen::Index k = 0; k < m; ++k) {
        Eigen::VectorXd col = X.col(s.cols[static_cast<std::size_t>(k)]);
        if (s.intercept) {
            s.means(k) = col.mean();
            col.array() -= s.means(k);
        }
        const double norm = col.norm();
        s.scales(k) = norm;
        s.Z.col(k) = norm > 0.0 ? Eigen::VectorXd(col / norm) : Eigen::VectorXd::Zero(X.rows());
    }
    return s;
}

double soft_threshold(double x, double t)
{
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
}

/// Minimise ||yc - Z b||^2 + l1 ||b||_1 + l2 ||b||^2 over unit-norm columns.
Eigen::VectorXd coordinate_descent(const Standardized& s, double l1, double l2, double tol, int max_iters,
                                   int* iterations)
{
    const Eigen::Index m = s.Z.cols();
    const Eigen::MatrixXd G = s.Z.transpose() * s.Z;
    const Eigen::VectorXd c = s.Z.transpose() * s.yc;
    const double half = 0.5 * l1;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);

    // Exact solution on the current active set, accepted only if it satisfies
    // the KKT conditions of the full problem.
    auto polish = [&](Eigen::VectorXd& out) {
        std::vector<Eigen::Index> active;
        for (Eigen::Index j = 0; j < m; ++j)
            if (b(j) != 0.0) active.push_back(j);
        const auto a = static_cast<Eigen::Index>(active.size());
        Eigen::VectorXd cand = Eigen::VectorXd::Zero(m);
        if (a > 0) {
            Eigen::MatrixXd Ga(a, a);
            Eigen::VectorXd rhs(a);
            for (Eigen::Index i = 0; i < a; ++i) {
                for (Eigen::Index k = 0; k < a; ++k) Ga(i, k) = G(active[i], active[k]);
                Ga(i, i) += l2;
                rhs(i) = c(active[i]) - half * (b(active[i]) > 0.0 ? 1.0 : -1.0);
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(Ga);
            if (!lu.isInvertible()) return false;
            const Eigen::VectorXd sol = lu.solve(rhs);
            for (Eigen::Index i = 0; i < a; ++i) {
                if (sol(i) == 0.0 || (sol(i) > 0.0) != (b(active[i]) > 0.0)) return false;
                cand(active[i]) = sol(i);
            }
        }
        const Eigen::VectorXd grad = c - G * cand;
        const double slack = 1e-9 * std::max(1.0, c.cwiseAbs().maxCoeff());
        for (Eigen::Index j = 0; j < m; ++j)
            if (cand(j) == 0.0 && std::abs(grad(j)) > half + slack) return false;
        out = cand;
        return true;
    };

    for (int it = 1; it <= max_iters; ++it) {
        double max_delta = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (G(j, j) == 0.0) continue;
            const double rho = c(j) - G.row(j).dot(b) + G(j, j) * b(j);
            const double updated = soft_threshold(rho, half) / (G(j, j) + l2);
            max_delta = std::max(max_delta, std::abs(updated - b(j)));
            b(j) = updated;
        }
        Eigen::VectorXd exact;
        if (polish(exact)) {
            if (iterations) *iterations = it;
            return exact;
        }
        if (max_delta < tol) {
            if (iterations) *iterations = it;
            return b;
        }
    }
    std::vector<double> last(b.data(), b.data() + b.size());
    throw ConvergenceError("penalized solver did not converge in " + std::to_string(max_iters) + " sweeps",
                           std::move(last));
}

}  // namespace

Eigen::VectorXd fit_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda)
{
    if (!(lambda >= 0.0)) throw Error(ErrorKind::Config, "ridge lambda must be >= 0");
    check_system(X, y);
    const auto s = standardize(X, y);
    const Eigen::Index m = s.Z.cols();
    if (m == 0) return s.to_original(Eigen::VectorXd(0), X);
    Eigen::MatrixXd A(s.Z.rows() + m, m);
    A << s.Z, std::sqrt(lambda) * Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd rhs(s.Z.rows() + m);
    rhs << s.yc, Eigen::VectorXd::Zero(m);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < m) throw Error(ErrorKind::SingularSystem, "ridge system is rank deficient");
    return s.to_original(qr.solve(rhs), X);
}

Eigen::VectorXd fit_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda, double tol,
                          int max_iters, int* iterations)
{
    if (!(lambda >= 0.0)) throw Error(ErrorKind::Config, "lasso lambda must be >= 0");
    return fit_elasticnet(X, y, 1.0, lambda, tol, max_iters, iterations);
}

Eigen::VectorXd fit_elasticnet(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda1, double lambda2,
                               double tol, int max_iters, int* iterations)
{
    if (!(lambda1 >= 0.0 && lambda1 <= 1.0)) throw Error(ErrorKind::Config, "elastic-net lambda1 must lie in [0, 1]");
    if (!(lambda2 >= 0.0)) throw Error(ErrorKind::Config, "elastic-net lambda2 must be >= 0");
    check_system(X, y);
    const auto s = standardize(X, y);
    try {
        const auto b = coordinate_descent(s, lambda1 * lambda2, (1.0 - lambda1) * lambda2, tol, max_iters, iterations);
        return s.to_original(b, X);
    } catch (const ConvergenceError& e) {
        const auto& last = e.last_iterate();
        const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(last.data(), static_cast<Eigen::Index>(last.size()));
        const Eigen::VectorXd orig = s.to_original(b, X);
        throw ConvergenceError(e.what(), std::vector<double>(orig.data(), orig.data() + orig.size()));
    }
}

// --- RANSAC and Theil-Sen -------------------------------------------------

namespace {

double rms_over(const Eigen::VectorXd& r, const std::vector<bool>& mask)
{
    double ss = 0.0;
    std::size_t n = 0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        if (!mask[static_cast<std::size_t>(i)]) continue;
        ss += r(i) * r(i);
        ++n;
    }
    return n > 0 ? std::sqrt(ss / static_cast<double>(n)) : 0.0;
}

std::vector<Eigen::Index> draw_subset(Rng& rng, Eigen::Index n, Eigen::Index p)
{
    std::vector<Eigen::Index> idx;
    idx.reserve(static_cast<std::size_t>(p));
    while (static_cast<Eigen::Index>(idx.size()) < p) {
        const auto k = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(n)));
        if (std::find(idx.begin(), idx.end(), k) == idx.end()) idx.push_back(k);
    }
    std::sort(idx.begin(), idx.end());
    return idx;
}

std::optional<Eigen::VectorXd> solve_subset(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                            const std::vector<Eigen::Index>& idx)
{
    const auto p = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd A(p, p);
    Eigen::VectorXd b(p);
    for (Eigen::Index i = 0; i < p; ++i) {
        A.row(i) = X.row(idx[static_cast<std::size_t>(i)]);
        b(i) = y(idx[static_cast<std::size_t>(i)]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) return std::nullopt;
    Eigen::VectorXd sol = lu.solve(b);
    if (!sol.allFinite()) return std::nullopt;
    return sol;
}

double binomial(Eigen::Index n, Eigen::Index k)
{
    double r = 1.0;
    for (Eigen::Index i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

double inlier_floor(const Eigen::VectorXd& y)
{
    return 1e-9 * std::max(1.0, y.cwiseAbs().maxCoeff());
}

FitDiagnostics finish_with_mask(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, Eigen::VectorXd coef,
                                double threshold_multiplier, int iterations)
{
    FitDiagnostics d;
    const Eigen::VectorXd r = y - X * coef;
    std::vector<double> rv(r.data(), r.data() + r.size());
    const double thr = std::max(threshold_multiplier * mad_scale(rv), inlier_floor(y));
    d.inlier_mask.resize(static_cast<std::size_t>(r.size()));
    for (Eigen::Index i = 0; i < r.size(); ++i) d.inlier_mask[static_cast<std::size_t>(i)] = std::abs(r(i)) <= thr;
    d.coefficients = std::move(coef);
    d.residual_wsd = rms_over(r, d.inlier_mask);
    d.condition_estimate = condition_estimate(X, Eigen::VectorXd::Ones(X.rows()));
    d.iterations_used = iterations;
    return d;
}

/// Exact pairwise Theil-Sen for a line with an intercept column.
FitDiagnostics theilsen_line(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, Eigen::Index intercept,
                             const RegressorConfig& cfg)
{
    const Eigen::Index slope_col = intercept == 0 ? 1 : 0;
    const Eigen::VectorXd x = X.col(slope_col);
    const Eigen::Index n = X.rows();
    constexpr double kExactPairCap = 5e6;
    std::vector<double> slopes;
    int pairs = 0;
    if (binomial(n, 2) <= kExactPairCap) {
        slopes.reserve(static_cast<std::size_t>(binomial(n, 2)));
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = i + 1; j < n; ++j) {
                ++pairs;
                if (x(j) == x(i)) continue;
                slopes.push_back((y(j) - y(i)) / (x(j) - x(i)));
            }
        }
    } else {
        // Too many pairs to hold: seeded random pairs instead.
        auto rng = make_rng(cfg.seed, "theilsen-pairs");
        const auto budget = std::max<std::size_t>(static_cast<std::size_t>(cfg.theilsen_subsets), 1000000);
        for (std::size_t k = 0; k < budget; ++k) {
            const auto idx = draw_subset(rng, n, 2);
            ++pairs;
            if (x(idx[1]) == x(idx[0])) continue;
            slopes.push_back((y(idx[1]) - y(idx[0])) / (x(idx[1]) - x(idx[0])));
        }
    }
    if (slopes.size() < 3) throw Error(ErrorKind::DegenerateData, "Theil-Sen: fewer than 3 nonsingular pairs");
    const double slope = median(std::move(slopes));
    std::vector<double> offsets(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) offsets[static_cast<std::size_t>(i)] = y(i) - slope * x(i);
    Eigen::VectorXd coef(2);
    coef(slope_col) = slope;
    coef(intercept) = median(std::move(offsets)) / X(0, intercept);
    return finish_with_mask(X, y, std::move(coef), 3.0, pairs);
}

}  // namespace

FitDiagnostics fit_theilsen(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const RegressorConfig& cfg)
{
    cfg.validate();
    if (X.rows() != y.size()) throw Error(ErrorKind::Contract, "design matrix and response differ in length");
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (n <= p) throw Error(ErrorKind::DegenerateData, "Theil-Sen needs more samples than parameters");

    const auto icpt = find_intercept(X);
    if (p == 2 && icpt) return theilsen_line(X, y, *icpt, cfg);

    // Medians are taken in a centred basis: the intercept coordinate becomes
    // the fitted value at the centroid instead of an extrapolation to L = 0.
    const auto s = standardize(X, y);
    Eigen::MatrixXd Zfull(n, p);
    for (std::size_t k = 0; k < s.cols.size(); ++k) Zfull.col(static_cast<Eigen::Index>(k)) = s.Z.col(static_cast<Eigen::Index>(k));
    if (s.intercept) Zfull.col(p - 1) = Eigen::VectorXd::Ones(n);
    for (Eigen::Index k = 0; k < Zfull.cols(); ++k)
        if (Zfull.col(k).squaredNorm() == 0.0)
            throw Error(ErrorKind::DegenerateData, "Theil-Sen: constant or zero column " + std::to_string(k));

    std::vector<std::vector<double>> coords(static_cast<std::size_t>(p));
    int solved = 0;
    auto take = [&](const std::vector<Eigen::Index>& idx) {
        const auto sol = solve_subset(Zfull, s.yc, idx);
        if (!sol) return;
        ++solved;
        for (Eigen::Index k = 0; k < p; ++k) coords[static_cast<std::size_t>(k)].push_back((*sol)(k));
    };

    const double total = binomial(n, p);
    const auto budget = static_cast<double>(cfg.theilsen_subsets);
    if (total <= budget) {
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(p));
        std::iota(idx.begin(), idx.end(), 0);
        while (true) {
            take(idx);
            Eigen::Index k = p - 1;
            while (k >= 0 && idx[static_cast<std::size_t>(k)] == n - p + k) --k;
            if (k < 0) break;
            ++idx[static_cast<std::size_t>(k)];
            for (Eigen::Index j = k + 1; j < p; ++j)
                idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
        }
    } else {
        auto rng = make_rng(cfg.seed, "theilsen-subsets");
        const long max_draws = 20L * cfg.theilsen_subsets;
        for (long draw = 0; draw < max_draws && solved < cfg.theilsen_subsets; ++draw) take(draw_subset(rng, n, p));
    }
    if (solved < p + 1) {
        throw Error(ErrorKind::DegenerateData, "Theil-Sen: only " + std::to_string(solved) +
                                                   " nonsingular elemental subsets (need " + std::to_string(p + 1) + ")");
    }

    Eigen::VectorXd med(p);
    for (Eigen::Index k = 0; k < p; ++k) med(k) = median(coords[static_cast<std::size_t>(k)]);

    // Back to the original basis.
    Eigen::VectorXd b_std(static_cast<Eigen::Index>(s.cols.size()));
    for (Eigen::Index k = 0; k < b_std.size(); ++k) b_std(k) = med(k);
    Eigen::VectorXd coef;
    if (s.intercept) {
        Standardized shifted = s;
        shifted.y_mean = s.y_mean + med(p - 1);
        coef = shifted.to_original(b_std, X);
    } else {
        coef = s.to_original(b_std, X);
    }
    return finish_with_mask(X, y, std::move(coef), 3.0, solved);
}

FitDiagnostics fit_ransac(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const RegressorConfig& cfg)
{
    cfg.validate();
    if (X.rows() != y.size()) throw Error(ErrorKind::Contract, "design matrix and response differ in length");
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (n <= p) throw Error(ErrorKind::ConsensusFailure, "RANSAC needs more samples than parameters to validate a model");

    double threshold = 0.0;
    if (cfg.ransac_inlier_threshold) {
        threshold = *cfg.ransac_inlier_threshold;
    } else {
        const auto prefit = fit_theilsen(X, y, cfg);
        const Eigen::VectorXd r = y - X * prefit.coefficients;
        std::vector<double> rv(r.data(), r.data() + r.size());
        threshold = std::max(2.0 * mad_scale(rv), inlier_floor(y));
    }

    auto rng = make_rng(cfg.seed, "ransac");
    std::vector<bool> best_mask;
    long best_count = -1;
    double best_ss = std::numeric_limits<double>::infinity();
    for (int it = 0; it < cfg.ransac_iters; ++it) {
        const auto idx = draw_subset(rng, n, p);
        const auto sol = solve_subset(X, y, idx);
        if (!sol) continue;
        const Eigen::VectorXd r = y - X * *sol;
        std::vector<bool> mask(static_cast<std::size_t>(n));
        long count = 0;
        double ss = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const bool in = std::abs(r(i)) <= threshold;
            mask[static_cast<std::size_t>(i)] = in;
            if (in) {
                ++count;
                ss += r(i) * r(i);
            }
        }
        if (count > best_count || (count == best_count && ss < best_ss)) {
            best_count = count;
            best_ss = ss;
            best_mask = std::move(mask);
        }
    }
    if (best_count < p + 1) {
        throw Error(ErrorKind::ConsensusFailure, "RANSAC: no consensus set of at least " + std::to_string(p + 1) +
                                                     " samples within threshold " + std::to_string(threshold));
    }

    Eigen::MatrixXd Xs(best_count, p);
    Eigen::VectorXd ys(best_count);
    Eigen::Index row = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!best_mask[static_cast<std::size_t>(i)]) continue;
        Xs.row(row) = X.row(i);
        ys(row) = y(i);
        ++row;
    }
    FitDiagnostics d;
    d.coefficients = solve_ols(Xs, ys);
    d.inlier_mask = std::move(best_mask);
    d.residual_wsd = rms_over(y - X * d.coefficients, d.inlier_mask);
    d.condition_estimate = condition_estimate(Xs, Eigen::VectorXd::Ones(Xs.rows()));
    d.iterations_used = cfg.ransac_iters;
    return d;
}

// --- penalty tuning -------------------------------------------------------

std::vector<double> default_penalty_grid()
{
    std::vector<double> grid{0.0};
    for (int i = 0; i <= 20; ++i) grid.push_back(std::pow(10.0, -4.0 + 4.0 * i / 20.0));
    return grid;
}

std::vector<double> default_l1_ratio_grid() { return {0.0, 0.25, 0.5, 0.75, 1.0}; }

namespace {

Eigen::VectorXd fit_penalized(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, RegressorKind kind, double lambda,
                              double lambda1, const RegressorConfig& cfg, int* iterations = nullptr)
{
    switch (kind) {
    case RegressorKind::Ridge: return fit_ridge(X, y, lambda);
    case RegressorKind::Lasso: return fit_lasso(X, y, lambda, cfg.tol, cfg.max_iters, iterations);
    case RegressorKind::ElasticNet: return fit_elasticnet(X, y, lambda1, lambda, cfg.tol, cfg.max_iters, iterations);
    default: break;
    }
    throw Error(ErrorKind::Config, "penalty tuning applies to Ridge, Lasso and ElasticNet only");
}

}  // namespace

PenaltyChoice tune_penalty_kfold(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, RegressorKind kind,
                                 std::span<const double> grid, const RegressorConfig& cfg,
                                 std::span<const double> l1_grid)
{
    cfg.validate();
    if (grid.empty()) throw Error(ErrorKind::Config, "penalty grid is empty");
    const Eigen::Index n = X.rows();
    const int k = cfg.kfold_k;
    if (k < 2) throw Error(ErrorKind::Config, "k-fold tuning needs k >= 2");
    if (n < 2 * k) {
        throw Error(ErrorKind::InsufficientData, "k-fold tuning needs at least " + std::to_string(2 * k) +
                                                     " samples, got " + std::to_string(n));
    }

    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    auto rng = make_rng(cfg.seed, "kfold");
    for (std::size_t i = perm.size() - 1; i > 0; --i)
        std::swap(perm[i], perm[static_cast<std::size_t>(uniform_index(rng, i + 1))]);
    std::vector<int> fold(static_cast<std::size_t>(n));
    for (std::size_t pos = 0; pos < perm.size(); ++pos) fold[static_cast<std::size_t>(perm[pos])] = static_cast<int>(pos % static_cast<std::size_t>(k));

    struct Split {
        Eigen::MatrixXd Xtr, Xte;
        Eigen::VectorXd ytr, yte;
    };
    std::vector<Split> splits(static_cast<std::size_t>(k));
    for (int f = 0; f < k; ++f) {
        const auto te = std::count(fold.begin(), fold.end(), f);
        auto& s = splits[static_cast<std::size_t>(f)];
        s.Xtr.resize(n - te, X.cols());
        s.Xte.resize(te, X.cols());
        s.ytr.resize(n - te);
        s.yte.resize(te);
        Eigen::Index a = 0, b = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (fold[static_cast<std::size_t>(i)] == f) {
                s.Xte.row(b) = X.row(i);
                s.yte(b++) = y(i);
            } else {
                s.Xtr.row(a) = X.row(i);
                s.ytr(a++) = y(i);
            }
        }
    }

    std::vector<double> lambdas(grid.begin(), grid.end());
    std::sort(lambdas.begin(), lambdas.end());
    std::vector<double> ratios{0.0};
    if (kind == RegressorKind::ElasticNet) {
        ratios = l1_grid.empty() ? default_l1_ratio_grid() : std::vector<double>(l1_grid.begin(), l1_grid.end());
        std::sort(ratios.begin(), ratios.end());
    }

    PenaltyChoice best{0.0, 0.0, std::numeric_limits<double>::infinity()};
    for (double lambda : lambdas) {
        if (!(lambda >= 0.0)) throw Error(ErrorKind::Config, "penalty grid values must be >= 0");
        for (double ratio : ratios) {
            double total = 0.0;
            bool ok = true;
            for (const auto& s : splits) {
                try {
                    const auto coef = fit_penalized(s.Xtr, s.ytr, kind, lambda, ratio, cfg);
                    total += std::sqrt((s.yte - s.Xte * coef).squaredNorm() / static_cast<double>(s.yte.size()));
                } catch (const Error&) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            const double score = total / k;
            if (score < best.cv_rmse * (1.0 - 1e-12)) best = {lambda, ratio, score};
        }
    }
    if (!std::isfinite(best.cv_rmse)) throw Error(ErrorKind::Convergence, "no penalty value could be fitted in every fold");
    return best;
}

FitDiagnostics fit_regressor(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                             const RegressorConfig& cfg)
{
    cfg.validate();
    switch (cfg.kind) {
    case RegressorKind::RANSAC: return fit_ransac(X, y, cfg);
    case RegressorKind::TheilSen: return fit_theilsen(X, y, cfg);
    default: break;
    }

    FitDiagnostics d;
    const Eigen::VectorXd unit = Eigen::VectorXd::Ones(X.rows());
    switch (cfg.kind) {
    case RegressorKind::OLS: d.coefficients = solve_ols(X, y); break;
    case RegressorKind::WLS: d.coefficients = solve_wls(X, y, w); break;
    case RegressorKind::Ridge:
    case RegressorKind::Lasso:
    case RegressorKind::ElasticNet: {
        double lambda = cfg.kind == RegressorKind::ElasticNet ? cfg.lambda2 : cfg.lambda;
        double lambda1 = cfg.lambda1;
        if (cfg.tune_penalty) {
            const auto grid = default_penalty_grid();
            const auto choice = tune_penalty_kfold(X, y, cfg.kind, grid, cfg);
            lambda = choice.lambda;
            lambda1 = choice.lambda1;
        }
        d.coefficients = fit_penalized(X, y, cfg.kind, lambda, lambda1, cfg, &d.iterations_used);
        d.lambda = lambda;
        d.lambda1 = lambda1;
        break;
    }
    default: break;
    }
    d.inlier_mask.assign(static_cast<std::size_t>(X.rows()), true);
    const Eigen::VectorXd r = y - X * d.coefficients;
    const Eigen::VectorXd& weights = cfg.kind == RegressorKind::WLS ? w : unit;
    const double sw = weights.sum();
    d.residual_wsd = sw > 0.0 ? std::sqrt(weights.dot(r.cwiseAbs2()) / sw) : 0.0;
    d.condition_estimate = condition_estimate(X, weights);
    return d;
}

}  // namespace pathfuse
