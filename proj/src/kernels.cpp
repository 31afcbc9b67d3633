#include "patchsim/kernels.hpp"

#include "patchsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace patchsim::kernels {

namespace {

double square_partial_sum(double t, int n_terms, double omega) {
    double sum = 0.0;
    for (int j = 0; j < n_terms; ++j) {
        const int k = 2 * j + 1;
        sum += std::sin(omega * k * t) / k;
    }
    return sum;
}

void check_grid_args(int n_terms, double period) {
    if (n_terms < 1) {
        throw ContractError("fourier kernel: n_terms must be >= 1");
    }
    if (!(period > 0.0)) {
        throw ContractError("fourier kernel: period must be > 0");
    }
}

} // namespace

double trapezoid_serial(std::span<const double> values, double dt) {
    if (values.size() < 2) {
        throw ContractError("trapezoid: needs at least two samples");
    }
    double sum = 0.5 * (values.front() + values.back());
    for (std::size_t k = 1; k + 1 < values.size(); ++k) {
        sum += values[k];
    }
    return sum * dt;
}

double trapezoid(std::span<const double> values, double dt) {
    if (values.size() < 2) {
        throw ContractError("trapezoid: needs at least two samples");
    }
    const auto n = static_cast<std::int64_t>(values.size());
    double sum = 0.5 * (values.front() + values.back());
#pragma omp parallel for reduction(+ : sum) schedule(static)
    for (std::int64_t k = 1; k < n - 1; ++k) {
        sum += values[static_cast<std::size_t>(k)];
    }
    return sum * dt;
}

void fill_fourier_square_serial(std::span<double> out, double t0, double dt_grid,
                                int n_terms, double period, double amplitude) {
    check_grid_args(n_terms, period);
    const double omega = 2.0 * M_PI / period;
    const double scale = 4.0 * amplitude / M_PI;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double t = t0 + static_cast<double>(i) * dt_grid;
        out[i] = scale * square_partial_sum(t, n_terms, omega);
    }
}

void fill_fourier_square(std::span<double> out, double t0, double dt_grid,
                         int n_terms, double period, double amplitude) {
    check_grid_args(n_terms, period);
    const double omega = 2.0 * M_PI / period;
    const double scale = 4.0 * amplitude / M_PI;
    const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const double t = t0 + static_cast<double>(i) * dt_grid;
        out[static_cast<std::size_t>(i)] = scale * square_partial_sum(t, n_terms, omega);
    }
}

double fourier_square_max_serial(int n_terms, double period, double amplitude,
                                 std::size_t n_grid) {
    check_grid_args(n_terms, period);
    if (n_grid < 2) {
        throw ContractError("fourier_square_max: n_grid must be >= 2");
    }
    const double omega = 2.0 * M_PI / period;
    const double step = 0.5 * period / static_cast<double>(n_grid - 1);
    double best = -HUGE_VAL;
    for (std::size_t i = 0; i < n_grid; ++i) {
        const double t = static_cast<double>(i) * step;
        best = std::max(best, square_partial_sum(t, n_terms, omega));
    }
    return 4.0 * amplitude / M_PI * best;
}

double fourier_square_max(int n_terms, double period, double amplitude,
                          std::size_t n_grid) {
    check_grid_args(n_terms, period);
    if (n_grid < 2) {
        throw ContractError("fourier_square_max: n_grid must be >= 2");
    }
    const double omega = 2.0 * M_PI / period;
    const double step = 0.5 * period / static_cast<double>(n_grid - 1);
    const auto n = static_cast<std::int64_t>(n_grid);
    double best = -HUGE_VAL;
#pragma omp parallel for reduction(max : best) schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * step;
        best = std::max(best, square_partial_sum(t, n_terms, omega));
    }
    return 4.0 * amplitude / M_PI * best;
}

namespace {

// Classify one unordered pair. Appends to the report row and counts
// constrained pairs.
inline void check_pair(std::size_t i, std::size_t j, double qi, double qj, double pi,
                       double pj, double r, PairwiseReport& row) {
    const double dp = std::abs(pi - pj);
    if (dp < r || pi == pj) {
        return;  // within resolution, or no strictly smaller magnitude
    }
    if (qi == qj) {
        row.illformed.emplace_back(i, j);
        return;
    }
    ++row.constrained_pairs;
    // lo = index with the smaller magnitude P.
    const bool i_lo = pi < pj;
    const double q_lo = i_lo ? qi : qj;
    const double q_hi = i_lo ? qj : qi;
    if (!(q_lo < q_hi)) {
        row.inc_violations.emplace_back(i, j);
    }
    if (!(q_lo > q_hi)) {
        row.dec_violations.emplace_back(i, j);
    }
}

void append(PairwiseReport& into, PairwiseReport&& row) {
    into.illformed.insert(into.illformed.end(), row.illformed.begin(), row.illformed.end());
    into.inc_violations.insert(into.inc_violations.end(), row.inc_violations.begin(),
                               row.inc_violations.end());
    into.dec_violations.insert(into.dec_violations.end(), row.dec_violations.begin(),
                               row.dec_violations.end());
    into.constrained_pairs += row.constrained_pairs;
}

} // namespace

PairwiseReport pairwise_check_serial(std::span<const double> q, std::span<const double> p,
                                     double resolution) {
    if (q.size() != p.size()) {
        throw ContractError("pairwise_check: Q and P lengths differ");
    }
    PairwiseReport report;
    for (std::size_t i = 0; i < q.size(); ++i) {
        for (std::size_t j = i + 1; j < q.size(); ++j) {
            check_pair(i, j, q[i], q[j], p[i], p[j], resolution, report);
        }
    }
    return report;
}

PairwiseReport pairwise_check(std::span<const double> q, std::span<const double> p,
                              double resolution) {
    if (q.size() != p.size()) {
        throw ContractError("pairwise_check: Q and P lengths differ");
    }
    const std::size_t n = q.size();
    // Rows are filled independently and concatenated in i order, so the
    // result is identical to the serial sweep no matter the thread count.
    std::vector<PairwiseReport> rows(n);
    const auto ni = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < ni; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        PairwiseReport& row = rows[ui];
        for (std::size_t j = ui + 1; j < n; ++j) {
            check_pair(ui, j, q[ui], q[j], p[ui], p[j], resolution, row);
        }
    }
    PairwiseReport report;
    for (auto& row : rows) {
        append(report, std::move(row));
    }
    return report;
}

} // namespace patchsim::kernels
