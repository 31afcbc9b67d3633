#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace patchsim::kernels {

/// Data-parallel inner loops, each in two builds: an OpenMP version (the
/// default entry point) and a `_serial` reference the tests compare
/// against. `bench_kernels` times the two side by side.

/// Trapezoidal integral of uniformly sampled values with spacing dt.
double trapezoid_serial(std::span<const double> values, double dt);
double trapezoid(std::span<const double> values, double dt);

/// Fill out[i] with the square-wave Fourier partial sum at
/// t = t0 + i * dt_grid.
void fill_fourier_square_serial(std::span<double> out, double t0, double dt_grid,
                                int n_terms, double period, double amplitude);
void fill_fourier_square(std::span<double> out, double t0, double dt_grid,
                         int n_terms, double period, double amplitude);

/// Maximum of the square-wave partial sum over a dense n_grid-point sweep
/// of [0, period/2]. This is where the jump-point overshoot lives.
double fourier_square_max_serial(int n_terms, double period, double amplitude,
                                 std::size_t n_grid);
double fourier_square_max(int n_terms, double period, double amplitude,
                          std::size_t n_grid);

/// One (i, j) couple of sample indices, i < j.
using IndexPair = std::pair<std::size_t, std::size_t>;

/// Everything the pairwise monotonicity test of a representation scheme
/// needs, gathered in one O(n^2) sweep over unordered pairs:
///   - illformed: equal represented quantities whose magnitudes differ by
///     at least the resolution,
///   - inc/dec_violations: pairs breaking the increasing (resp. decreasing)
///     hypothesis,
///   - constrained_pairs: pairs that imposed any constraint at all (zero
///     means the scheme is degenerate at this resolution).
/// Pairs closer than the resolution impose nothing; equal magnitudes have
/// no smaller member and impose nothing either.
struct PairwiseReport {
    std::vector<IndexPair> illformed;
    std::vector<IndexPair> inc_violations;
    std::vector<IndexPair> dec_violations;
    std::size_t constrained_pairs = 0;
};

PairwiseReport pairwise_check_serial(std::span<const double> q, std::span<const double> p,
                                     double resolution);
PairwiseReport pairwise_check(std::span<const double> q, std::span<const double> p,
                              double resolution);

} // namespace patchsim::kernels
