#include "patchsim/kernels.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>
#include <vector>

// Times each OpenMP kernel against its serial reference and checks that
// the two agree. --quick shrinks the sizes for use as a CI smoke test.

namespace {

using Clock = std::chrono::steady_clock;
namespace k = patchsim::kernels;

double best_of(int reps, const auto& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        fn();
        const auto t1 = Clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void report(const char* name, std::size_t n, double serial_ms, double omp_ms, bool agree) {
    std::printf("%-20s n=%-9zu serial %9.3f ms   omp %9.3f ms   speedup %5.2fx   %s\n", name, n,
                serial_ms, omp_ms, serial_ms / omp_ms, agree ? "agree" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    bool quick = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) {
            quick = true;
        }
    }
    const int reps = quick ? 2 : 3;
    bool all_agree = true;

    {
        const std::size_t n = quick ? 1'000'000 : 10'000'000;
        std::vector<double> values(n);
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (double& v : values) {
            v = dist(rng);
        }
        double a = 0.0, b = 0.0;
        const double serial = best_of(reps, [&] { a = k::trapezoid_serial(values, 1e-6); });
        const double omp = best_of(reps, [&] { b = k::trapezoid(values, 1e-6); });
        const bool agree = std::abs(a - b) < 1e-9;
        all_agree = all_agree && agree;
        report("trapezoid", n, serial, omp, agree);
    }

    {
        const std::size_t n = quick ? 20'000 : 200'000;
        std::vector<double> out_a(n), out_b(n);
        const double serial =
            best_of(reps, [&] { k::fill_fourier_square_serial(out_a, 0.0, 1e-5, 100, 2.0, 1.0); });
        const double omp =
            best_of(reps, [&] { k::fill_fourier_square(out_b, 0.0, 1e-5, 100, 2.0, 1.0); });
        bool agree = true;
        for (std::size_t i = 0; i < n; ++i) {
            agree = agree && out_a[i] == out_b[i];
        }
        all_agree = all_agree && agree;
        report("fill_fourier_square", n, serial, omp, agree);
    }

    {
        const std::size_t n = quick ? 200'001 : 2'000'001;
        double a = 0.0, b = 0.0;
        const double serial = best_of(reps, [&] { a = k::fourier_square_max_serial(100, 2.0, 1.0, n); });
        const double omp = best_of(reps, [&] { b = k::fourier_square_max(100, 2.0, 1.0, n); });
        const bool agree = a == b;
        all_agree = all_agree && agree;
        report("fourier_square_max", n, serial, omp, agree);
    }

    {
        const std::size_t n = quick ? 800 : 3000;
        std::vector<double> q(n), p(n);
        std::mt19937_64 rng(11);
        std::normal_distribution<double> noise(0.0, 0.3);
        for (std::size_t i = 0; i < n; ++i) {
            q[i] = static_cast<double>(i);
            p[i] = static_cast<double>(i) + noise(rng);  // mostly monotone, some violations
        }
        k::PairwiseReport ra, rb;
        const double serial = best_of(reps, [&] { ra = k::pairwise_check_serial(q, p, 0.5); });
        const double omp = best_of(reps, [&] { rb = k::pairwise_check(q, p, 0.5); });
        const bool agree = ra.illformed == rb.illformed && ra.inc_violations == rb.inc_violations &&
                           ra.dec_violations == rb.dec_violations &&
                           ra.constrained_pairs == rb.constrained_pairs;
        all_agree = all_agree && agree;
        report("pairwise_check", n, serial, omp, agree);
    }

    if (!all_agree) {
        std::printf("FAIL: OpenMP kernels disagree with serial references\n");
        return 1;
    }
    return 0;
}
