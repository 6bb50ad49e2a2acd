// Wall-clock timings of the OpenMP kernels against their serial references.
// Usage: hgf_bench [points] [repeats]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "hgf/flow.hpp"
#include "hgf/kernels/reduce.hpp"
#include "hgf/kernels/stencil.hpp"
#include "hgf/presets.hpp"

using namespace hgf;

namespace {

template <class F>
double best_of(int repeats, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const std::chrono::duration<double> d = std::chrono::steady_clock::now() - t0;
        best = std::min(best, d.count());
    }
    return best;
}

void row(const char* name, double serial, double parallel) {
    if (serial > 0)
        std::printf("%-28s serial %9.3f ms  parallel %9.3f ms  ratio %5.2f\n", name, 1e3 * serial, 1e3 * parallel,
                    serial / parallel);
    else
        std::printf("%-28s                    parallel %9.3f ms\n", name, 1e3 * parallel);
}

volatile double sink;

}  // namespace

int main(int argc, char** argv) {
    const int points = argc > 1 ? std::atoi(argv[1]) : 24;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 5;
    std::printf("threads %d, 3-torus %d^3, best of %d\n", omp_get_max_threads(), points, repeats);

    MetricPreset p;
    p.base = BaseKind::RandomSmooth;
    p.epsilon = 0.1;
    p.seed = 1;
    p.velocity = {VelocityKind::RandomSmooth, 0.05, 2};
    const ChartGrid grid = torus_grid(3, points);
    const PresetState ps = instantiate(p, grid);

    for (int order : {1, 2}) {
        const double s = best_of(repeats, [&] { sink = serial::partial_derivative(ps.g.g, 0, order).values()[0]; });
        const double q = best_of(repeats, [&] { sink = partial_derivative(ps.g.g, 0, order).values()[0]; });
        row(order == 1 ? "partial_derivative d1" : "partial_derivative d2", s, q);
    }

    std::vector<double> xs(std::size_t(1) << 22);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 1.0 / double(i + 1);
    row("pairwise_sum 4M", best_of(repeats, [&] { sink = serial::pairwise_sum(xs); }),
        best_of(repeats, [&] { sink = pairwise_sum(xs); }));

    row("curvature", 0.0, best_of(repeats, [&] { sink = curvature(ps.g).scalar.values()[0]; }));
    const FlowState s0{0.0, ps.g, ps.h, 0};
    const double dt = 0.25 * grid.min_spacing();
    row("rk4 step", 0.0, best_of(repeats, [&] { sink = step(s0, {}, dt).g.g.values()[0]; }));
    return 0;
}
