#include "hgf/field.hpp"

#include <bit>
#include <cmath>

#include "hgf/errors.hpp"
#include "hgf/kernels/parallel.hpp"

namespace hgf {

Field::Field(const ChartGrid& grid, int rank, std::uint32_t upper_mask)
    : grid_(grid),
      rank_(rank),
      ncomp_(tensor_components(grid.dim(), rank)),
      upper_mask_(upper_mask),
      valid_(grid.full_region()),
      data_(grid.size() * static_cast<std::size_t>(ncomp_), 0.0) {}

int Field::upper_count() const noexcept { return std::popcount(upper_mask_); }

bool Field::all_finite() const noexcept {
    bool ok = true;
    for_each_point(grid_, valid_, [&](std::size_t p) {
        for (double v : at(p))
            if (!std::isfinite(v)) ok = false;
    }, /*parallel=*/false);
    return ok;
}

Field Field::zeros_like() const {
    Field f(grid_, rank_, upper_mask_);
    f.valid_ = valid_;
    return f;
}

void require_nonempty(const Region& r, const char* what) {
    if (r.empty()) throw Error(ErrorKind::RegionExhausted, std::string("valid region exhausted in ") + what);
}

Field axpby(double a, const Field& x, double b, const Field& y) {
    Field out = x.zeros_like();
    out.set_valid(x.valid().intersect(y.valid()));
    const int nc = x.components();
    for_each_point(x.grid(), out.valid(), [&](std::size_t p) {
        auto o = out.at(p);
        auto xs = x.at(p);
        auto ys = y.at(p);
        for (int c = 0; c < nc; ++c) o[c] = a * xs[c] + b * ys[c];
    });
    return out;
}

Field scaled(double a, const Field& x) {
    Field out = x.zeros_like();
    const int nc = x.components();
    for_each_point(x.grid(), out.valid(), [&](std::size_t p) {
        auto o = out.at(p);
        auto xs = x.at(p);
        for (int c = 0; c < nc; ++c) o[c] = a * xs[c];
    });
    return out;
}

void symmetrize_rank2(Field& t) {
    const int n = t.dim();
    for_each_point(t.grid(), t.valid(), [&](std::size_t p) {
        auto v = t.at(p);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double s = 0.5 * (v[i * n + j] + v[j * n + i]);
                v[i * n + j] = s;
                v[j * n + i] = s;
            }
    });
}

}  // namespace hgf
