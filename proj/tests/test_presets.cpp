#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hgf/errors.hpp"
#include "hgf/index.hpp"
#include "hgf/kernels/reduce.hpp"
#include "hgf/presets.hpp"
#include "support.hpp"

using namespace hgf;
using std::numbers::pi;

namespace {

ErrorKind kind_of(const auto& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::Io;
}

double max_diff(const Field& a, const Field& b) {
    return field_max_abs(axpby(1.0, a, -1.0, b), a.grid().full_region());
}

MetricPreset sphere() {
    MetricPreset p;
    p.base = BaseKind::SphereBand;
    return p;
}

}  // namespace

TEST_CASE("preset charts") {
    const ChartGrid t = torus_grid(3, 16);
    CHECK(t.periodic());
    CHECK(t.spacing()[2] == doctest::Approx(2 * pi / 16));
    const ChartGrid s = sphere_band_grid(2, 32);
    CHECK_FALSE(s.periodic());
    CHECK(s.coordinate(0, 0) == doctest::Approx(0.3 * pi));
    CHECK(s.coordinate(0, 32) == doctest::Approx(0.7 * pi));
    CHECK(s.spacing()[1] == doctest::Approx(2 * pi / 32));
    CHECK(s.margin() == 4);
}

TEST_CASE("sphere band metric") {
    const ChartGrid g = sphere_band_grid(2, 16);
    MetricPreset p = sphere();
    p.radius = 2.0;
    const MetricField m = instantiate(p, g).g;
    CHECK(test::max_error(m.g, g.full_region(), [](const test::Pos& x, double* w) {
              const double s = std::sin(x[0]);
              w[0] = 4.0;
              w[1] = w[2] = 0.0;
              w[3] = 4.0 * s * s;
          }) < 1e-14);
    CHECK(einstein_constant(p, 2) == doctest::Approx(0.25));
    CHECK(einstein_constant(sphere(), 3) == doctest::Approx(2.0));
    CHECK(einstein_constant(MetricPreset{}, 3) == 0.0);
}

TEST_CASE("conformal sphere family at t = 0.5") {
    MetricPreset p = sphere();
    p.family = FamilyKind::Conformal;
    p.lambda = 1.0;
    p.v = 0.0;
    const ChartGrid g = sphere_band_grid(2, 16);
    const Field g0 = instantiate(sphere(), g).g.g;
    const PresetState s = instantiate(p, g, 0.5);
    CHECK(max_diff(s.g.g, scaled(0.75, g0)) < 1e-15);
    CHECK(max_diff(s.h.h, scaled(-1.0, g0)) < 1e-15);
    CHECK(family_factor(p, 0.5) == doctest::Approx(0.75));
    CHECK(family_rate(p, 0.5) == doctest::Approx(-1.0));
}

TEST_CASE("quadratic flat family at t = 2") {
    MetricPreset p;
    p.family = FamilyKind::Quadratic;
    p.kappa = 0.0;
    p.c1 = 1.0;
    p.c2 = 1.0;
    const ChartGrid g = torus_grid(2, 8);
    const Field g0 = instantiate(MetricPreset{}, g).g.g;
    const PresetState s = instantiate(p, g, 2.0);
    CHECK(max_diff(s.g.g, scaled(3.0, g0)) == 0.0);
    CHECK(max_diff(s.h.h, g0) == 0.0);

    MetricPreset q = sphere();
    q.family = FamilyKind::Quadratic;
    q.kappa = 0.5;
    q.c1 = 0.0;
    q.c2 = 1.0;
    CHECK(family_factor(q, 0.5) == doctest::Approx(0.75));
    CHECK_NOTHROW(instantiate(q, sphere_band_grid(2, 16), 0.5));
}

TEST_CASE("family validation") {
    const ChartGrid band = sphere_band_grid(2, 16);
    MetricPreset wrong = sphere();
    wrong.family = FamilyKind::Conformal;
    wrong.lambda = 2.0;
    CHECK(kind_of([&] { instantiate(wrong, band); }) == ErrorKind::ConfigError);

    MetricPreset not_einstein;
    not_einstein.base = BaseKind::RandomSmooth;
    not_einstein.family = FamilyKind::Conformal;
    CHECK(kind_of([&] { instantiate(not_einstein, torus_grid(2, 8)); }) == ErrorKind::ConfigError);
    CHECK(kind_of([&] { einstein_constant(not_einstein, 2); }) == ErrorKind::ConfigError);

    MetricPreset with_velocity = sphere();
    with_velocity.family = FamilyKind::Conformal;
    with_velocity.lambda = 1.0;
    with_velocity.velocity = {VelocityKind::Conformal, 1.0, 0};
    CHECK(kind_of([&] { instantiate(with_velocity, band); }) == ErrorKind::ConfigError);

    MetricPreset fam = sphere();
    fam.family = FamilyKind::Conformal;
    fam.lambda = 1.0;
    CHECK(kind_of([&] { instantiate(fam, band, 1.0); }) == ErrorKind::MetricDegenerate);
    CHECK(kind_of([&] { instantiate(fam, band, 1.5); }) == ErrorKind::MetricDegenerate);
}

TEST_CASE("einstein residual of the sphere band converges") {
    const double e32 = einstein_residual(sphere(), sphere_band_grid(2, 32));
    const double e64 = einstein_residual(sphere(), sphere_band_grid(2, 64));
    CHECK(e64 < 1e-5);
    CHECK(std::log2(e32 / e64) >= 3.5);
    CHECK(einstein_residual(MetricPreset{}, torus_grid(3, 8)) == 0.0);
}

TEST_CASE("conformal torus") {
    MetricPreset p;
    p.base = BaseKind::ConformalTorus;
    p.epsilon = 0.2;
    p.mode = {2, 1, 0};
    const ChartGrid g = torus_grid(2, 16);
    const Field m = instantiate(p, g).g.g;
    CHECK(test::max_error(m, g.full_region(), [](const test::Pos& x, double* w) {
              const double u = 1.0 + 0.2 * std::cos(2 * x[0] + x[1]);
              w[0] = w[3] = u;
              w[1] = w[2] = 0.0;
          }) < 1e-14);
    p.seed = 5;
    CHECK(max_diff(instantiate(p, g).g.g, m) > 1e-3);
}

TEST_CASE("random smooth metrics are deterministic and SPD") {
    MetricPreset p;
    p.base = BaseKind::RandomSmooth;
    p.epsilon = 0.1;
    p.seed = 42;
    const ChartGrid g = torus_grid(3, 12);
    const Field a = instantiate(p, g).g.g;
    const Field b = instantiate(p, g).g.g;
    CHECK(max_diff(a, b) == 0.0);
    p.seed = 43;
    CHECK(max_diff(instantiate(p, g).g.g, a) > 1e-3);

    const Idx ix{3};
    double lmin = 1e300, asym = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q) {
        lmin = std::min(lmin, min_eigenvalue(a.at(q), 3));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) asym = std::max(asym, std::abs(a(q, ix(i, j)) - a(q, ix(j, i))));
    }
    CHECK(lmin > 0.5);
    CHECK(asym == 0.0);
    // Smooth: halving the perturbation halves the deviation from δ.
    MetricPreset half = p;
    half.epsilon = 0.05;
    const Field flat = instantiate(MetricPreset{}, g).g.g;
    CHECK(max_diff(instantiate(half, g).g.g, flat) == doctest::Approx(0.5 * max_diff(instantiate(p, g).g.g, flat)));
}

TEST_CASE("random velocity") {
    MetricPreset p;
    p.velocity = {VelocityKind::RandomSmooth, 0.05, 9};
    const ChartGrid g = torus_grid(2, 16);
    const PresetState s = instantiate(p, g);
    const double amp = field_max_abs(s.h.h, g.full_region());
    CHECK(amp > 0.0);
    CHECK(amp <= 0.05 + 1e-15);
    CHECK(max_diff(s.g.g, instantiate(MetricPreset{}, g).g.g) == 0.0);
}

TEST_CASE("names round trip") {
    for (BaseKind k : {BaseKind::Flat, BaseKind::SphereBand, BaseKind::ConformalTorus, BaseKind::RandomSmooth})
        CHECK(parse_base_kind(to_string(k)) == k);
    for (FamilyKind k : {FamilyKind::None, FamilyKind::Conformal, FamilyKind::Quadratic})
        CHECK(parse_family_kind(to_string(k)) == k);
    for (VelocityKind k : {VelocityKind::Zero, VelocityKind::Conformal, VelocityKind::RandomSmooth})
        CHECK(parse_velocity_kind(to_string(k)) == k);
    CHECK(kind_of([] { parse_base_kind("hyperboloid"); }) == ErrorKind::ConfigError);
}

TEST_CASE("unit draw") {
    CHECK(unit_draw(0) == 0.0);
    CHECK(unit_draw(~0ULL) < 1.0);
    CHECK(unit_draw(1ULL << 63) == 0.5);
}
