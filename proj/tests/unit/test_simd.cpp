#include "ared/simd/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace ared::simd;

namespace {

std::vector<double> random_vec(std::size_t n, double lo, double hi, unsigned seed) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(g);
    return v;
}

bool close(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max(1.0, std::abs(b));
}

} // namespace

TEST_CASE("scalar table matches direct formulas") {
    const auto& k = kernels(Isa::scalar);
    const auto pts = random_vec(5 * 3, 0, 1, 1);
    std::vector<double> d(25);
    k.squared_distances(pts.data(), 5, 3, d.data());
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            double s = 0;
            for (int t = 0; t < 3; ++t) s += std::pow(pts[i * 3 + t] - pts[j * 3 + t], 2);
            CHECK(d[i * 5 + j] == doctest::Approx(s).epsilon(1e-14));
        }
    std::vector<double> e(25);
    k.rbf_from_sqdist(d.data(), 25, 2.5, e.data());
    for (int i = 0; i < 25; ++i) CHECK(e[i] == doctest::Approx(std::exp(-2.5 * d[i])).epsilon(1e-15));
}

TEST_CASE("AVX2 variants agree with the scalar reference") {
    if (!cpu_supports(Isa::avx2)) {
        MESSAGE("AVX2 not available; skipping equivalence check");
        return;
    }
    const auto& s = kernels(Isa::scalar);
    const auto& v = kernels(Isa::avx2);
    REQUIRE(v.isa == Isa::avx2);
    for (std::size_t n : {1u, 2u, 3u, 7u, 8u, 13u, 64u}) {
        for (std::size_t dim : {1u, 2u, 3u, 5u}) {
            const auto pts = random_vec(n * dim, -1, 2, static_cast<unsigned>(n * 31 + dim));
            std::vector<double> ds(n * n), dv(n * n);
            s.squared_distances(pts.data(), n, dim, ds.data());
            v.squared_distances(pts.data(), n, dim, dv.data());
            for (std::size_t i = 0; i < n * n; ++i) CHECK(close(dv[i], ds[i], 1e-13));

            for (double gamma : {1e-11, 1e-3, 1.0, 31.6, 1e4, 1e11}) {
                std::vector<double> es(n * n), ev(n * n);
                s.rbf_from_sqdist(ds.data(), n * n, gamma, es.data());
                v.rbf_from_sqdist(ds.data(), n * n, gamma, ev.data());
                for (std::size_t i = 0; i < n * n; ++i) CHECK(std::abs(ev[i] - es[i]) <= 1e-14 + 1e-13 * es[i]);

                const auto coef = random_vec(n, -3, 3, 7);
                const auto x = random_vec(dim, -1, 2, 8);
                const double rs = s.rbf_expansion(pts.data(), n, dim, coef.data(), x.data(), gamma);
                const double rv = v.rbf_expansion(pts.data(), n, dim, coef.data(), x.data(), gamma);
                CHECK(std::abs(rs - rv) <= 1e-12 * (1.0 + std::abs(rs)));
            }
        }
    }
    for (std::size_t count : {0u, 1u, 3u, 4u, 5u, 17u, 100u}) {
        auto g1 = random_vec(count, -1, 1, 3);
        auto g2 = g1;
        const auto u = random_vec(count, -1, 1, 4);
        const auto w = random_vec(count, -1, 1, 5);
        s.axpy2(g1.data(), u.data(), w.data(), 0.37, -1.9, count);
        v.axpy2(g2.data(), u.data(), w.data(), 0.37, -1.9, count);
        for (std::size_t i = 0; i < count; ++i) CHECK(close(g1[i], g2[i], 1e-15));
    }
}

TEST_CASE("exp kernel handles extreme arguments") {
    for (Isa isa : {Isa::scalar, Isa::avx2}) {
        if (!cpu_supports(isa)) continue;
        const auto& k = kernels(isa);
        std::vector<double> d{0.0, 1e-300, 700.0, 708.0, 709.0, 745.0, 800.0, 1e300};
        std::vector<double> out(d.size());
        k.rbf_from_sqdist(d.data(), d.size(), 1.0, out.data());
        CHECK(out[0] == 1.0);
        CHECK(out[1] == 1.0);
        CHECK(out[2] == doctest::Approx(std::exp(-700.0)).epsilon(1e-12));
        for (std::size_t i = 3; i < d.size(); ++i) {
            CHECK(out[i] >= 0.0);
            CHECK(out[i] <= std::exp(-707.0));
        }
    }
}

TEST_CASE("force_isa pins the dispatch") {
    force_isa(Isa::scalar);
    CHECK(kernels().isa == Isa::scalar);
    CHECK(active_isa() == Isa::scalar);
    force_isa(std::nullopt);
    CHECK(kernels().isa == active_isa());
}
