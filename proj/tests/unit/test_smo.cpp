#include "ared/smo.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ared;

namespace {

struct Dataset {
    std::vector<std::vector<double>> pts;
    std::vector<double> z;
};

Dataset random_dataset(std::size_t n, std::size_t dim, unsigned seed) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> u(0, 1), t(-2, 2);
    Dataset d;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> p(dim);
        for (auto& x : p) x = u(g);
        d.pts.push_back(p);
        d.z.push_back(t(g));
    }
    return d;
}

} // namespace

TEST_CASE("SMO optimum matches the active-set enumeration") {
    for (unsigned seed = 0; seed < 12; ++seed) {
        const std::size_t n = 3 + seed % 5;
        const auto d = random_dataset(n, 1 + seed % 2, seed);
        const double gamma = 0.5 + 3.0 * seed;
        const double C = std::pow(10.0, -1.0 + 0.5 * (seed % 6));
        const double eps = 0.05;
        const auto K = oracle::gram(d.pts, gamma);
        const auto ref = oracle::brute_force_svr_dual(K, d.z, eps, C);
        EpsilonSvrProblem prob(K, n, d.z, eps);
        const auto sol = prob.solve(C, SmoOptions{1e-9, 0});
        REQUIRE(sol.converged);
        CHECK(std::abs(sol.objective - ref.objective) <= 1e-6);
        CHECK(std::abs(svr_dual_objective(K, n, d.z, sol.beta, eps) - sol.objective) <= 1e-9);
        for (std::size_t i = 0; i < n; ++i) {
            double fs = sol.bias, fr = ref.bias;
            for (std::size_t j = 0; j < n; ++j) {
                fs += sol.beta[j] * K[i * n + j];
                fr += ref.beta[j] * K[i * n + j];
            }
            CHECK(std::abs(fs - fr) <= 1e-4);
        }
    }
}

TEST_CASE("dual feasibility holds at convergence") {
    for (unsigned seed = 20; seed < 40; ++seed) {
        const std::size_t n = 10 + seed % 20;
        const auto d = random_dataset(n, 2, seed);
        const auto K = oracle::gram(d.pts, 10.0);
        const double C = 3.0;
        EpsilonSvrProblem prob(K, n, d.z, 0.01);
        const auto sol = prob.solve(C, SmoOptions{});
        REQUIRE(sol.converged);
        CHECK(sol.kkt_gap <= 1e-6);
        double sum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(sol.alpha[i] >= 0.0);
            CHECK(sol.alpha[n + i] >= 0.0);
            CHECK(sol.alpha[i] <= C);
            CHECK(sol.alpha[n + i] <= C);
            CHECK(sol.beta[i] == sol.alpha[i] - sol.alpha[n + i]);
            CHECK(std::abs(sol.beta[i]) <= C + 1e-6);
            sum += sol.beta[i];
        }
        CHECK(std::abs(sum) <= 1e-6);
    }
}

TEST_CASE("two-sample dual agrees with a dense grid search") {
    for (double gamma : {0.1, 1.0, 10.0, 100.0}) {
        for (double C : {0.01, 0.5, 10.0, 1e4}) {
            const std::vector<std::vector<double>> pts{{0.2}, {0.9}};
            const std::vector<double> z{1.0, -1.0};
            const double eps = 0.02;
            const auto K = oracle::gram(pts, gamma);
            const double t = oracle::two_point_dual_argmax(K[0], K[3], K[1], z[0], z[1], eps, C);
            EpsilonSvrProblem prob(K, 2, z, eps);
            const auto sol = prob.solve(C, SmoOptions{1e-10, 0});
            REQUIRE(sol.converged);
            CHECK(sol.beta[0] == doctest::Approx(t).epsilon(1e-6).scale(1.0));
            CHECK(sol.beta[1] == doctest::Approx(-t).epsilon(1e-6).scale(1.0));
            // When the box does not clip the optimum, both targets sit on the tube edge.
            if (std::abs(t) < C * (1 - 1e-6)) {
                for (int i = 0; i < 2; ++i) {
                    const double f = sol.bias + sol.beta[0] * K[i * 2] + sol.beta[1] * K[i * 2 + 1];
                    CHECK(std::abs(f - z[i]) <= eps + 1e-6);
                }
            }
        }
    }
}

TEST_CASE("warm start reaches the same optimum") {
    const auto d = random_dataset(25, 2, 77);
    const auto K = oracle::gram(d.pts, 30.0);
    EpsilonSvrProblem prob(K, 25, d.z, 0.01);
    std::vector<double> warm;
    for (double C : {0.1, 1.0, 10.0, 100.0}) {
        const auto cold = prob.solve(C, SmoOptions{});
        const auto hot = prob.solve(C, SmoOptions{}, warm);
        REQUIRE(cold.converged);
        REQUIRE(hot.converged);
        CHECK(hot.objective == doctest::Approx(cold.objective).epsilon(1e-8));
        warm = hot.alpha;
    }
}

TEST_CASE("constant targets give the constant function") {
    const auto d = random_dataset(6, 1, 3);
    const std::vector<double> z(6, 0.0);
    const auto K = oracle::gram(d.pts, 5.0);
    EpsilonSvrProblem prob(K, 6, z, 0.01);
    const auto sol = prob.solve(10.0, SmoOptions{});
    for (double b : sol.beta) CHECK(b == 0.0);
    CHECK(std::abs(sol.bias) <= 0.01);
}

TEST_CASE("iteration cap is reported as non-convergence") {
    const auto d = random_dataset(30, 2, 5);
    const auto K = oracle::gram(d.pts, 1e-3);
    EpsilonSvrProblem prob(K, 30, d.z, 0.0);
    const auto sol = prob.solve(1e9, SmoOptions{1e-6, 5});
    CHECK_FALSE(sol.converged);
    CHECK(sol.iterations == 5);
}
