#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"

#include "urllc/fading.hpp"
#include "urllc/quadrature.hpp"

using namespace urllc;

namespace {

// Independent oracle: Boost adaptive Gauss-Kronrod on the defining integral.
double boost_F(double G, int n) {
    const int m = n - 1;
    auto f = [&](double g) { return (1.0 - g / G) * boost::math::gamma_p_derivative(static_cast<double>(m), g); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, G, 8, 1e-14);
}

std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> v;
    for (int i = 0; i < points; ++i) v.push_back(lo * std::pow(hi / lo, i / double(points - 1)));
    return v;
}

}  // namespace

TEST_CASE("gain density") {
    for (double g : {0.0, 0.1, 1.0, 7.0}) CHECK(gain_pdf(g, 1) == doctest::Approx(std::exp(-g)).epsilon(1e-14));
    for (int n = 1; n <= 64; ++n) {
        const auto r = quad::integrate([n](double g) { return gain_pdf(g, n); }, 0.0, n + 40.0 * std::sqrt(n) + 40.0,
                                       1e-13);
        CHECK(std::abs(r.value - 1.0) < 1e-10);
    }
    for (int n = 2; n <= 40; ++n) {
        const double mode = n - 1;
        CHECK(gain_pdf(mode, n) > gain_pdf(mode * 0.99, n));
        CHECK(gain_pdf(mode, n) > gain_pdf(mode * 1.01, n));
    }
    CHECK_THROWS_AS(gain_pdf(-1.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(gain_pdf(1.0, 0), std::invalid_argument);
}

TEST_CASE("gain CDF against the regularized incomplete gamma") {
    for (int n : {1, 2, 3, 4, 8, 16, 32, 64, 128}) {
        for (double g : log_grid(1e-6, 400.0, 120)) {
            const double ref = boost::math::gamma_p(static_cast<double>(n), g);
            const double got = gain_cdf(g, n);
            CHECK(std::abs(got - ref) <= 1e-14 + 1e-12 * ref);
        }
    }
    CHECK(gain_cdf(0.0, 3) == 0.0);
    CHECK(gain_cdf(INFINITY, 3) == 1.0);
}

TEST_CASE("F named values") {
    CHECK(drop_bound_F(0.1, 2) == doctest::Approx(1.0 - 1.0 / 0.1 + std::exp(-0.1) / 0.1).epsilon(1e-9));
    CHECK(drop_bound_F(0.1, 2) == doctest::Approx(0.04837).epsilon(1e-4));
    CHECK(drop_bound_F(2e-7, 2) == doctest::Approx(1e-7).epsilon(1e-6));
    for (double g : {1e-8, 1e-6, 1e-4}) CHECK(drop_bound_F(g, 2) == doctest::Approx(g / 2).epsilon(1e-3));
    CHECK(drop_bound_F(1e4, 4) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(drop_bound_F(INFINITY, 4) == 1.0);
    CHECK_THROWS_AS(drop_bound_F(0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS(drop_bound_F(0.0, 2), std::invalid_argument);
}

TEST_CASE("F matches quadrature of its defining integral") {
    double worst = 0.0;
    for (int n : {2, 3, 4, 8, 16, 32, 64, 128}) {
        for (double G : log_grid(1e-6, 10.0, 50)) {
            const double f = drop_bound_F(G, n);
            worst = std::max(worst, std::abs(f - boost_F(G, n)));
            CHECK(f >= 0.0);
            CHECK(f < 1.0);
        }
        // Both branches of the evaluation around G = n - 1.
        for (double G : {n - 1.0 - 1e-9, n - 1.0, n - 1.0 + 1e-9, 1.5 * n, 3.0 * n})
            worst = std::max(worst, std::abs(drop_bound_F(G, n) - boost_F(G, n)));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("F is strictly increasing in the threshold") {
    for (int n : {2, 4, 8, 16, 32}) {
        double prev = 0.0;
        for (double G : log_grid(1e-6, 10.0, 50)) {
            const double f = drop_bound_F(G, n);
            CHECK(f > prev);
            prev = f;
        }
    }
}

TEST_CASE("B endpoints and bound") {
    CHECK(drop_prob_B(1e-12, 1.0, 2) < 1e-20);
    CHECK(drop_prob_B(0.1, 1.0, 2) < drop_bound_F(0.1, 2));
    CHECK(drop_prob_B(0.1, 1.0, 2) > 0.0);
    CHECK_THROWS_AS(drop_prob_B(0.1, 0.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(drop_prob_B(0.1, 1.0, 1), std::invalid_argument);
}

TEST_CASE("B against an independent quadrature") {
    for (int n : {2, 4, 16}) {
        for (double gamma : {0.1, 1.0, 100.0}) {
            for (double G : {1e-3, 0.1, 2.0, 10.0}) {
                auto f = [&](double g) {
                    return (1.0 - std::log1p(g * gamma / G) / std::log1p(gamma)) *
                           boost::math::gamma_p_derivative(static_cast<double>(n), g);
                };
                const double ref = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, G, 8, 1e-14);
                CHECK(std::abs(drop_prob_B(G, gamma, n) - ref) <= 1e-12);
            }
        }
    }
}

TEST_CASE("gain threshold solver") {
    const auto t2 = solve_gain_threshold(2, 1e-7);
    CHECK(t2.g_th == doctest::Approx(2e-7).epsilon(1e-6));
    CHECK(t2.antennas == 2);
    CHECK(t2.eps_target == 1e-7);
    for (int n : {2, 3, 4, 8, 16, 32, 64, 128, 512}) {
        double prev_g = 0.0;
        for (double eps : {1e-9, 1e-7, 1e-5, 1e-3, 0.1, 0.5}) {
            const auto t = solve_gain_threshold(n, eps);
            CHECK(t.g_th > 0.0);
            CHECK(t.g_th > prev_g);
            const double f = drop_bound_F(t.g_th, n);
            CHECK(f <= eps);
            CHECK(std::abs(f - eps) <= 1e-3 * eps);
            CHECK(std::abs(f - eps) <= 1e-12 * eps);
            prev_g = t.g_th;
        }
    }
    for (double eps : {1e-8, 1e-7, 1e-4})
        CHECK(solve_gain_threshold(4, eps).g_th > solve_gain_threshold(2, eps).g_th);
    CHECK_THROWS_AS(solve_gain_threshold(1, 1e-7), std::invalid_argument);
    CHECK_THROWS_AS(solve_gain_threshold(4, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_gain_threshold(4, 1.0), std::invalid_argument);
}

TEST_CASE("mean transmit power") {
    SystemConfig cfg;
    const double w = 7.42e6, gamma = 0.7663, alpha = 2.84e-13;
    const double base = cfg.noise_psd * w * gamma / alpha;
    CHECK(mean_tx_power(w, gamma, alpha, 16, 1e-7, cfg) == doctest::Approx(base / 15 * (1 - 1e-7)).epsilon(1e-14));
    CHECK(mean_tx_power(w, gamma, alpha, 16, 1e-300, cfg) == doctest::Approx(base / 15).epsilon(1e-15));
    CHECK(mean_tx_power(w, gamma, alpha, 3, 1e-7, cfg) == doctest::Approx(2 * mean_tx_power(w, gamma, alpha, 5, 1e-7, cfg)));
    CHECK_THROWS_AS(mean_tx_power(w, gamma, alpha, 1, 1e-7, cfg), std::invalid_argument);
}

TEST_CASE("truncated inversion integral reproduces the mean power formula") {
    SystemConfig cfg;
    const double w = 3e6, gamma = 1.05, alpha = 2.84e-13;
    const double c = cfg.noise_psd * w * gamma / alpha;
    for (int n : {2, 3, 4, 8, 16, 64}) {
        for (double eps : {1e-7, 1e-5, 1e-3}) {
            const double G = solve_gain_threshold(n, eps).g_th;
            const double p_th = c / G;
            auto tail = [&](double g) { return c / g * boost::math::gamma_p_derivative(static_cast<double>(n), g); };
            double upper = 0.0;
            if (n == 2) {
                // f_2(g)/g = e^-g, integrate in closed form.
                upper = c * std::exp(-G);
            } else {
                upper = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(tail, G, INFINITY, 15, 1e-15);
            }
            const double direct = p_th * boost::math::gamma_p(static_cast<double>(n), G) + upper;
            CHECK(direct == doctest::Approx(mean_tx_power(w, gamma, alpha, n, eps, cfg)).epsilon(1e-8));
        }
    }
}

TEST_CASE("B never exceeds F") {
    int points = 0;
    for (int n : {2, 4, 8, 16, 32})
        for (double gamma : {0.1, 1.0, 10.0, 100.0})
            for (double G : log_grid(1e-6, 10.0, 50)) {
                CHECK(drop_prob_B(G, gamma, n) <= drop_bound_F(G, n));
                ++points;
            }
    CHECK(points == 1000);
}
