#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"

#include "aoi/errors.hpp"
#include "aoi/quadrature.hpp"

using namespace aoi;

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
}

TEST_CASE("finite ranges") {
    CHECK(quad::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi).value ==
          doctest::Approx(2.0).epsilon(1e-13));
    CHECK(quad::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0).value ==
          doctest::Approx(2.0).epsilon(1e-10));
    // reversed limits flip the sign
    CHECK(quad::integrate([](double x) { return x * x; }, 1.0, 0.0).value == doctest::Approx(-1.0 / 3.0));
    CHECK(quad::integrate([](double) { return 1.0; }, 2.0, 2.0).value == 0.0);
}

TEST_CASE("infinite ranges against closed forms") {
    for (double k : {0.5, 1.0, 2.5, 7.0}) {
        CAPTURE(k);
        const double got =
            quad::integrate([k](double x) { return std::pow(x, k - 1.0) * std::exp(-x); }, 0.0, inf).value;
        CHECK(got == doctest::Approx(boost::math::tgamma(k)).epsilon(1e-10));
    }
    CHECK(quad::integrate([](double x) { return std::exp(-x * x); }, -inf, inf).value ==
          doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
    CHECK(quad::integrate([](double x) { return std::exp(x); }, -inf, 0.0).value ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(quad::integrate([](double x) { return 1.0 / (1.0 + x * x); }, 1.0, inf).value ==
          doctest::Approx(std::numbers::pi / 4.0).epsilon(1e-12));
}

TEST_CASE("split at kinks") {
    const std::vector<double> cuts = {1.0, 5.0, -3.0};
    auto f = [](double x) { return std::abs(x - 1.0); };
    const auto r = quad::integrate_pieces(f, 0.0, 3.0, cuts);
    CHECK(r.value == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("batch integrand") {
    quad::BatchIntegrand f = [](std::span<const double> x, std::span<double> y) {
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::exp(-0.5 * x[i] * x[i]);
    };
    CHECK(quad::integrate(f, -inf, inf).value == doctest::Approx(std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("failures are reported") {
    CHECK_THROWS_AS(quad::integrate([](double x) { return 1.0 / x; }, 0.0, 1.0), QuadratureError);
    CHECK_THROWS_AS(quad::integrate([](double) { return std::nan(""); }, 0.0, 1.0), QuadratureError);
    quad::Tolerance tight{.abs = 0.0, .rel = 1e-15, .max_intervals = 3};
    CHECK_THROWS_AS(quad::integrate([](double x) { return std::sin(50.0 * x); }, 0.0, 10.0, tight),
                    QuadratureError);
}
