#include <doctest.h>

#include <cmath>

#include "formality/metric.hpp"
#include "formality/multivector_io.hpp"
#include "support.hpp"

using namespace formality;
using testutil::Rng;

namespace {

RatMultivector mv(const std::string& text, int dim) { return parse_multivector(text, dim); }

Rational rat_pow(const Rational& base, int e) {
    Rational out(1);
    for (int i = 0; i < std::abs(e); ++i) out *= base;
    return e >= 0 ? out : Rational(1) / out;
}

GramMetric<Rational> diag_metric(std::vector<long> diag) {
    const int n = int(diag.size());
    RatMatrix g(n, n);
    for (int i = 0; i < n; ++i) g.at(i, i) = Rational(diag[i]);
    return GramMetric<Rational>(std::move(g));
}

double fnorm(const FloatMultivector& a) { return std::sqrt(euclidean_norm_sq(a)); }

}  // namespace

TEST_SUITE("gram metrics") {
    TEST_CASE("construction validates symmetry and positivity") {
        RatMatrix bad(2, 2);
        bad.at(0, 1) = Rational(1);
        CHECK_THROWS_AS(GramMetric<Rational>(bad), std::domain_error);  // not symmetric

        RatMatrix indef(2, 2);
        indef.at(0, 0) = Rational(1);
        indef.at(1, 1) = Rational(-1);
        CHECK_THROWS_AS(GramMetric<Rational>(indef), std::domain_error);

        RatMatrix hyper(2, 2);
        hyper.at(0, 1) = hyper.at(1, 0) = Rational(1);
        CHECK_THROWS_AS(GramMetric<Rational>(hyper), std::domain_error);

        Rng rng(1);
        CHECK_NOTHROW(testutil::rand_spd_metric(rng, 4));
    }

    TEST_CASE("metric inner: identity Gram reproduces the euclidean product") {
        Rng rng(31);
        const auto id = GramMetric<Rational>::identity(4);
        for (int trial = 0; trial < 200; ++trial) {
            const auto a = testutil::rand_multivector(rng, 4, 4);
            const auto b = testutil::rand_multivector(rng, 4, 4);
            CHECK(metric_inner(id, a, b) == euclidean_inner(a, b));
        }
    }

    TEST_CASE("metric inner on diagonal metrics") {
        const auto g = diag_metric({4, 1, 1, 1});
        CHECK(metric_inner(g, mv("e1", 4), mv("e1", 4)) == Rational(4));
        CHECK(metric_inner(g, mv("e12", 4), mv("e12", 4)) == Rational(4));
        CHECK(metric_inner(g, mv("e2", 4), mv("e2", 4)) == Rational(1));
    }

    TEST_CASE("metric inner of a blade is the Gram minor determinant") {
        Rng rng(37);
        for (int trial = 0; trial < 50; ++trial) {
            const auto g = testutil::rand_spd_metric(rng, 4);
            // <e12, e12>_g = det of the top-left 2x2 block
            const auto& G = g.gram();
            const Rational expect = G.at(0, 0) * G.at(1, 1) - G.at(0, 1) * G.at(1, 0);
            CHECK(metric_inner(g, mv("e12", 4), mv("e12", 4)) == expect);
        }
    }
}

TEST_SUITE("metric clifford product") {
    TEST_CASE("identity metric reproduces the euclidean product") {
        Rng rng(41);
        const auto id = GramMetric<Rational>::identity(4);
        for (int trial = 0; trial < 200; ++trial) {
            const auto a = testutil::rand_multivector(rng, 4, 4);
            const auto b = testutil::rand_multivector(rng, 4, 4);
            CHECK(clifford_metric(id, a, b) == clifford_euclidean(a, b));
        }
    }

    TEST_CASE("defining relation v . v = <v,v>_g") {
        Rng rng(43);
        for (int trial = 0; trial < 100; ++trial) {
            const int n = 2 + int(rng() % 4);
            const auto g = testutil::rand_spd_metric(rng, n);
            const auto v = testutil::rand_multivector(rng, n, 3, 1);
            CHECK(clifford_metric(g, v, v) ==
                  RatMultivector::scalar(n, metric_inner(g, v, v)));
        }
    }

    TEST_CASE("grade part k of a metric clifford product scales by rho^(k-l-m)") {
        Rng rng(47);
        for (int trial = 0; trial < 60; ++trial) {
            const int n = 2 + int(rng() % 4);
            const auto g = testutil::rand_spd_metric(rng, n);
            const Rational rho = testutil::rand_rational(rng, 1, 5, 3, true);
            const auto rescaled = conformal_rescale(g, rho);
            const int l = int(rng() % (n + 1));
            const int m = int(rng() % (n + 1));
            const auto a = testutil::rand_multivector(rng, n, 3, l);
            const auto b = testutil::rand_multivector(rng, n, 3, m);
            const auto base = clifford_metric(g, a, b);
            const auto scaled = clifford_metric(rescaled, a, b);
            for (int k = 0; k <= n; ++k)
                CHECK(grade_project(scaled, k) ==
                      rat_pow(rho, k - l - m) * grade_project(base, k));
        }
    }

    TEST_CASE("grade-(l+m) part equals the wedge, exactly") {
        Rng rng(53);
        for (int trial = 0; trial < 60; ++trial) {
            const int n = 2 + int(rng() % 4);
            const auto g = testutil::rand_spd_metric(rng, n);
            const int l = int(rng() % (n + 1));
            const int m = int(rng() % (n + 1));
            const auto a = testutil::rand_multivector(rng, n, 3, l);
            const auto b = testutil::rand_multivector(rng, n, 3, m);
            if (l + m <= n)
                CHECK(grade_project(clifford_metric(g, a, b), l + m) == wedge(a, b));
        }
    }
}

TEST_SUITE("metric hodge star") {
    TEST_CASE("identity metric matches the euclidean star") {
        const auto id = GramMetric<double>::identity(4);
        const auto starred = hodge_star_metric(id, to_float(mv("e12", 4)));
        CHECK(fnorm(starred - to_float(mv("e34", 4))) < 1e-12);
    }

    TEST_CASE("conformal scaling: star_{rho^2 g} = rho^(n-2k) star_g on grade k") {
        Rng rng(59);
        std::uniform_real_distribution<double> rho_dist(0.2, 5.0);
        for (int trial = 0; trial < 50; ++trial) {
            const int n = 2 + int(rng() % 4);
            const auto g = to_float(testutil::rand_spd_metric(rng, n));
            const double rho = rho_dist(rng);
            const auto rescaled = conformal_rescale(g, rho);
            const int k = int(rng() % (n + 1));
            const auto a = to_float(testutil::rand_multivector(rng, n, 3, k));
            const auto lhs = hodge_star_metric(rescaled, a);
            auto rhs = hodge_star_metric(g, a);
            rhs *= std::pow(rho, double(n - 2 * k));
            CHECK(fnorm(lhs - rhs) <= 1e-9 * (1.0 + fnorm(rhs)));
        }
    }

    TEST_CASE("defining relation a ^ star_g b = <a,b>_g vol_g") {
        Rng rng(61);
        for (int trial = 0; trial < 50; ++trial) {
            const int n = 2 + int(rng() % 4);
            const auto g = to_float(testutil::rand_spd_metric(rng, n));
            const int k = int(rng() % (n + 1));
            const auto a = to_float(testutil::rand_multivector(rng, n, 3, k));
            const auto b = to_float(testutil::rand_multivector(rng, n, 3, k));
            auto vol = FloatMultivector::blade(n, (blade_t(1) << n) - 1);
            vol *= 1.0 / std::sqrt(to_double(determinant(g.gram())));
            const auto residual =
                wedge(a, hodge_star_metric(g, b)) - metric_inner(g, a, b) * vol;
            CHECK(fnorm(residual) < 1e-10);
        }
    }
}

TEST_SUITE("scaled clifford product") {
    TEST_CASE("pinned cases") {
        const auto id = GramMetric<double>::identity(4);
        const auto e1 = to_float(mv("e1", 4));
        const auto e2 = to_float(mv("e2", 4));
        // grade-2 exponent vanishes, so no rescaling happens
        CHECK(fnorm(scaled_clifford(id, e1, e2) - to_float(mv("1 + e12", 4))) < 1e-12);
        // the grade-0 clifford part is discarded and replaced by the constant 1
        CHECK(fnorm(scaled_clifford(id, e1, e1) - to_float(mv("1", 4))) < 1e-12);
        // two scalars multiply as scalars
        const auto s2 = FloatMultivector::scalar(4, 2.0);
        const auto s3 = FloatMultivector::scalar(4, 3.0);
        CHECK(fnorm(scaled_clifford(id, s2, s3) - FloatMultivector::scalar(4, 6.0)) < 1e-12);
        CHECK_THROWS_AS(scaled_clifford(id, to_float(mv("1 + e1", 4)), e1),
                        std::invalid_argument);
    }

    TEST_CASE("conformal invariance of the scaled product") {
        Rng rng(67);
        std::uniform_real_distribution<double> rho_dist(0.1, 10.0);
        for (int trial = 0; trial < 60; ++trial) {
            const int n = 2 + int(rng() % 4);
            const auto g = to_float(testutil::rand_spd_metric(rng, n));
            const double rho = rho_dist(rng);
            const int l = int(rng() % n) + 1;
            const int m = int(rng() % n) + 1;
            const auto a = to_float(testutil::rand_multivector(rng, n, 3, l));
            const auto b = to_float(testutil::rand_multivector(rng, n, 3, m));
            const auto base = scaled_clifford(g, a, b);
            const auto invariant = scaled_clifford(conformal_rescale(g, rho), a, b);
            CHECK(fnorm(base - invariant) <= 1e-9 * (1.0 + fnorm(base)));
        }
    }

    TEST_CASE("grade-(l+m) part of the scaled product is the wedge") {
        Rng rng(71);
        for (int trial = 0; trial < 50; ++trial) {
            const int n = 2 + int(rng() % 4);
            const auto g = to_float(testutil::rand_spd_metric(rng, n));
            const int l = int(rng() % n) + 1;
            const int m = int(rng() % n) + 1;
            if (l + m > n) continue;
            const auto a = to_float(testutil::rand_multivector(rng, n, 3, l));
            const auto b = to_float(testutil::rand_multivector(rng, n, 3, m));
            const auto part = grade_project(scaled_clifford(g, a, b), l + m);
            const auto expect = wedge(a, b);
            CHECK(fnorm(part - expect) <= 1e-9 * (1.0 + fnorm(expect)));
        }
    }

    TEST_CASE("mixed-grade wrapper sums over homogeneous pairs") {
        const auto id = GramMetric<double>::identity(4);
        const auto a = to_float(mv("e1 + e12", 4));
        const auto b = to_float(mv("e2", 4));
        const auto direct = scaled_clifford_sum(id, a, b);
        const auto split = scaled_clifford(id, to_float(mv("e1", 4)), b) +
                           scaled_clifford(id, to_float(mv("e12", 4)), b);
        CHECK(fnorm(direct - split) < 1e-12);
    }
}

TEST_SUITE("pullbacks") {
    TEST_CASE("basic pullback actions") {
        const auto a = mv("3 + e1 + e12 + e1234", 4);
        CHECK(pullback_form(LinearMap<Rational>::identity(4), a) == a);

        RatMatrix two = RatMatrix::identity(4);
        for (int i = 0; i < 4; ++i) two.at(i, i) = Rational(2);
        const LinearMap<Rational> scale(two);
        CHECK(pullback_form(scale, mv("e12", 4)) == mv("4*e12", 4));
        CHECK(pullback_form(scale, mv("e1234", 4)) == mv("16*e1234", 4));

        Rng rng(73);
        const auto t = testutil::rand_invertible_map(rng, 4);
        CHECK(pullback_form(t, mv("e1234", 4)) ==
              determinant(t.matrix) * mv("e1234", 4));
    }

    TEST_CASE("composition order: pullback(T2) after pullback(T1) is pullback(T1*T2)") {
        Rng rng(79);
        for (int trial = 0; trial < 40; ++trial) {
            const int n = 2 + int(rng() % 3);
            const auto t1 = testutil::rand_invertible_map(rng, n);
            const auto t2 = testutil::rand_invertible_map(rng, n);
            const auto a = testutil::rand_multivector(rng, n, 4);
            const auto composed = pullback_form(t2, pullback_form(t1, a));
            const auto direct = pullback_form(LinearMap<Rational>(t1.matrix * t2.matrix), a);
            CHECK(composed == direct);
        }
    }

    TEST_CASE("wedge naturality under pullback") {
        Rng rng(83);
        for (int trial = 0; trial < 60; ++trial) {
            const int n = 2 + int(rng() % 4);
            const auto t = testutil::rand_invertible_map(rng, n);
            const auto a = testutil::rand_multivector(rng, n, 3);
            const auto b = testutil::rand_multivector(rng, n, 3);
            CHECK(pullback_form(t, wedge(a, b)) ==
                  wedge(pullback_form(t, a), pullback_form(t, b)));
        }
    }

    TEST_CASE("pullback metric satisfies its defining identity") {
        Rng rng(89);
        const auto id4 = GramMetric<Rational>::identity(4);
        CHECK(pullback_metric(LinearMap<Rational>::identity(4), id4).gram() == id4.gram());
        for (int trial = 0; trial < 100; ++trial) {
            const int n = 2 + int(rng() % 4);
            const auto t = testutil::rand_invertible_map(rng, n);
            const auto g = testutil::rand_spd_metric(rng, n);
            const auto gp = pullback_metric(t, g);
            const int k = int(rng() % (n + 1));
            const auto a = testutil::rand_multivector(rng, n, 3, k);
            const auto b = testutil::rand_multivector(rng, n, 3, k);
            CHECK(metric_inner(gp, pullback_form(t, a), pullback_form(t, b)) ==
                  metric_inner(g, a, b));
        }
        RatMatrix singular(3, 3);
        CHECK_THROWS_AS(
            pullback_metric(LinearMap<Rational>(singular), GramMetric<Rational>::identity(3)),
            std::domain_error);
    }

    TEST_CASE("clifford and scaled-product naturality") {
        const auto id4 = GramMetric<Rational>::identity(4);
        CHECK(check_pullback_naturality(LinearMap<Rational>::identity(4), id4,
                                        mv("e1 + e2", 4), mv("e12", 4)));
        Rng rng(97);
        // signed permutations: exactly orthogonal, checked exactly
        for (int trial = 0; trial < 30; ++trial) {
            const int n = 2 + int(rng() % 4);
            const auto t = testutil::rand_signed_permutation(rng, n);
            const auto a = testutil::rand_multivector(rng, n, 3, int(rng() % (n + 1)));
            const auto b = testutil::rand_multivector(rng, n, 3, int(rng() % (n + 1)));
            CHECK(check_pullback_naturality(t, GramMetric<Rational>::identity(n), a, b));
        }
        for (int trial = 0; trial < 100; ++trial) {
            const int n = 2 + int(rng() % 4);  // up to 5
            const auto t = testutil::rand_invertible_map(rng, n);
            const auto g = testutil::rand_spd_metric(rng, n);
            const auto a = testutil::rand_multivector(rng, n, 3, int(rng() % (n + 1)));
            const auto b = testutil::rand_multivector(rng, n, 3, int(rng() % (n + 1)));
            CHECK(check_pullback_naturality(t, g, a, b));
        }
    }

    TEST_CASE("pullback preserves metric norms") {
        Rng rng(101);
        for (int trial = 0; trial < 60; ++trial) {
            const int n = 2 + int(rng() % 4);
            const auto t = testutil::rand_invertible_map(rng, n);
            const auto g = testutil::rand_spd_metric(rng, n);
            const auto gp = pullback_metric(t, g);
            const auto a = testutil::rand_multivector(rng, n, 4, int(rng() % (n + 1)));
            CHECK(metric_inner(gp, pullback_form(t, a), pullback_form(t, a)) ==
                  metric_inner(g, a, a));
        }
    }
}
