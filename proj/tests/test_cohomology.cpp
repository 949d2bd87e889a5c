#include <doctest.h>

#include <Eigen/Dense>

#include "formality/cohomology.hpp"
#include "support.hpp"

using namespace formality;
using testutil::Rng;

namespace {

// Independent oracle: count eigenvalue signs of the float image of Q.
Signature eigen_sign_oracle(const RatMatrix& q) {
    const int n = q.rows();
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = to_double(q.at(i, j));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    Signature sig;
    for (int i = 0; i < n; ++i) {
        const double ev = es.eigenvalues()(i);
        if (ev > 1e-9)
            ++sig.positive;
        else if (ev < -1e-9)
            ++sig.negative;
        else
            ++sig.zero;
    }
    return sig;
}

RatMatrix from_rows(const std::vector<std::vector<long>>& rows) {
    RatMatrix m(int(rows.size()), int(rows[0].size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j) m.at(int(i), int(j)) = Rational(rows[i][j]);
    return m;
}

}  // namespace

TEST_SUITE("ring constructors") {
    TEST_CASE("spheres") {
        CHECK(make_sphere(4).betti() == std::vector<int>{1, 0, 0, 0, 1});
        CHECK(make_sphere(2).betti() == std::vector<int>{1, 0, 1});
        CHECK_THROWS_AS(make_sphere(1), std::invalid_argument);
        // generator squared lands above the top degree
        CHECK(make_sphere(4).cup(4, 0, 4, 0).empty());
    }

    TEST_CASE("products") {
        const auto s2s2 = make_product(make_sphere(2), make_sphere(2));
        CHECK(s2s2.betti() == std::vector<int>{1, 0, 2, 0, 1});
        CHECK(make_torus(4).betti() == std::vector<int>{1, 4, 6, 4, 1});
        const auto s2s4 = make_product(make_sphere(2), make_sphere(4));
        CHECK(s2s4.betti_at(2) == 1);
        CHECK(s2s4.dimension() == 6);
    }

    TEST_CASE("torus rings are full exterior algebras on the betti level") {
        for (int n = 1; n <= 6; ++n) {
            const auto t = make_torus(n);
            for (int k = 0; k <= n; ++k) {
                long binom = 1;
                for (int i = 1; i <= k; ++i) binom = binom * (n - k + i) / i;
                CHECK(t.betti_at(k) == binom);
            }
        }
    }

    TEST_CASE("connected sums") {
        const auto s2s2 = make_product(make_sphere(2), make_sphere(2));
        const auto twice = make_connected_sum(s2s2, s2s2);
        CHECK(twice.betti() == std::vector<int>{1, 0, 4, 0, 1});

        // Q = H (+) H: two hyperbolic blocks, cross products vanish
        const auto form = intersection_form(twice);
        CHECK(form.q.at(0, 1) == Rational(1));
        CHECK(form.q.at(1, 0) == Rational(1));
        CHECK(form.q.at(0, 0) == Rational(0));
        CHECK(form.q.at(2, 3) == Rational(1));
        CHECK(form.q.at(0, 2) == Rational(0));
        CHECK(form.q.at(1, 3) == Rational(0));
        CHECK(form.sig == Signature{2, 2, 0});

        CHECK_THROWS_AS(make_connected_sum(make_sphere(4), make_sphere(6)),
                        std::invalid_argument);
    }

    TEST_CASE("fifteen-fold connected sum of S2 x S4") {
        auto ring = make_product(make_sphere(2), make_sphere(4));
        const auto base = ring;
        for (int i = 1; i < 15; ++i) ring = make_connected_sum(ring, base);
        CHECK(ring.betti_at(2) == 15);
        CHECK(ring.betti_at(4) == 15);
        // every cup product of H^2 classes is zero
        for (int i = 0; i < 15; ++i)
            for (int j = 0; j < 15; ++j)
                for (const auto& c : ring.cup(2, i, 2, j)) CHECK(is_zero(c));
    }

    TEST_CASE("sphere is the identity of the connected sum") {
        const auto s2s2 = make_product(make_sphere(2), make_sphere(2));
        CHECK(make_connected_sum(s2s2, make_sphere(4)).same_presentation(s2s2));
        const auto t4 = make_torus(4);
        CHECK(make_connected_sum(make_sphere(4), t4).same_presentation(t4));
    }

    TEST_CASE("connected sum is commutative and associative on signatures") {
        const auto cp2 = make_cp2();
        const auto s2s2 = make_product(make_sphere(2), make_sphere(2));
        const auto ab = make_connected_sum(cp2, s2s2);
        const auto ba = make_connected_sum(s2s2, cp2);
        CHECK(ab.betti() == ba.betti());
        CHECK(intersection_form(ab).sig == intersection_form(ba).sig);
        CHECK(intersection_form(ab).sig ==
              Signature{intersection_form(cp2).sig.positive + 1,
                        intersection_form(cp2).sig.negative + 1, 0});

        const auto abc1 = make_connected_sum(make_connected_sum(cp2, s2s2), cp2);
        const auto abc2 = make_connected_sum(cp2, make_connected_sum(s2s2, cp2));
        CHECK(abc1.betti() == abc2.betti());
        CHECK(intersection_form(abc1).sig == intersection_form(abc2).sig);
    }

    TEST_CASE("validation rejects broken rings") {
        // Poincare duality violation: b_1 != b_3
        CHECK_THROWS_WITH_AS(GradedRing("bad", 4, {1, 2, 0, 3, 1}, {}),
                             doctest::Contains("Poincare duality"), std::invalid_argument);
        CHECK_THROWS_AS(GradedRing("bad", 4, {1, 0, 1, 0, 2}, {}), std::invalid_argument);
        CHECK_THROWS_AS(GradedRing("bad", 4, {1, 0, 1, 0}, {}), std::invalid_argument);

        // graded commutativity violation in odd degree: x u y = -(y u x)
        CupTable cup;
        cup[{1, 1}] = {{{Rational(0)}, {Rational(1)}}, {{Rational(1)}, {Rational(0)}}};
        // both orders stored identically, but degree (1,1) needs a sign flip
        CHECK_THROWS_WITH_AS(GradedRing("bad", 2, {1, 2, 1}, std::move(cup)),
                             doctest::Contains("graded commutativity"), std::invalid_argument);
    }
}

TEST_SUITE("intersection forms and signatures") {
    TEST_CASE("pinned examples") {
        const auto s2s2 = make_product(make_sphere(2), make_sphere(2));
        const auto form = intersection_form(s2s2);
        CHECK(form.q.rows() == 2);
        CHECK(form.q.at(0, 0) == Rational(0));
        CHECK(form.q.at(0, 1) == Rational(1));
        CHECK(form.sig == Signature{1, 1, 0});

        CHECK(intersection_form(make_sphere(4)).q.rows() == 0);
        CHECK(intersection_form(make_sphere(4)).sig == Signature{0, 0, 0});

        const auto t4 = intersection_form(make_torus(4));
        CHECK(t4.q.rows() == 6);
        CHECK(t4.sig == Signature{3, 3, 0});

        CHECK(intersection_form(make_cp2()).sig == Signature{1, 0, 0});
        CHECK_THROWS_AS(intersection_form(make_sphere(6)), std::invalid_argument);
    }

    TEST_CASE("signature of small pinned matrices") {
        RatMatrix d(3, 3);
        d.at(0, 0) = Rational(1);
        d.at(1, 1) = Rational(1);
        d.at(2, 2) = Rational(-1);
        CHECK(signature(d) == Signature{2, 1, 0});

        CHECK(signature(from_rows({{0, 1}, {1, 0}})) == Signature{1, 1, 0});
        CHECK(signature(RatMatrix(0, 0)) == Signature{0, 0, 0});
        CHECK(signature(from_rows({{0, 0}, {0, 0}})) == Signature{0, 0, 2});

        RatMatrix asym(2, 2);
        asym.at(0, 1) = Rational(1);
        CHECK_THROWS_AS(signature(asym), std::invalid_argument);
    }

    TEST_CASE("sylvester signature matches the float eigenvalue-sign oracle") {
        Rng rng(107);
        for (int trial = 0; trial < 50; ++trial) {
            RatMatrix q(6, 6);
            for (int i = 0; i < 6; ++i)
                for (int j = i; j < 6; ++j) {
                    q.at(i, j) = testutil::rand_rational(rng, -4, 4, 3);
                    q.at(j, i) = q.at(i, j);
                }
            CHECK(signature(q) == eigen_sign_oracle(q));
        }
    }

    TEST_CASE("signature is a congruence invariant") {
        Rng rng(109);
        for (int trial = 0; trial < 40; ++trial) {
            const int n = 2 + int(rng() % 4);
            RatMatrix q(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    q.at(i, j) = testutil::rand_rational(rng, -4, 4, 3);
                    q.at(j, i) = q.at(i, j);
                }
            const auto p = testutil::rand_invertible_map(rng, n).matrix;
            CHECK(signature(p.transpose() * q * p) == signature(q));
        }
    }

    TEST_CASE("signatures add under connected sum") {
        Rng rng(113);
        const std::vector<GradedRing> pool = {
            make_product(make_sphere(2), make_sphere(2)), make_cp2(), make_torus(4)};
        for (const auto& a : pool)
            for (const auto& b : pool) {
                const auto sum = make_connected_sum(a, b);
                const auto sa = intersection_form(a).sig;
                const auto sb = intersection_form(b).sig;
                const auto ss = intersection_form(sum).sig;
                CHECK(ss.positive == sa.positive + sb.positive);
                CHECK(ss.negative == sa.negative + sb.negative);
                CHECK(ss.zero == 0);
            }
    }
}
