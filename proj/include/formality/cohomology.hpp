#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "formality/matrix.hpp"
#include "formality/rational.hpp"

namespace formality {

// Coefficients of x_i^{(k)} cup x_j^{(l)} over the fixed basis of H^{k+l}.
using CupTable = std::map<std::pair<int, int>, std::vector<std::vector<std::vector<Rational>>>>;

// Finite presentation of the real cohomology ring of a closed, connected,
// oriented n-manifold: Betti numbers, one fixed basis per degree, and cup
// structure constants for k, l >= 1 with k + l <= n. Degree-0 products are
// the unit law and are not stored; products above degree n are zero.
//
// Validated on construction: b_0 = b_n = 1, Poincare duality b_k = b_{n-k},
// graded commutativity of the stored constants. Validation does not demand a
// non-degenerate duality pairing, so hand-written rings can present
// degenerate intersection forms; the checks that need non-degeneracy reject
// those inputs themselves.
class GradedRing {
  public:
    GradedRing(std::string name, int n, std::vector<int> betti, CupTable cup);

    const std::string& name() const { return name_; }
    int dimension() const { return n_; }
    const std::vector<int>& betti() const { return betti_; }
    int betti_at(int k) const { return (k < 0 || k > n_) ? 0 : betti_[k]; }

    // x_i^{(k)} cup x_j^{(l)} over the H^{k+l} basis; empty when k+l > n.
    // Handles the k = 0 / l = 0 unit cases.
    std::vector<Rational> cup(int k, int i, int l, int j) const;

    const CupTable& cup_table() const { return cup_; }

    // Structural equality: same dimension, betti vector and cup constants
    // (name ignored).
    bool same_presentation(const GradedRing& other) const;

    GradedRing renamed(std::string name) const { return GradedRing(std::move(name), n_, betti_, cup_); }

  private:
    std::string name_;
    int n_;
    std::vector<int> betti_;
    CupTable cup_;  // normalized: every (k,l), k,l>=1, k+l<=n, both orders
};

// Signature triple of a symmetric bilinear form, in the order
// (positive, negative, zero).
struct Signature {
    int positive = 0;
    int negative = 0;
    int zero = 0;
    bool operator==(const Signature&) const = default;
};

// Exact Sylvester signature: symmetric congruence diagonalization over the
// rationals, zero pivots repaired by the add-row/column trick, then count
// diagonal signs. Independent of the elimination path by Sylvester's law.
Signature signature(RatMatrix q);

// Middle-degree cup pairing of a 4m-manifold against the orientation class.
struct IntersectionForm {
    int m = 0;  // n = 4m
    RatMatrix q;
    Signature sig;
};

GradedRing make_sphere(int n);   // n >= 2
GradedRing make_circle();        // the one closed 1-manifold; torus factor
GradedRing make_torus(int n);    // n-fold product of circles
GradedRing make_cp2();           // b = (1,0,1,0,1), Q = [1]
GradedRing make_product(const GradedRing& a, const GradedRing& b);
GradedRing make_connected_sum(const GradedRing& a, const GradedRing& b);

IntersectionForm intersection_form(const GradedRing& r);

}  // namespace formality
