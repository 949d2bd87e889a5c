#include "formality/cohomology.hpp"

#include <algorithm>
#include <stdexcept>

namespace formality {

namespace {

std::vector<Rational> zero_vec(int len) { return std::vector<Rational>(len, Rational(0)); }

bool all_zero(const std::vector<Rational>& v) {
    return std::all_of(v.begin(), v.end(), [](const Rational& c) { return is_zero(c); });
}

}  // namespace

GradedRing::GradedRing(std::string name, int n, std::vector<int> betti, CupTable cup)
    : name_(std::move(name)), n_(n), betti_(std::move(betti)), cup_(std::move(cup)) {
    if (n_ < 1) throw std::invalid_argument("ring validation: manifold dimension must be >= 1");
    if (static_cast<int>(betti_.size()) != n_ + 1)
        throw std::invalid_argument("ring validation: betti vector must have n+1 entries");
    for (int b : betti_)
        if (b < 0) throw std::invalid_argument("ring validation: negative Betti number");
    if (betti_[0] != 1 || betti_[n_] != 1)
        throw std::invalid_argument(
            "ring validation: b_0 = b_n = 1 is required (closed connected oriented)");
    for (int k = 0; k <= n_; ++k)
        if (betti_[k] != betti_[n_ - k])
            throw std::invalid_argument("ring validation: Poincare duality fails, b_" +
                                        std::to_string(k) + " != b_" + std::to_string(n_ - k));

    // Normalize the cup table: fill in missing graded-commutative mirrors,
    // check the ones given, and verify shapes.
    for (auto& [deg, block] : cup_) {
        const auto [k, l] = deg;
        if (k < 1 || l < 1 || k + l > n_)
            throw std::invalid_argument("ring validation: cup block (" + std::to_string(k) + "," +
                                        std::to_string(l) + ") out of range");
        if (static_cast<int>(block.size()) != betti_[k])
            throw std::invalid_argument("ring validation: cup block row count mismatch");
        for (const auto& row : block) {
            if (static_cast<int>(row.size()) != betti_[l])
                throw std::invalid_argument("ring validation: cup block column count mismatch");
            for (const auto& coeffs : row)
                if (static_cast<int>(coeffs.size()) != betti_[k + l])
                    throw std::invalid_argument("ring validation: cup coefficient length mismatch");
        }
    }
    for (int k = 1; k < n_; ++k)
        for (int l = k; k + l <= n_; ++l) {
            auto it_kl = cup_.find({k, l});
            auto it_lk = cup_.find({l, k});
            if (it_kl == cup_.end() && it_lk == cup_.end()) {
                if (betti_[k] > 0 && betti_[l] > 0)
                    throw std::invalid_argument("ring validation: missing cup block (" +
                                                std::to_string(k) + "," + std::to_string(l) + ")");
                continue;
            }
            const int sign_flip = (k * l) % 2;  // x u y = (-1)^{kl} y u x
            auto mirror = [&](const auto& src) {
                std::vector<std::vector<std::vector<Rational>>> dst(
                    betti_[l], std::vector<std::vector<Rational>>(betti_[k]));
                for (int i = 0; i < betti_[k]; ++i)
                    for (int j = 0; j < betti_[l]; ++j) {
                        auto v = src[i][j];
                        if (sign_flip)
                            for (auto& c : v) c = -c;
                        dst[j][i] = std::move(v);
                    }
                return dst;
            };
            if (it_kl != cup_.end() && it_lk == cup_.end()) {
                if (k != l) cup_[{l, k}] = mirror(it_kl->second);
            } else if (it_lk != cup_.end() && it_kl == cup_.end()) {
                cup_[{k, l}] = mirror(it_lk->second);
            }
            // Both present (or k == l): verify graded commutativity.
            const auto& fwd = cup_.at({k, l});
            const auto& bwd = cup_.at({l, k});
            for (int i = 0; i < betti_[k]; ++i)
                for (int j = 0; j < betti_[l]; ++j)
                    for (int t = 0; t < betti_[k + l]; ++t) {
                        Rational expect = bwd[j][i][t];
                        if (sign_flip) expect = -expect;
                        if (fwd[i][j][t] != expect)
                            throw std::invalid_argument(
                                "ring validation: graded commutativity fails on cup block (" +
                                std::to_string(k) + "," + std::to_string(l) + ")");
                    }
        }
}

std::vector<Rational> GradedRing::cup(int k, int i, int l, int j) const {
    if (k < 0 || l < 0 || k > n_ || l > n_ || i < 0 || i >= betti_[k] || j < 0 || j >= betti_[l])
        throw std::out_of_range("cup product index out of range");
    if (k + l > n_) return {};
    std::vector<Rational> out = zero_vec(betti_[k + l]);
    if (k == 0) {
        out[j] = Rational(1);  // 1 cup y = y
        return out;
    }
    if (l == 0) {
        out[i] = Rational(1);
        return out;
    }
    auto it = cup_.find({k, l});
    if (it == cup_.end()) return out;
    return it->second[i][j];
}

bool GradedRing::same_presentation(const GradedRing& other) const {
    if (n_ != other.n_ || betti_ != other.betti_) return false;
    for (int k = 1; k < n_; ++k)
        for (int l = 1; k + l <= n_; ++l)
            for (int i = 0; i < betti_[k]; ++i)
                for (int j = 0; j < betti_[l]; ++j)
                    if (cup(k, i, l, j) != other.cup(k, i, l, j)) return false;
    return true;
}

Signature signature(RatMatrix q) {
    if (!q.is_symmetric()) throw std::invalid_argument("signature of non-symmetric matrix");
    const int n = q.rows();
    for (int p = 0; p < n; ++p) {
        if (is_zero(q.at(p, p))) {
            int j = -1;
            for (int c = p + 1; c < n; ++c)
                if (!is_zero(q.at(p, c))) {
                    j = c;
                    break;
                }
            if (j < 0) continue;  // zero row in the trailing block
            // Congruence by (row p += s*row j, col p += s*col j). The new
            // diagonal entry is 2s*q_pj + q_jj; s = +1 and s = -1 cannot
            // both make it vanish, so try the other sign if needed.
            for (int s : {1, -1}) {
                if (!is_zero(Rational(2 * s) * q.at(p, j) + q.at(j, j))) {
                    for (int c = 0; c < n; ++c) q.at(p, c) += Rational(s) * q.at(j, c);
                    for (int r = 0; r < n; ++r) q.at(r, p) += Rational(s) * q.at(r, j);
                    break;
                }
            }
        }
        if (is_zero(q.at(p, p))) continue;
        for (int i = p + 1; i < n; ++i) {
            if (is_zero(q.at(i, p))) continue;
            Rational f = q.at(i, p) / q.at(p, p);
            for (int c = 0; c < n; ++c) q.at(i, c) -= f * q.at(p, c);
            for (int r = 0; r < n; ++r) q.at(r, i) -= f * q.at(r, p);
        }
    }
    Signature sig;
    for (int p = 0; p < n; ++p) {
        const int s = sign(q.at(p, p));
        if (s > 0)
            ++sig.positive;
        else if (s < 0)
            ++sig.negative;
        else
            ++sig.zero;
    }
    return sig;
}

GradedRing make_sphere(int n) {
    if (n < 2) throw std::invalid_argument("make_sphere requires n >= 2");
    std::vector<int> betti(n + 1, 0);
    betti[0] = betti[n] = 1;
    return GradedRing("S" + std::to_string(n), n, std::move(betti), {});
}

GradedRing make_circle() { return GradedRing("S1", 1, {1, 1}, {}); }

GradedRing make_torus(int n) {
    if (n < 1) throw std::invalid_argument("make_torus requires n >= 1");
    GradedRing t = make_circle();
    for (int i = 1; i < n; ++i) t = make_product(t, make_circle());
    return GradedRing("T" + std::to_string(n), t.dimension(), t.betti(), t.cup_table());
}

GradedRing make_cp2() {
    CupTable cup;
    cup[{2, 2}] = {{{Rational(1)}}};
    return GradedRing("CP2", 4, {1, 0, 1, 0, 1}, std::move(cup));
}

GradedRing make_product(const GradedRing& a, const GradedRing& b) {
    const int n = a.dimension() + b.dimension();

    // Basis of H^K(AxB): tensor pairs (p,i)(x)(q,j) with p+q = K, ordered by
    // p, then i, then j. offsets[K] maps p to the block start.
    std::vector<int> betti(n + 1, 0);
    std::vector<std::map<int, int>> offsets(n + 1);
    for (int deg = 0; deg <= n; ++deg) {
        int total = 0;
        for (int p = std::max(0, deg - b.dimension()); p <= std::min(deg, a.dimension()); ++p) {
            const int count = a.betti_at(p) * b.betti_at(deg - p);
            if (count == 0) continue;
            offsets[deg][p] = total;
            total += count;
        }
        betti[deg] = total;
    }

    auto index_of = [&](int deg, int p, int i, int j) {
        return offsets[deg].at(p) + i * b.betti_at(deg - p) + j;
    };

    CupTable cup;
    for (int dk = 1; dk < n; ++dk)
        for (int dl = 1; dk + dl <= n; ++dl) {
            if (betti[dk] == 0 || betti[dl] == 0) continue;
            auto block = std::vector<std::vector<std::vector<Rational>>>(
                betti[dk], std::vector<std::vector<Rational>>(betti[dl], zero_vec(betti[dk + dl])));
            for (const auto& [p, off_x] : offsets[dk]) {
                const int q = dk - p;
                for (int i = 0; i < a.betti_at(p); ++i)
                    for (int j = 0; j < b.betti_at(q); ++j) {
                        const int x = index_of(dk, p, i, j);
                        for (const auto& [pp, off_y] : offsets[dl]) {
                            const int qq = dl - pp;
                            if (p + pp > a.dimension() || q + qq > b.dimension()) continue;
                            for (int ii = 0; ii < a.betti_at(pp); ++ii) {
                                const auto ca = a.cup(p, i, pp, ii);
                                if (ca.empty() || all_zero(ca)) continue;
                                for (int jj = 0; jj < b.betti_at(qq); ++jj) {
                                    const int y = index_of(dl, pp, ii, jj);
                                    const auto cb = b.cup(q, j, qq, jj);
                                    if (cb.empty()) continue;
                                    // Koszul: y-part of x moves past x'-part of y
                                    const bool neg = (q * pp) % 2 != 0;
                                    for (size_t r = 0; r < ca.size(); ++r) {
                                        if (is_zero(ca[r])) continue;
                                        for (size_t s = 0; s < cb.size(); ++s) {
                                            if (is_zero(cb[s])) continue;
                                            Rational v = ca[r] * cb[s];
                                            if (neg) v = -v;
                                            block[x][y][index_of(dk + dl, p + pp, int(r), int(s))] +=
                                                v;
                                        }
                                    }
                                }
                            }
                        }
                    }
            }
            cup[{dk, dl}] = std::move(block);
        }

    return GradedRing("prod(" + a.name() + "," + b.name() + ")", n, std::move(betti),
                      std::move(cup));
}

// Standard connected-sum ring: middle-degree classes of the two summands
// coexist without interaction, top classes are identified, and each
// summand's pairing into its own top class lands on the shared orientation
// class. Products of positive-degree classes from different summands vanish;
// this is the usual topological convention, taken here as an axiom of the
// constructor and cross-checked by the Poincare-duality validation.
GradedRing make_connected_sum(const GradedRing& a, const GradedRing& b) {
    if (a.dimension() != b.dimension())
        throw std::invalid_argument("connected sum requires equal dimensions");
    const int n = a.dimension();
    if (n < 2) throw std::invalid_argument("connected sum requires dimension >= 2");

    std::vector<int> betti(n + 1, 0);
    betti[0] = betti[n] = 1;
    for (int k = 1; k < n; ++k) betti[k] = a.betti_at(k) + b.betti_at(k);

    // H^k basis for 0 < k < n: A-classes first, then B-classes.
    CupTable cup;
    for (int k = 1; k < n; ++k)
        for (int l = 1; k + l <= n; ++l) {
            if (betti[k] == 0 || betti[l] == 0) continue;
            const int out_len = betti[k + l];
            auto block = std::vector<std::vector<std::vector<Rational>>>(
                betti[k], std::vector<std::vector<Rational>>(betti[l], zero_vec(out_len)));
            auto fill = [&](const GradedRing& src, int row_off, int col_off, int out_off) {
                for (int i = 0; i < src.betti_at(k); ++i)
                    for (int j = 0; j < src.betti_at(l); ++j) {
                        const auto c = src.cup(k, i, l, j);
                        for (size_t r = 0; r < c.size(); ++r)
                            block[row_off + i][col_off + j][out_off + int(r)] = c[r];
                    }
            };
            // k + l = n results land on the shared top class at index 0;
            // otherwise each summand writes into its own sub-block.
            const int b_out_off = (k + l == n) ? 0 : a.betti_at(k + l);
            fill(a, 0, 0, 0);
            fill(b, a.betti_at(k), a.betti_at(l), b_out_off);
            cup[{k, l}] = std::move(block);
        }

    return GradedRing("connsum(" + a.name() + "," + b.name() + ")", n, std::move(betti),
                      std::move(cup));
}

IntersectionForm intersection_form(const GradedRing& r) {
    if (r.dimension() % 4 != 0)
        throw std::invalid_argument("intersection form requires dimension divisible by 4");
    const int m = r.dimension() / 4;
    const int b = r.betti_at(2 * m);
    RatMatrix q(b, b);
    for (int i = 0; i < b; ++i)
        for (int j = 0; j < b; ++j) {
            const auto c = r.cup(2 * m, i, 2 * m, j);
            q.at(i, j) = c.empty() ? Rational(0) : c[0];
        }
    return IntersectionForm{m, q, signature(q)};
}

}  // namespace formality
