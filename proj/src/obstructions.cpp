#include "formality/obstructions.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>

#include "formality/multivector_io.hpp"

namespace formality {

namespace {

std::int64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::int64_t out = 1;
    for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
    return out;
}

// Incremental exact rank tracker over the rationals.
class RankTracker {
  public:
    explicit RankTracker(int len) : len_(len) {}

    // Reduces v against the current echelon rows; keeps it if independent.
    bool insert(std::vector<Rational> v) {
        for (const auto& [pivot, row] : rows_) {
            if (is_zero(v[pivot])) continue;
            const Rational f = v[pivot] / row[pivot];
            for (int j = 0; j < len_; ++j) v[j] -= f * row[j];
        }
        for (int j = 0; j < len_; ++j)
            if (!is_zero(v[j])) {
                rows_.emplace_back(j, std::move(v));
                return true;
            }
        return false;
    }

    int rank() const { return static_cast<int>(rows_.size()); }

  private:
    int len_;
    std::vector<std::pair<int, std::vector<Rational>>> rows_;
};

bool same_eigenvector(const RatMultivector& v, int sign) {
    const auto star = hodge_star(v);
    return sign > 0 ? star == v : star == -v;
}

Json multivector_json(const RatMultivector& v) { return Json(to_text(v)); }

}  // namespace

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::obstruction: return "obstruction";
        case Verdict::inapplicable: return "inapplicable";
    }
    return "?";
}

CheckResult check_betti_bound(const GradedRing& r) {
    CheckResult out{"betti_bound", Verdict::pass, Json::object()};
    Json offending = Json::array();
    for (int k = 0; k <= r.dimension(); ++k) {
        const auto bound = binomial(r.dimension(), k);
        if (r.betti_at(k) > bound)
            offending.push_back(Json{{"k", k}, {"b_k", r.betti_at(k)}, {"bound", bound}});
    }
    if (!offending.empty()) {
        out.verdict = Verdict::obstruction;
        out.witness["offending_degrees"] = offending;
    } else {
        out.witness["note"] = "all Betti numbers within binomial bounds";
    }
    return out;
}

CheckResult check_b1(const GradedRing& r) {
    CheckResult out{"b1_rule", Verdict::pass, Json::object()};
    out.witness["b1"] = r.betti_at(1);
    out.witness["n"] = r.dimension();
    if (r.betti_at(1) == r.dimension() - 1) out.verdict = Verdict::obstruction;
    return out;
}

CheckResult check_middle_split(const GradedRing& r) {
    CheckResult out{"middle_split", Verdict::pass, Json::object()};
    if (r.dimension() % 4 != 0) {
        out.verdict = Verdict::inapplicable;
        out.witness["note"] = "dimension not divisible by 4";
        return out;
    }
    const auto form = intersection_form(r);
    if (form.sig.zero > 0)
        throw std::domain_error(
            "degenerate intersection form: not the ring of a closed oriented manifold");
    const auto bound = binomial(4 * form.m, 2 * form.m) / 2;
    out.witness["b_plus"] = form.sig.positive;
    out.witness["b_minus"] = form.sig.negative;
    out.witness["bound"] = bound;
    if (form.sig.positive > bound || form.sig.negative > bound)
        out.verdict = Verdict::obstruction;
    return out;
}

CheckResult check_wedge_surjectivity(const GradedRing& r) {
    CheckResult out{"wedge_surjectivity", Verdict::pass, Json::object()};
    const int n = r.dimension();
    Json details = Json::array();
    for (int k = 1; k <= n; ++k) {
        if (std::int64_t(r.betti_at(k)) != binomial(n, k)) continue;
        if (2 * k > n) continue;  // both products vanish above the top degree

        // Rank of the wedge product /\^k x /\^k -> /\^{2k} over the full
        // blade basis, with early exit once the target is filled.
        const auto blades_k = blades_of_grade(n, k);
        const auto blades_2k = blades_of_grade(n, 2 * k);
        RankTracker wedge_rank(static_cast<int>(blades_2k.size()));
        for (size_t i = 0; i < blades_k.size(); ++i) {
            for (size_t j = 0; j < blades_k.size(); ++j) {
                const auto w = wedge(RatMultivector::blade(n, blades_k[i]),
                                     RatMultivector::blade(n, blades_k[j]));
                if (w.is_zero()) continue;
                std::vector<Rational> v(blades_2k.size(), Rational(0));
                for (size_t t = 0; t < blades_2k.size(); ++t) v[t] = w.coeff(blades_2k[t]);
                wedge_rank.insert(std::move(v));
            }
            if (wedge_rank.rank() == static_cast<int>(blades_2k.size())) break;
        }

        RankTracker cup_rank(r.betti_at(2 * k));
        for (int i = 0; i < r.betti_at(k) && cup_rank.rank() < r.betti_at(2 * k); ++i)
            for (int j = 0; j < r.betti_at(k); ++j) {
                auto c = r.cup(k, i, k, j);
                if (c.empty()) c.assign(r.betti_at(2 * k), Rational(0));
                cup_rank.insert(std::move(c));
            }

        details.push_back(Json{{"k", k},
                               {"cup_rank", cup_rank.rank()},
                               {"wedge_rank", wedge_rank.rank()}});
        if (cup_rank.rank() < wedge_rank.rank()) out.verdict = Verdict::obstruction;
    }
    if (details.empty())
        out.witness["note"] = "no degree attains the binomial bound; vacuously passes";
    else
        out.witness["degrees"] = details;
    return out;
}

EigenSplit build_eigen_split(int m) {
    if (m < 1 || m > 2) throw std::invalid_argument("eigen split supported for m in {1, 2}");
    const int n = 4 * m;
    const Rational half(1, 2);

    std::vector<blade_t> reps;
    if (m == 1) {
        reps = {0b0011, 0b1001, 0b0101};  // e12, e14, e13: the f-basis order
    } else {
        for (blade_t b : blades_of_grade(n, 2 * m))
            if (b & 1) reps.push_back(b);
    }

    EigenSplit split{m, {}, {}};
    for (blade_t b : reps) {
        const auto e = RatMultivector::blade(n, b);
        const auto se = hodge_star(e);
        split.plus.push_back(half * (e + se));
        split.minus.push_back(half * (e - se));
    }
    if (m == 1) {
        // The paper-order anti-self-dual triple pairs f2' with e13 and f3'
        // with e14, which is what makes both triples share one P-table.
        std::swap(split.minus[1], split.minus[2]);
    }
    return split;
}

RatMultivector p_map(int m, const RatMultivector& v, const RatMultivector& w) {
    const int n = 4 * m;
    if (v.dim() != n || w.dim() != n)
        throw std::invalid_argument("p_map arguments must live in dimension 4m");
    const auto gv = v.homogeneous_grade();
    const auto gw = w.homogeneous_grade();
    if ((!v.is_zero() && gv != 2 * m) || (!w.is_zero() && gw != 2 * m))
        throw std::invalid_argument("p_map arguments must be homogeneous of grade 2m");
    return grade_project(clifford_euclidean(v, w), 2 * m);
}

bool check_p_closure(int m) {
    const auto split = build_eigen_split(m);
    const int n = 4 * m;

    for (const auto& v : split.plus)
        for (const auto& w : split.plus)
            if (!same_eigenvector(p_map(m, v, w), +1)) return false;
    for (const auto& v : split.minus)
        for (const auto& w : split.minus)
            if (!same_eigenvector(p_map(m, v, w), -1)) return false;

    // Operator identity star P(v, w) = P(star v, w) on all middle blades.
    const auto middles = blades_of_grade(n, 2 * m);
    for (blade_t bv : middles) {
        const auto v = RatMultivector::blade(n, bv);
        for (blade_t bw : middles) {
            const auto w = RatMultivector::blade(n, bw);
            if (hodge_star(p_map(m, v, w)) != p_map(m, hodge_star(v), w)) return false;
        }
    }

    // The star as left Clifford multiplication by (-1)^m e_{12...n}.
    const blade_t top = (blade_t(1) << n) - 1;
    auto vol = RatMultivector::blade(n, top);
    if (m % 2 == 1) vol = -vol;
    for (blade_t bv : middles) {
        const auto v = RatMultivector::blade(n, bv);
        if (grade_project(clifford_euclidean(vol, v), 2 * m) != hodge_star(v)) return false;
    }
    return true;
}

std::optional<CrossProductCertificate> cross_product_certificate(const RatMultivector& u,
                                                                 const RatMultivector& w) {
    if (u.dim() != 4 || w.dim() != 4)
        throw std::invalid_argument("cross product certificate requires dimension 4");
    if (u.is_zero() || w.is_zero() || u.homogeneous_grade() != 2 || w.homogeneous_grade() != 2)
        throw std::invalid_argument("certificate inputs must be nonzero of grade 2");
    const bool both_plus = same_eigenvector(u, +1) && same_eigenvector(w, +1);
    const bool both_minus = same_eigenvector(u, -1) && same_eigenvector(w, -1);
    if (!both_plus && !both_minus)
        throw std::invalid_argument("certificate inputs must lie in one star eigenspace");

    const Rational uu = euclidean_inner(u, u);
    const Rational ww = euclidean_inner(w, w);
    const Rational uw = euclidean_inner(u, w);
    const Rational gram_det = uu * ww - uw * uw;
    if (is_zero(gram_det)) return std::nullopt;  // dependent inputs

    const auto p = p_map(1, u, w);
    // Orthogonal projection residue of p against span{u, w}, solved exactly
    // from the 2x2 Gram system.
    const Rational pu = euclidean_inner(p, u);
    const Rational pw = euclidean_inner(p, w);
    const Rational alpha = (pu * ww - pw * uw) / gram_det;
    const Rational beta = (pw * uu - pu * uw) / gram_det;
    const auto orthogonal = p - alpha * u - beta * w;
    return CrossProductCertificate{p, orthogonal};
}

CheckResult check_dim4_clifford(const GradedRing& r) {
    CheckResult out{"dim4_clifford", Verdict::pass, Json::object()};
    if (r.dimension() != 4) {
        out.verdict = Verdict::inapplicable;
        out.witness["note"] = "dimension is not 4";
        return out;
    }
    const auto form = intersection_form(r);
    if (form.sig.zero > 0)
        throw std::domain_error(
            "degenerate intersection form: not the ring of a closed oriented manifold");
    out.witness["b_plus"] = form.sig.positive;
    out.witness["b_minus"] = form.sig.negative;

    auto admissible = [](int b) { return b == 0 || b == 1 || b == 3; };
    if (!admissible(form.sig.positive) || !admissible(form.sig.negative))
        out.verdict = Verdict::obstruction;

    if (form.sig.positive == 2 || form.sig.negative == 2) {
        // A dimension-2 star-eigenspace would have to be closed under the
        // middle Clifford projection P; the certificates below show P pushes
        // every independent pair out of its own span (cross-product algebra).
        const auto split = build_eigen_split(1);
        Json certs = Json::array();
        const int pairs[3][2] = {{0, 1}, {1, 2}, {2, 0}};
        for (const auto& pr : pairs) {
            const auto& u = split.plus[pr[0]];
            const auto& w = split.plus[pr[1]];
            const auto cert = cross_product_certificate(u, w);
            certs.push_back(Json{{"u", multivector_json(u)},
                                 {"w", multivector_json(w)},
                                 {"p", multivector_json(cert->product)},
                                 {"orthogonal_component", multivector_json(cert->orthogonal)}});
        }
        out.witness["no_2dim_closed_subspace_certificates"] = certs;
    }
    return out;
}

const std::vector<std::string>& all_check_ids() {
    static const std::vector<std::string> ids = {"betti_bound", "b1_rule", "middle_split",
                                                 "wedge_surjectivity", "dim4_clifford"};
    return ids;
}

ObstructionReport full_report(const GradedRing& r, const std::vector<std::string>& selected) {
    auto wanted = [&](const std::string& id) {
        return selected.empty() || std::find(selected.begin(), selected.end(), id) != selected.end();
    };

    ObstructionReport report;
    report.ring = r.name();
    if (wanted("betti_bound")) report.checks.push_back(check_betti_bound(r));
    if (wanted("b1_rule")) report.checks.push_back(check_b1(r));
    if (wanted("middle_split")) report.checks.push_back(check_middle_split(r));
    if (wanted("wedge_surjectivity")) report.checks.push_back(check_wedge_surjectivity(r));
    if (wanted("dim4_clifford")) report.checks.push_back(check_dim4_clifford(r));

    for (const auto& check : report.checks) {
        if (check.verdict != Verdict::obstruction) continue;
        report.clifford_formal_possible = false;
        if (check.id != "dim4_clifford") report.conformally_formal_possible = false;
    }
    if (r.dimension() == 4) report.uqr_elliptic_possible = report.clifford_formal_possible;
    return report;
}

}  // namespace formality
