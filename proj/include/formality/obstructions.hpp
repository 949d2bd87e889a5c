#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "formality/cohomology.hpp"
#include "formality/multivector.hpp"

namespace formality {

using Json = nlohmann::ordered_json;

enum class Verdict { pass, obstruction, inapplicable };

const char* to_string(Verdict v);

struct CheckResult {
    std::string id;
    Verdict verdict = Verdict::pass;
    Json witness;  // machine-checkable evidence; shape depends on the check
};

// Aggregated per-ring verdicts. The overall flags are conjunctions of the
// applicable per-check verdicts; any obstruction forces the corresponding
// flag to false. "possible" is deliberate: a clean sheet means no
// obstruction found, never a positive existence claim.
struct ObstructionReport {
    std::string ring;
    std::vector<CheckResult> checks;
    bool conformally_formal_possible = true;
    bool clifford_formal_possible = true;
    std::optional<bool> uqr_elliptic_possible;  // reported for n = 4 only
};

// Exact bases of the +1/-1 eigenspaces of the Hodge star on the middle
// exterior power of R^{4m}, dimension C(4m,2m)/2 each, mutually orthogonal.
struct EigenSplit {
    int m = 0;
    std::vector<RatMultivector> plus;
    std::vector<RatMultivector> minus;
};

// b_k <= C(n,k) for every k.
CheckResult check_betti_bound(const GradedRing& r);

// b_1 != n-1.
CheckResult check_b1(const GradedRing& r);

// For n = 4m: both signature parts of the intersection form are at most
// C(4m,2m)/2. Inapplicable unless 4 | n; degenerate forms are an input
// error, not a verdict.
CheckResult check_middle_split(const GradedRing& r);

// For each degree with b_k = C(n,k): the cup product H^k x H^k -> H^{2k}
// must have the same rank as the wedge product on the full blade basis,
// since any graded embedding is then forced to be surjective in degree k.
// Rank comparison only; weaker than a full embedding decision but exactly
// what the #^15(S^2 x S^4) argument needs.
CheckResult check_wedge_surjectivity(const GradedRing& r);

// m in {1, 2}. For m = 1 the bases are exactly the f / f' triples with
// f1 = (e12+e34)/2, f2 = (e14+e23)/2, f3 = (e13+e42)/2.
EigenSplit build_eigen_split(int m);

// P(v, w) = <v . w>_{2m}, the middle-grade part of the Euclidean Clifford
// product on /\^{2m} R^{4m}.
RatMultivector p_map(int m, const RatMultivector& v, const RatMultivector& w);

// Exhaustive exact verification that P preserves both star eigenspaces,
// that star P(v,w) = P(star v, w) on all middle blade pairs, and that the
// star on the middle grade is left Clifford multiplication by
// (-1)^m e_{12...n}. Always true; exists as a named property check.
bool check_p_closure(int m);

struct CrossProductCertificate {
    RatMultivector product;     // P(u, w)
    RatMultivector orthogonal;  // component of P(u, w) orthogonal to span{u, w}
};

// For independent u, w in the same star eigenspace of /\^2 R^4, P(u, w) is
// orthogonal to span{u, w} and nonzero, certifying that the span is not
// closed under P. Returns nullopt for dependent inputs.
std::optional<CrossProductCertificate> cross_product_certificate(const RatMultivector& u,
                                                                 const RatMultivector& w);

// Dimension-4 Clifford obstruction: b_2^+ and b_2^- must lie in {0, 1, 3}.
CheckResult check_dim4_clifford(const GradedRing& r);

// Runs every applicable check (optionally restricted to the ids in
// `selected`) and aggregates the overall flags.
ObstructionReport full_report(const GradedRing& r,
                              const std::vector<std::string>& selected = {});

// ids understood by full_report / the CLI --checks flag
const std::vector<std::string>& all_check_ids();

}  // namespace formality
