#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "formality/cohomology.hpp"
#include "formality/matrix.hpp"

namespace formality {

// Which closure conditions the candidate image is scored against.
enum class EmbedMode { wedge_only, wedge_star, wedge_star_clifford };

const char* to_string(EmbedMode m);
EmbedMode embed_mode_from_string(const std::string& s);

struct ResidualBreakdown {
    double cup = 0.0;
    double star = 0.0;
    double clifford = 0.0;
    double injectivity_margin = 0.0;  // smallest singular value across degrees
    double total() const { return cup + star + clifford; }
};

// Candidate graded map Phi: H^*(M) -> /\* R^n. phi[k] has one column per
// H^k basis class, one row per grade-k blade (ascending blade order).
// phi[0] is pinned to [1]; a valid certificate sends the orientation class
// to a positive multiple of e_{12...n}.
struct EmbeddingCandidate {
    int n = 0;
    std::vector<FloatMatrix> phi;
    ResidualBreakdown residuals;
};

// Zero-initialized candidate of the right shape for the ring (phi[0] = [1]).
EmbeddingCandidate make_candidate(const GradedRing& r);

// Sum of squared closure violations of the candidate, per mode:
// always ||Phi(x u y) - Phi(x) ^ Phi(y)||^2 over all basis pairs, plus the
// projection defects of star Phi(H^k) onto Phi(H^{n-k}) (star modes) and of
// <Phi(x).Phi(y)>_k onto Phi(H^k) (clifford mode). Deterministic.
ResidualBreakdown residual_breakdown(const GradedRing& r, const EmbeddingCandidate& cand,
                                     EmbedMode mode);
double residual(const GradedRing& r, const EmbeddingCandidate& cand, EmbedMode mode);

struct SearchConfig {
    EmbedMode mode = EmbedMode::wedge_star;
    int restarts = 100;
    int iterations = 5000;  // descent sweeps per restart
    std::uint64_t seed = 0;
    double certificate_residual = 1e-8;
    double margin_threshold = 1e-4;
    int threads = 0;  // 0 = hardware concurrency
};

struct SearchOutcome {
    enum class Status { certificate, failure, refused };
    Status status = Status::failure;
    // Certificate: the accepted candidate. Failure: the best candidate seen,
    // kept as evidence only; best_residual is then the measured floor and
    // never a mathematical verdict.
    std::optional<EmbeddingCandidate> candidate;
    double best_residual = 0.0;
    double best_margin = 0.0;
    int restarts_used = 0;
    std::string note;
};

// Multistart derivative-free descent for an explicit embedding certificate.
// Restarts run in parallel with per-restart seeds in fixed-size batches, so
// the outcome is deterministic given the master seed and restart count.
// Refuses rings whose Betti bounds already fail (the exact checkers own
// negative verdicts).
SearchOutcome search(const GradedRing& r, int n, EmbedMode mode, const SearchConfig& config);

}  // namespace formality
