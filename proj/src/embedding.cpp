#include "formality/embedding.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

#include "formality/obstructions.hpp"

namespace formality {

namespace {

struct WedgeEntry {
    int i, j, out;
    double sign;
};
struct CliffordEntry {
    int i, j, out_grade, out;
    double sign;
};

// Blade-level product tables for one ambient dimension, so the hot loop of
// the optimizer runs on flat arrays instead of sparse multivectors.
struct BladeTables {
    int n;
    std::vector<std::vector<blade_t>> blades;          // per grade
    std::vector<int> pos;                              // blade bits -> index within grade
    std::vector<std::vector<WedgeEntry>> wedge;        // (k,l) -> entries, k+l <= n
    std::vector<std::vector<CliffordEntry>> clifford;  // (k,l) -> entries
    std::vector<std::vector<std::pair<int, double>>> star;  // per grade: pos -> (out_pos, sign)

    int pair_index(int k, int l) const { return k * (n + 1) + l; }

    explicit BladeTables(int n_) : n(n_) {
        blades.resize(n + 1);
        pos.assign(size_t(1) << n, -1);
        for (int k = 0; k <= n; ++k) {
            blades[k] = blades_of_grade(n, k);
            for (size_t p = 0; p < blades[k].size(); ++p) pos[blades[k][p]] = int(p);
        }
        wedge.resize((n + 1) * (n + 1));
        clifford.resize((n + 1) * (n + 1));
        for (int k = 0; k <= n; ++k)
            for (int l = 0; l <= n; ++l) {
                auto& wtab = wedge[pair_index(k, l)];
                auto& ctab = clifford[pair_index(k, l)];
                for (size_t i = 0; i < blades[k].size(); ++i)
                    for (size_t j = 0; j < blades[l].size(); ++j) {
                        const blade_t a = blades[k][i], b = blades[l][j];
                        const double sign = reorder_sign(a, b);
                        if (k + l <= n && (a & b) == 0)
                            wtab.push_back({int(i), int(j), pos[a | b], sign});
                        ctab.push_back({int(i), int(j), grade_of(a ^ b), pos[a ^ b], sign});
                    }
            }
        star.resize(n + 1);
        const blade_t full = (blade_t(1) << n) - 1;
        for (int k = 0; k <= n; ++k)
            for (blade_t b : blades[k]) {
                const blade_t comp = full & ~b;
                star[k].emplace_back(pos[comp], double(reorder_sign(b, comp)));
            }
    }
};

// Free parameters: all entries of phi[k] for 1 <= k <= n-1 with b_k > 0
// (column-major), then the single top coefficient. phi[0] stays pinned.
struct ParamLayout {
    int n = 0;
    std::vector<int> offset;  // per grade; -1 when absent
    int top_offset = 0;
    int count = 0;

    ParamLayout(const GradedRing& r, int n_) : n(n_), offset(n_ + 1, -1) {
        int at = 0;
        for (int k = 1; k < n; ++k) {
            if (r.betti_at(k) == 0) continue;
            offset[k] = at;
            at += int(blades_of_grade(n, k).size()) * r.betti_at(k);
        }
        top_offset = at;
        count = at + 1;
    }
};

class Evaluator {
  public:
    Evaluator(const GradedRing& r, int n, EmbedMode mode)
        : ring_(r), n_(n), mode_(mode), tables_(n), layout_(r, n) {
        rows_.resize(n_ + 1);
        for (int k = 0; k <= n_; ++k) rows_[k] = int(tables_.blades[k].size());
        // cup coefficient vectors, flattened per (k,l,i,j)
        cup_.resize((n_ + 1) * (n_ + 1));
        for (int k = 1; k < n_; ++k)
            for (int l = 1; k + l <= n_; ++l) {
                auto& block = cup_[tables_.pair_index(k, l)];
                block.resize(size_t(r.betti_at(k)) * r.betti_at(l));
                for (int i = 0; i < r.betti_at(k); ++i)
                    for (int j = 0; j < r.betti_at(l); ++j) {
                        const auto c = r.cup(k, i, l, j);
                        auto& v = block[size_t(i) * r.betti_at(l) + j];
                        v.resize(c.size());
                        for (size_t t = 0; t < c.size(); ++t) v[t] = to_double(c[t]);
                    }
            }
    }

    const ParamLayout& layout() const { return layout_; }
    int rows(int k) const { return rows_[k]; }

    // column j of phi_k inside a parameter vector
    const double* column(const std::vector<double>& theta, int k, int j) const {
        return theta.data() + layout_.offset[k] + size_t(j) * rows_[k];
    }

    ResidualBreakdown breakdown(const std::vector<double>& theta) const {
        ResidualBreakdown out;
        std::vector<std::vector<double>> ortho(n_ + 1);  // orthonormalized spans
        if (mode_ != EmbedMode::wedge_only)
            for (int k = 0; k <= n_; ++k)
                if (ring_.betti_at(k) > 0) ortho[k] = orthonormal_span(theta, k);

        std::vector<double> prod, target, scratch;
        // cup residual
        for (int k = 1; k < n_; ++k) {
            if (ring_.betti_at(k) == 0) continue;
            for (int l = 1; k + l <= n_; ++l) {
                if (ring_.betti_at(l) == 0) continue;
                const auto& wtab = tables_.wedge[tables_.pair_index(k, l)];
                const auto& cups = cup_[tables_.pair_index(k, l)];
                for (int i = 0; i < ring_.betti_at(k); ++i) {
                    const double* ci = column(theta, k, i);
                    for (int j = 0; j < ring_.betti_at(l); ++j) {
                        const double* cj = column(theta, l, j);
                        prod.assign(rows_[k + l], 0.0);
                        for (const auto& e : wtab) prod[e.out] += e.sign * ci[e.i] * cj[e.j];
                        const auto& cv = cups[size_t(i) * ring_.betti_at(l) + j];
                        apply_phi(theta, k + l, cv, target);
                        double acc = 0.0;
                        for (int t = 0; t < rows_[k + l]; ++t) {
                            const double d = target[t] - prod[t];
                            acc += d * d;
                        }
                        out.cup += acc;
                    }
                }
            }
        }

        // star closure: star phi_k(x) must lie in span phi_{n-k}
        if (mode_ != EmbedMode::wedge_only) {
            for (int k = 0; k <= n_; ++k) {
                if (ring_.betti_at(k) == 0) continue;
                const auto& stab = tables_.star[k];
                for (int j = 0; j < ring_.betti_at(k); ++j) {
                    const double* cj = column(theta, k, j);
                    scratch.assign(rows_[n_ - k], 0.0);
                    for (int i = 0; i < rows_[k]; ++i)
                        scratch[stab[i].first] += stab[i].second * cj[i];
                    out.star += projection_defect(scratch, ortho[n_ - k], rows_[n_ - k]);
                }
            }
        }

        // clifford closure: every graded part of phi(x) . phi(y) must lie in
        // the matching span. Grade 0 is always inside span{1}.
        if (mode_ == EmbedMode::wedge_star_clifford) {
            std::vector<std::vector<double>> parts(n_ + 1);
            for (int k = 1; k < n_; ++k) {
                if (ring_.betti_at(k) == 0) continue;
                for (int l = 1; l < n_; ++l) {
                    if (ring_.betti_at(l) == 0) continue;
                    const auto& ctab = tables_.clifford[tables_.pair_index(k, l)];
                    for (int i = 0; i < ring_.betti_at(k); ++i) {
                        const double* ci = column(theta, k, i);
                        for (int j = 0; j < ring_.betti_at(l); ++j) {
                            const double* cj = column(theta, l, j);
                            for (int g = 0; g <= n_; ++g) parts[g].assign(rows_[g], 0.0);
                            for (const auto& e : ctab)
                                parts[e.out_grade][e.out] += e.sign * ci[e.i] * cj[e.j];
                            for (int g = 1; g <= n_; ++g) {
                                if (ring_.betti_at(g) > 0)
                                    out.clifford +=
                                        projection_defect(parts[g], ortho[g], rows_[g]);
                                else
                                    for (double v : parts[g]) out.clifford += v * v;
                            }
                        }
                    }
                }
            }
        }

        out.injectivity_margin = margin(theta);
        return out;
    }

    double margin(const std::vector<double>& theta) const {
        double worst = 1.0;  // phi_0 = [1] contributes sigma = 1
        for (int k = 1; k < n_; ++k) {
            if (ring_.betti_at(k) == 0) continue;
            const int b = ring_.betti_at(k);
            Eigen::Map<const Eigen::MatrixXd> m(theta.data() + layout_.offset[k], rows_[k], b);
            Eigen::MatrixXd gram = m.transpose() * m;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
            worst = std::min(worst, std::sqrt(std::max(0.0, es.eigenvalues().minCoeff())));
        }
        worst = std::min(worst, std::abs(theta[layout_.top_offset]));
        return worst;
    }

    // Descent objective: pure residual plus a soft margin floor that keeps
    // restarts from collapsing onto the degenerate zero map, plus a push
    // toward the positive-orientation branch for the top coefficient. The
    // reported residual is always the pure one.
    double objective(const std::vector<double>& theta) const {
        const auto b = breakdown(theta);
        double penalty = 0.0;
        const double floor = 0.05;
        const double deficit = std::max(0.0, floor - b.injectivity_margin);
        penalty += 10.0 * deficit * deficit;
        const double top = theta[layout_.top_offset];
        const double tdef = std::max(0.0, floor - top);
        penalty += 10.0 * tdef * tdef;
        return b.total() + penalty;
    }

  private:
    void apply_phi(const std::vector<double>& theta, int k, const std::vector<double>& coeffs,
                   std::vector<double>& out) const {
        out.assign(rows_[k], 0.0);
        if (coeffs.empty()) return;
        if (k == 0) {
            out[0] = coeffs[0];
            return;
        }
        if (k == n_) {
            out[0] = coeffs[0] * theta[layout_.top_offset];
            return;
        }
        for (int j = 0; j < ring_.betti_at(k); ++j) {
            if (coeffs[j] == 0.0) continue;
            const double* cj = column(theta, k, j);
            for (int t = 0; t < rows_[k]; ++t) out[t] += coeffs[j] * cj[t];
        }
    }

    // Modified Gram-Schmidt basis of span(phi_k), flattened column-major;
    // near-zero directions are dropped.
    std::vector<double> orthonormal_span(const std::vector<double>& theta, int k) const {
        std::vector<double> basis;
        std::vector<double> col(rows_[k]);
        for (int j = 0; j < ring_.betti_at(k); ++j) {
            if (k == 0) {
                col[0] = 1.0;
            } else if (k == n_) {
                col[0] = theta[layout_.top_offset];
            } else {
                const double* cj = column(theta, k, j);
                std::copy(cj, cj + rows_[k], col.begin());
            }
            const int have = int(basis.size()) / rows_[k];
            for (int q = 0; q < have; ++q) {
                const double* bq = basis.data() + size_t(q) * rows_[k];
                double dot = 0.0;
                for (int t = 0; t < rows_[k]; ++t) dot += bq[t] * col[t];
                for (int t = 0; t < rows_[k]; ++t) col[t] -= dot * bq[t];
            }
            double norm = 0.0;
            for (double v : col) norm += v * v;
            norm = std::sqrt(norm);
            if (norm < 1e-12) continue;
            for (double& v : col) v /= norm;
            basis.insert(basis.end(), col.begin(), col.end());
        }
        return basis;
    }

    double projection_defect(const std::vector<double>& v, const std::vector<double>& basis,
                             int len) const {
        double defect = 0.0;
        for (double x : v) defect += x * x;
        const int count = len > 0 ? int(basis.size()) / len : 0;
        for (int q = 0; q < count; ++q) {
            const double* bq = basis.data() + size_t(q) * len;
            double dot = 0.0;
            for (int t = 0; t < len; ++t) dot += bq[t] * v[t];
            defect -= dot * dot;
        }
        return std::max(0.0, defect);
    }

    const GradedRing& ring_;
    int n_;
    EmbedMode mode_;
    BladeTables tables_;
    ParamLayout layout_;
    std::vector<int> rows_;
    std::vector<std::vector<std::vector<double>>> cup_;
};

std::vector<double> candidate_to_theta(const Evaluator& ev, const GradedRing& r,
                                       const EmbeddingCandidate& cand) {
    const auto& layout = ev.layout();
    std::vector<double> theta(layout.count, 0.0);
    for (int k = 1; k < cand.n; ++k) {
        if (layout.offset[k] < 0) continue;
        for (int j = 0; j < r.betti_at(k); ++j)
            for (int i = 0; i < ev.rows(k); ++i)
                theta[layout.offset[k] + size_t(j) * ev.rows(k) + i] = cand.phi[k].at(i, j);
    }
    theta[layout.top_offset] = cand.phi[cand.n].at(0, 0);
    return theta;
}

EmbeddingCandidate theta_to_candidate(const Evaluator& ev, const GradedRing& r, int n,
                                      const std::vector<double>& theta) {
    EmbeddingCandidate cand = make_candidate(r);
    for (int k = 1; k < n; ++k) {
        if (ev.layout().offset[k] < 0) continue;
        for (int j = 0; j < r.betti_at(k); ++j)
            for (int i = 0; i < ev.rows(k); ++i)
                cand.phi[k].at(i, j) = theta[ev.layout().offset[k] + size_t(j) * ev.rows(k) + i];
    }
    cand.phi[n].at(0, 0) = theta[ev.layout().top_offset];
    return cand;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    // splitmix64 step
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct RestartResult {
    double residual = std::numeric_limits<double>::infinity();
    double margin = 0.0;
    double top = 0.0;
    bool certificate = false;
    std::vector<double> theta;
};

RestartResult run_restart(const Evaluator& ev, const GradedRing& r, const SearchConfig& cfg,
                          std::uint64_t restart_seed) {
    const auto& layout = ev.layout();
    std::mt19937_64 rng(restart_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // random orthonormal frame per degree, positive unit top coefficient
    std::vector<double> theta(layout.count, 0.0);
    for (int k = 1; k < layout.n; ++k) {
        if (layout.offset[k] < 0) continue;
        const int rows = ev.rows(k);
        const int cols = r.betti_at(k);
        Eigen::MatrixXd m(rows, cols);
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < rows; ++i) m(i, j) = gauss(rng);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < rows; ++i)
                theta[layout.offset[k] + size_t(j) * rows + i] = q(i, j);
    }
    theta[layout.top_offset] = 1.0;

    std::vector<double> steps(layout.count, 0.25);
    double best = ev.objective(theta);

    for (int sweep = 0; sweep < cfg.iterations; ++sweep) {
        bool improved = false;
        double max_step = 0.0;
        for (int p = 0; p < layout.count; ++p) {
            bool moved = false;
            for (double dir : {+1.0, -1.0}) {
                theta[p] += dir * steps[p];
                double trial = ev.objective(theta);
                if (trial < best) {
                    best = trial;
                    moved = true;
                    // ride the descent direction while it keeps paying
                    for (int ext = 0; ext < 8; ++ext) {
                        theta[p] += dir * steps[p];
                        trial = ev.objective(theta);
                        if (trial >= best) {
                            theta[p] -= dir * steps[p];
                            break;
                        }
                        best = trial;
                    }
                    break;
                }
                theta[p] -= dir * steps[p];
            }
            if (moved) {
                improved = true;
                steps[p] = std::min(steps[p] * 2.0, 0.5);
            } else {
                steps[p] *= 0.5;
            }
            max_step = std::max(max_step, steps[p]);
        }

        const auto bd = ev.breakdown(theta);
        if (bd.total() < cfg.certificate_residual && bd.injectivity_margin > cfg.margin_threshold &&
            theta[layout.top_offset] > 0.0) {
            RestartResult out;
            out.residual = bd.total();
            out.margin = bd.injectivity_margin;
            out.top = theta[layout.top_offset];
            out.certificate = true;
            out.theta = std::move(theta);
            return out;
        }
        if (!improved && max_step < 1e-13) break;
    }

    const auto bd = ev.breakdown(theta);
    RestartResult out;
    out.residual = bd.total();
    out.margin = bd.injectivity_margin;
    out.top = theta[layout.top_offset];
    out.certificate = false;
    out.theta = std::move(theta);
    return out;
}

}  // namespace

const char* to_string(EmbedMode m) {
    switch (m) {
        case EmbedMode::wedge_only: return "wedge-only";
        case EmbedMode::wedge_star: return "wedge+star";
        case EmbedMode::wedge_star_clifford: return "wedge+star+clifford";
    }
    return "?";
}

EmbedMode embed_mode_from_string(const std::string& s) {
    if (s == "wedge-only" || s == "wedge") return EmbedMode::wedge_only;
    if (s == "wedge+star" || s == "star") return EmbedMode::wedge_star;
    if (s == "wedge+star+clifford" || s == "clifford") return EmbedMode::wedge_star_clifford;
    throw std::invalid_argument("unknown embedding mode '" + s + "'");
}

EmbeddingCandidate make_candidate(const GradedRing& r) {
    const int n = r.dimension();
    EmbeddingCandidate cand;
    cand.n = n;
    cand.phi.reserve(n + 1);
    for (int k = 0; k <= n; ++k)
        cand.phi.emplace_back(int(blades_of_grade(n, k).size()), r.betti_at(k));
    cand.phi[0].at(0, 0) = 1.0;
    return cand;
}

ResidualBreakdown residual_breakdown(const GradedRing& r, const EmbeddingCandidate& cand,
                                     EmbedMode mode) {
    const int n = r.dimension();
    if (cand.n != n || int(cand.phi.size()) != n + 1)
        throw std::invalid_argument("candidate shape does not match the ring");
    for (int k = 0; k <= n; ++k)
        if (cand.phi[k].rows() != int(blades_of_grade(n, k).size()) ||
            cand.phi[k].cols() != r.betti_at(k))
            throw std::invalid_argument("candidate phi_" + std::to_string(k) + " has wrong shape");
    if (cand.phi[0].at(0, 0) != 1.0)
        throw std::invalid_argument("candidate must map the unit class to 1");
    Evaluator ev(r, n, mode);
    return ev.breakdown(candidate_to_theta(ev, r, cand));
}

double residual(const GradedRing& r, const EmbeddingCandidate& cand, EmbedMode mode) {
    return residual_breakdown(r, cand, mode).total();
}

SearchOutcome search(const GradedRing& r, int n, EmbedMode mode, const SearchConfig& config) {
    if (n != r.dimension())
        throw std::invalid_argument("search target dimension must equal the ring dimension");

    SearchOutcome outcome;
    if (check_betti_bound(r).verdict == Verdict::obstruction) {
        outcome.status = SearchOutcome::Status::refused;
        outcome.note =
            "betti_bound already reports an obstruction; see the obstruction report "
            "(search cannot succeed and is not attempted)";
        return outcome;
    }

    Evaluator ev(r, n, mode);
    const int batch = 8;
    int threads = config.threads > 0 ? config.threads
                                     : int(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, batch);

    std::vector<RestartResult> results(config.restarts);
    int completed = 0;
    for (int base = 0; base < config.restarts && outcome.status != SearchOutcome::Status::certificate;
         base += batch) {
        const int upto = std::min(base + batch, config.restarts);
        std::atomic<int> next(base);
        auto worker = [&]() {
            for (int idx = next.fetch_add(1); idx < upto; idx = next.fetch_add(1))
                results[idx] = run_restart(ev, r, config, mix_seed(config.seed, idx));
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < std::min(threads, upto - base); ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        completed = upto;
        for (int idx = base; idx < upto; ++idx)
            if (results[idx].certificate) {
                outcome.status = SearchOutcome::Status::certificate;
                break;
            }
    }

    // Deterministic reduction: first certificate by restart index, otherwise
    // the smallest residual floor seen across all completed restarts.
    int chosen = -1;
    for (int idx = 0; idx < completed; ++idx)
        if (results[idx].certificate) {
            chosen = idx;
            break;
        }
    if (chosen < 0) {
        for (int idx = 0; idx < completed; ++idx)
            if (chosen < 0 || results[idx].residual < results[chosen].residual) chosen = idx;
        outcome.status = SearchOutcome::Status::failure;
        outcome.note = "budget exhausted without a certificate; residual floor is evidence only";
    }

    const auto& best = results[chosen];
    outcome.best_residual = best.residual;
    outcome.best_margin = best.margin;
    outcome.restarts_used = completed;
    auto cand = theta_to_candidate(ev, r, n, best.theta);
    cand.residuals = ev.breakdown(best.theta);
    outcome.candidate = std::move(cand);
    return outcome;
}

}  // namespace formality
