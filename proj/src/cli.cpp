#include "formality/cli.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "formality/multivector_io.hpp"

namespace formality {

namespace {

struct PresetParser {
    const std::string& s;
    size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("preset parse error at position " + std::to_string(pos) +
                                    ": " + what);
    }

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos;
    }
    bool try_word(const std::string& w) {
        skip_ws();
        if (s.compare(pos, w.size(), w) == 0) {
            pos += w.size();
            return true;
        }
        return false;
    }

    int parse_int() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) fail("expected a number");
        return std::stoi(s.substr(start, pos - start));
    }

    GradedRing parse_expr() {
        skip_ws();
        if (try_word("prod(")) {
            GradedRing a = parse_expr();
            expect(',');
            GradedRing b = parse_expr();
            expect(')');
            return make_product(a, b);
        }
        if (try_word("connsum^")) {
            const int k = parse_int();
            if (k < 1) fail("connected-sum power must be >= 1");
            expect('(');
            GradedRing a = parse_expr();
            expect(')');
            GradedRing out = a;
            for (int i = 1; i < k; ++i) out = make_connected_sum(out, a);
            return out;
        }
        if (try_word("connsum(")) {
            GradedRing a = parse_expr();
            expect(',');
            GradedRing b = parse_expr();
            expect(')');
            return make_connected_sum(a, b);
        }
        if (try_word("CP2")) return make_cp2();
        if (try_word("S")) return make_sphere(parse_int());
        if (try_word("T")) return make_torus(parse_int());
        fail("expected S<n>, CP2, T<n>, prod(...), connsum(...) or connsum^<k>(...)");
    }

    GradedRing parse() {
        GradedRing r = parse_expr();
        skip_ws();
        if (pos != s.size()) fail("trailing input");
        return r;
    }
};

Rational coeff_from_json(const Json& j) {
    if (j.is_number_integer()) return Rational(static_cast<long>(j.get<std::int64_t>()));
    if (j.is_string()) return parse_rational(j.get<std::string>());
    throw std::invalid_argument("ring JSON: cup coefficients must be integers or 'p/q' strings");
}

Json coeff_to_json(const Rational& q) {
    if (q.get_den() == 1 && q.get_num().fits_slong_p())
        return Json(static_cast<std::int64_t>(q.get_num().get_si()));
    return Json(to_string(q));
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

void print_human(std::ostream& out, const ObstructionReport& report, const GradedRing& ring,
                 std::uint64_t seed, const SearchOutcome* so, const SearchConfig* sc) {
    out << "ring: " << report.ring << "  (n = " << ring.dimension() << ", betti =";
    for (int b : ring.betti()) out << " " << b;
    out << ")\n\n";
    out << "  check                 verdict       evidence\n";
    out << "  --------------------  ------------  ----------------------------------------\n";
    for (const auto& check : report.checks) {
        std::string evidence = check.witness.dump();
        if (evidence.size() > 72) evidence = evidence.substr(0, 69) + "...";
        out << "  " << std::left << std::setw(22) << check.id << std::setw(14)
            << to_string(check.verdict) << evidence << "\n";
    }
    out << "\noverall:\n";
    auto yesno = [](bool v) { return v ? "yes (no obstruction found)" : "no (obstructed)"; };
    out << "  conformally formal possible: " << yesno(report.conformally_formal_possible) << "\n";
    out << "  clifford formal possible:    " << yesno(report.clifford_formal_possible) << "\n";
    if (report.uqr_elliptic_possible)
        out << "  UQR elliptic possible:       " << yesno(*report.uqr_elliptic_possible) << "\n";
    if (so != nullptr && sc != nullptr) {
        out << "\nembedding search (" << to_string(sc->mode) << ", seed " << seed << "):\n";
        switch (so->status) {
            case SearchOutcome::Status::certificate:
                out << "  certificate found: residual " << format_double(so->best_residual)
                    << ", injectivity margin " << format_double(so->best_margin) << " ("
                    << so->restarts_used << " restarts used)\n";
                break;
            case SearchOutcome::Status::failure:
                out << "  no certificate within budget; best residual floor "
                    << format_double(so->best_residual) << " (evidence only, not a verdict)\n";
                break;
            case SearchOutcome::Status::refused:
                out << "  refused: " << so->note << "\n";
                break;
        }
    }
}

}  // namespace

GradedRing parse_preset(const std::string& expr) {
    PresetParser parser{expr, 0};
    std::string trimmed = expr;
    trimmed.erase(std::remove_if(trimmed.begin(), trimmed.end(),
                                 [](unsigned char c) { return std::isspace(c); }),
                  trimmed.end());
    return parser.parse().renamed(trimmed);
}

GradedRing ring_from_json(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("ring JSON: expected an object");
    const std::string name = j.value("name", std::string("ring"));
    if (!j.contains("n") || !j.contains("betti"))
        throw std::invalid_argument("ring JSON: fields 'n' and 'betti' are required");
    const int n = j.at("n").get<int>();
    std::vector<int> betti = j.at("betti").get<std::vector<int>>();

    CupTable cup;
    auto block_shape = [&](int k, int l) {
        return std::vector<std::vector<std::vector<Rational>>>(
            betti.at(k), std::vector<std::vector<Rational>>(
                             betti.at(l), std::vector<Rational>(betti.at(size_t(k) + l))));
    };
    if (j.contains("cup")) {
        for (const auto& entry : j.at("cup")) {
            const int k = entry.at("k").get<int>();
            const int l = entry.at("l").get<int>();
            const int i = entry.at("i").get<int>();
            const int jj = entry.at("j").get<int>();
            if (k < 1 || l < 1)
                throw std::invalid_argument(
                    "ring JSON: degree-0 cup products are implied unit laws; do not list them");
            if (k + l > n)
                throw std::invalid_argument(
                    "ring JSON: cup entry above degree n (products there are zero)");
            if (k >= int(betti.size()) || l >= int(betti.size()) || i >= betti[k] ||
                jj >= betti[l] || i < 0 || jj < 0)
                throw std::invalid_argument("ring JSON: cup entry index out of range");
            const auto& coeffs = entry.at("coeffs");
            if (int(coeffs.size()) != betti[size_t(k) + l])
                throw std::invalid_argument("ring JSON: cup coeffs length must equal b_{k+l}");
            auto [it, fresh] = cup.try_emplace({k, l});
            if (fresh) it->second = block_shape(k, l);
            for (size_t t = 0; t < coeffs.size(); ++t)
                it->second[i][jj][t] = coeff_from_json(coeffs[t]);
        }
    }
    // Blocks never mentioned are all-zero; materialize one order so the ring
    // constructor can mirror and validate.
    for (int k = 1; k < n; ++k)
        for (int l = k; k + l <= n; ++l) {
            if (k >= int(betti.size()) || l >= int(betti.size())) break;
            if (betti[k] == 0 || betti[l] == 0) continue;
            if (cup.count({k, l}) == 0 && cup.count({l, k}) == 0) cup[{k, l}] = block_shape(k, l);
        }
    return GradedRing(name, n, std::move(betti), std::move(cup));
}

Json ring_to_json(const GradedRing& r) {
    Json j;
    j["name"] = r.name();
    j["n"] = r.dimension();
    j["betti"] = r.betti();
    Json cup = Json::array();
    const int n = r.dimension();
    for (int k = 1; k < n; ++k)
        for (int l = k; k + l <= n; ++l)
            for (int i = 0; i < r.betti_at(k); ++i)
                for (int jj = 0; jj < r.betti_at(l); ++jj) {
                    const auto c = r.cup(k, i, l, jj);
                    bool nonzero = false;
                    for (const auto& v : c)
                        if (!is_zero(v)) nonzero = true;
                    if (!nonzero) continue;
                    Json coeffs = Json::array();
                    for (const auto& v : c) coeffs.push_back(coeff_to_json(v));
                    cup.push_back(Json{{"k", k}, {"l", l}, {"i", i}, {"j", jj}, {"coeffs", coeffs}});
                }
    j["cup"] = std::move(cup);
    return j;
}

Json report_to_json(const ObstructionReport& report, std::uint64_t seed,
                    const SearchOutcome* so, const SearchConfig* sc) {
    Json j;
    j["ring"] = report.ring;
    j["seed"] = seed;
    Json checks = Json::array();
    for (const auto& check : report.checks)
        checks.push_back(
            Json{{"id", check.id}, {"verdict", to_string(check.verdict)}, {"witness", check.witness}});
    j["checks"] = std::move(checks);
    Json overall;
    overall["conformally_formal_possible"] = report.conformally_formal_possible;
    overall["clifford_formal_possible"] = report.clifford_formal_possible;
    overall["uqr_elliptic_possible"] =
        report.uqr_elliptic_possible ? Json(*report.uqr_elliptic_possible) : Json(nullptr);
    j["overall"] = std::move(overall);

    if (so != nullptr && sc != nullptr) {
        Json s;
        s["mode"] = to_string(sc->mode);
        s["restarts"] = sc->restarts;
        s["iterations"] = sc->iterations;
        s["seed"] = sc->seed;
        s["thresholds"] = Json{{"certificate_residual", sc->certificate_residual},
                               {"margin", sc->margin_threshold}};
        switch (so->status) {
            case SearchOutcome::Status::certificate: s["status"] = "certificate"; break;
            case SearchOutcome::Status::failure: s["status"] = "failure"; break;
            case SearchOutcome::Status::refused: s["status"] = "refused"; break;
        }
        if (so->status != SearchOutcome::Status::refused) {
            s["residual"] = so->best_residual;
            s["injectivity_margin"] = so->best_margin;
            s["restarts_used"] = so->restarts_used;
        }
        if (!so->note.empty()) s["note"] = so->note;
        if (so->status == SearchOutcome::Status::certificate && so->candidate) {
            Json phi;
            const auto& cand = *so->candidate;
            for (int k = 0; k <= cand.n; ++k) {
                if (cand.phi[k].cols() == 0) continue;
                Json cols = Json::array();
                const auto blades = blades_of_grade(cand.n, k);
                for (int col = 0; col < cand.phi[k].cols(); ++col) {
                    FloatMultivector v(cand.n);
                    for (size_t row = 0; row < blades.size(); ++row)
                        v.add_term(blades[row], cand.phi[k].at(int(row), col));
                    cols.push_back(to_text(v));
                }
                phi[std::to_string(k)] = std::move(cols);
            }
            s["certificate"] = std::move(phi);
        }
        j["search"] = std::move(s);
    }
    return j;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.preset.has_value() == cfg.input_path.has_value())
            throw std::invalid_argument("exactly one of --preset and --input is required");

        GradedRing ring = [&] {
            if (cfg.preset) return parse_preset(*cfg.preset);
            std::ifstream in(*cfg.input_path);
            if (!in) throw std::invalid_argument("cannot open input file " + *cfg.input_path);
            Json j = Json::parse(in);
            return ring_from_json(j);
        }();

        for (const auto& id : cfg.checks) {
            const auto& known = all_check_ids();
            if (std::find(known.begin(), known.end(), id) == known.end())
                throw std::invalid_argument("unknown check id '" + id + "'");
        }

        const ObstructionReport report = full_report(ring, cfg.checks);

        std::optional<SearchOutcome> search_outcome;
        std::optional<SearchConfig> search_config;
        if (cfg.search) {
            search_config = *cfg.search;
            search_config->seed = cfg.seed;
            search_outcome = search(ring, ring.dimension(), search_config->mode, *search_config);
        }

        if (cfg.format == RunConfig::Format::json) {
            out << report_to_json(report, cfg.seed,
                                  search_outcome ? &*search_outcome : nullptr,
                                  search_config ? &*search_config : nullptr)
                       .dump(2)
                << "\n";
        } else {
            print_human(out, report, ring, cfg.seed,
                        search_outcome ? &*search_outcome : nullptr,
                        search_config ? &*search_config : nullptr);
        }

        for (const auto& check : report.checks)
            if (check.verdict == Verdict::obstruction) return 2;
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace formality
