#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "formality/cohomology.hpp"
#include "formality/embedding.hpp"
#include "formality/obstructions.hpp"

namespace formality {

// Preset grammar:
//   atom := S<n> | CP2 | T<n>
//   expr := atom | prod(expr, expr) | connsum(expr, expr) | connsum^<k>(expr)
// T<n> is built as an n-fold product of circle factors. Parse errors carry
// the offending position.
GradedRing parse_preset(const std::string& expr);

// Ring JSON schema: {name, n, betti: [...], cup: [{k,l,i,j,coeffs:[...]}]}.
// Coefficients are integers or "p/q" strings; omitted blocks are zero;
// degree-0 products are implied unit laws and may not be listed.
GradedRing ring_from_json(const Json& j);
Json ring_to_json(const GradedRing& r);

struct RunConfig {
    std::optional<std::string> preset;
    std::optional<std::string> input_path;
    std::vector<std::string> checks;  // empty = all applicable
    std::optional<SearchConfig> search;
    enum class Format { human, json } format = Format::human;
    std::uint64_t seed = 0;
};

Json report_to_json(const ObstructionReport& report, std::uint64_t seed,
                    const SearchOutcome* search_outcome, const SearchConfig* search_config);

// Exit codes: 0 all checks pass, 2 at least one obstruction, 1 input or
// validation error. The report goes to `out`; errors go to `err`. Exit codes
// depend only on the verdicts, never on the output format.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace formality
