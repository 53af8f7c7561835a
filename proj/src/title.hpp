#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "error.hpp"

namespace pforge {

// Canonical land-title identity. Digit strings are stored verbatim as
// parsed and compared numerically.
struct TitleKey {
    std::optional<std::string> conservation;  // land-conservation office code, 1-3 digits
    char nature = 'T';                        // single A-Z letter
    std::string number;                       // digits, numeric value >= 1
    std::string index;                        // digits

    bool operator==(const TitleKey&) const = default;
};

enum class TitleFormat {
    F1,  // NatureNumber/index        e.g. T1111/20
    F2,  // Nature/Number/index       e.g. T/1111/20
    F3,  // Conservation/Nature/Number/index  e.g. 03/T/1111/20
};

const char* title_format_name(TitleFormat fmt);

enum class TitleMatch { Same, Different, Conflict };

// Trims, upper-cases and matches against the three grammars (mutually
// exclusive by slash count). Throws Unparseable when nothing matches.
std::pair<TitleKey, TitleFormat> parse_title(std::string_view raw);

// Renders the stored digit strings in the requested layout. F3 without a
// conservation code throws MissingConservation.
std::string format_title(const TitleKey& key, TitleFormat fmt);

// Core comparison is (nature, numeric number, numeric index); equal cores
// with two disagreeing conservation codes yield Conflict.
TitleMatch same_title(const TitleKey& a, const TitleKey& b);

// "NN/X/num/idx" with the conservation numerically normalized and padded
// to two digits ("??" when absent); number and index stripped of leading
// zeros. Deterministic join key.
std::string canonical_key(const TitleKey& key);

// Conservation-blind part of the canonical key ("X/num/idx"); the merge
// bucket identity.
std::string canonical_core(const TitleKey& key);

// Warning text when the nature letter falls outside a configured
// whitelist; unknown letters are never an error.
std::optional<std::string> nature_warning(const TitleKey& key, std::string_view whitelist);

}  // namespace pforge
