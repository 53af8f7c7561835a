#include "title.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace pforge {

const char* title_format_name(TitleFormat fmt) {
    switch (fmt) {
        case TitleFormat::F1: return "F1";
        case TitleFormat::F2: return "F2";
        case TitleFormat::F3: return "F3";
    }
    return "?";
}

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return c >= '0' && c <= '9'; });
}

std::string strip_zeros(std::string_view s) {
    std::size_t i = 0;
    while (i + 1 < s.size() && s[i] == '0') ++i;
    return std::string(s.substr(i));
}

bool is_upper_letter(char c) {
    return c >= 'A' && c <= 'Z';
}

[[noreturn]] void unparseable(std::string_view raw, const std::string& why) {
    throw Error(ErrorKind::Unparseable, "cannot parse title '" + std::string(raw) + "': " + why);
}

}  // namespace

std::pair<TitleKey, TitleFormat> parse_title(std::string_view raw) {
    std::string s;
    s.reserve(raw.size());
    std::size_t begin = 0, end = raw.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(raw[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(raw[end - 1]))) --end;
    for (std::size_t i = begin; i < end; ++i)
        s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(raw[i]))));
    if (s.empty()) unparseable(raw, "empty");

    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == '/') {
            parts.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }

    TitleKey key;
    TitleFormat fmt;
    if (parts.size() == 2) {
        // F1: NatureNumber/index
        const std::string& head = parts[0];
        if (head.size() < 2 || !is_upper_letter(head[0]))
            unparseable(raw, "expected a nature letter followed by digits");
        key.nature = head[0];
        key.number = head.substr(1);
        key.index = parts[1];
        fmt = TitleFormat::F1;
    } else if (parts.size() == 3) {
        // F2: Nature/Number/index
        if (parts[0].size() != 1 || !is_upper_letter(parts[0][0]))
            unparseable(raw, "expected a single nature letter");
        key.nature = parts[0][0];
        key.number = parts[1];
        key.index = parts[2];
        fmt = TitleFormat::F2;
    } else if (parts.size() == 4) {
        // F3: Conservation/Nature/Number/index
        if (!all_digits(parts[0]) || parts[0].size() > 3)
            unparseable(raw, "conservation code must be 1-3 digits");
        if (parts[1].size() != 1 || !is_upper_letter(parts[1][0]))
            unparseable(raw, "expected a single nature letter");
        key.conservation = parts[0];
        key.nature = parts[1][0];
        key.number = parts[2];
        key.index = parts[3];
        fmt = TitleFormat::F3;
    } else {
        unparseable(raw, "expected 1 to 3 '/' separators");
    }

    if (!all_digits(key.number)) unparseable(raw, "title number must be digits");
    if (!all_digits(key.index)) unparseable(raw, "title index must be digits");
    if (strip_zeros(key.number) == "0") unparseable(raw, "title number must be >= 1");
    return {std::move(key), fmt};
}

std::string format_title(const TitleKey& key, TitleFormat fmt) {
    switch (fmt) {
        case TitleFormat::F1:
            return std::string(1, key.nature) + key.number + "/" + key.index;
        case TitleFormat::F2:
            return std::string(1, key.nature) + "/" + key.number + "/" + key.index;
        case TitleFormat::F3:
            if (!key.conservation)
                throw Error(ErrorKind::MissingConservation,
                            "format F3 requires a conservation code");
            return *key.conservation + "/" + key.nature + "/" + key.number + "/" + key.index;
    }
    throw std::invalid_argument("bad TitleFormat");
}

TitleMatch same_title(const TitleKey& a, const TitleKey& b) {
    if (a.nature != b.nature || strip_zeros(a.number) != strip_zeros(b.number) ||
        strip_zeros(a.index) != strip_zeros(b.index))
        return TitleMatch::Different;
    if (a.conservation && b.conservation &&
        strip_zeros(*a.conservation) != strip_zeros(*b.conservation))
        return TitleMatch::Conflict;
    return TitleMatch::Same;
}

std::string canonical_key(const TitleKey& key) {
    std::string cons = "??";
    if (key.conservation) {
        cons = strip_zeros(*key.conservation);
        if (cons.size() < 2) cons.insert(cons.begin(), 2 - cons.size(), '0');
    }
    return cons + "/" + canonical_core(key);
}

std::string canonical_core(const TitleKey& key) {
    return std::string(1, key.nature) + "/" + strip_zeros(key.number) + "/" +
           strip_zeros(key.index);
}

std::optional<std::string> nature_warning(const TitleKey& key, std::string_view whitelist) {
    if (whitelist.empty()) return std::nullopt;
    if (whitelist.find(key.nature) != std::string_view::npos) return std::nullopt;
    return "nature letter '" + std::string(1, key.nature) + "' not in configured whitelist";
}

}  // namespace pforge
