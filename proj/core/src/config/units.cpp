#include "aloof/config/units.hpp"

#include "aloof/errors.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace aloof::config {

namespace {

// Units are decimal multiples of SI, stored as the power of ten.
using SuffixTable = std::vector<std::pair<std::string_view, int>>;

const SuffixTable& suffixes(Dimension d) {
    static const SuffixTable none{};
    static const SuffixTable length{{"m", 0}, {"cm", -2}, {"mm", -3}, {"um", -6}, {"nm", -9}};
    static const SuffixTable voltage{{"V", 0}, {"kV", 3}, {"mV", -3}};
    static const SuffixTable energy{{"eV", 0}, {"meV", -3}};
    static const SuffixTable resistivity{{"ohm_m", 0}, {"ohm_cm", -2}};
    static const SuffixTable temperature{{"K", 0}};
    static const SuffixTable angular{{"rad/s", 0}};
    static const SuffixTable inverse_length{{"1/m", 0}};
    static const SuffixTable density{{"1/m3", 0}, {"1/cm3", 6}};
    switch (d) {
    case Dimension::dimensionless: return none;
    case Dimension::length: return length;
    case Dimension::voltage: return voltage;
    case Dimension::energy_ev: return energy;
    case Dimension::resistivity: return resistivity;
    case Dimension::temperature: return temperature;
    case Dimension::angular_frequency: return angular;
    case Dimension::inverse_length: return inverse_length;
    case Dimension::number_density: return density;
    }
    return none;
}

// Scale by re-reading the decimal text with the unit folded into its
// exponent, so "2.9 um" parses to the same double as the literal 2.9e-6.
double apply_exponent(std::string_view number, int exponent) {
    const auto e = number.find_first_of("eE");
    long total = exponent;
    if (e != std::string_view::npos) {
        long own = 0;
        const char* p = number.data() + e + 1;
        if (p != number.data() + number.size() && *p == '+')
            ++p;
        std::from_chars(p, number.data() + number.size(), own);
        total += own;
    }
    const std::string text = fmt::format("{}e{}", number.substr(0, e), total);
    double value = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), value);
    return value;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

} // namespace

double parse_quantity(std::string_view text, Dimension dimension) {
    const std::string_view s = trim(text);
    double value = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+')
        ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr == first)
        throw ConfigError(fmt::format("'{}' is not a number", s));
    if (!std::isfinite(value))
        throw ConfigError(fmt::format("'{}' is not finite", s));
    const std::string_view suffix = trim(std::string_view(ptr, static_cast<std::size_t>(last - ptr)));
    if (suffix.empty())
        return value;
    for (const auto& [name, exponent] : suffixes(dimension))
        if (suffix == name)
            return apply_exponent(std::string_view(first, static_cast<std::size_t>(ptr - first)),
                                  exponent);
    std::string allowed;
    for (const auto& [name, exponent] : suffixes(dimension))
        allowed += (allowed.empty() ? "" : ", ") + std::string(name);
    throw ConfigError(fmt::format("unknown unit '{}' in '{}' (allowed: {})", suffix, s,
                                  allowed.empty() ? "none" : allowed));
}

} // namespace aloof::config
