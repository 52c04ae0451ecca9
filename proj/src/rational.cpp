#include "atb/rational.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace atb {

double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

std::int64_t ceil_to_int(const Rational& r) {
    const auto num = r.numerator();
    const auto den = r.denominator();  // boost keeps den > 0
    auto q = num / den;
    if (num % den != 0 && num > 0) ++q;
    return q;
}

namespace {

std::int64_t parse_int(std::string_view text) {
    std::int64_t value = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last) {
        throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    if (text.empty()) throw std::invalid_argument("empty rational");

    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        const auto num = parse_int(text.substr(0, slash));
        const auto den = parse_int(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
        return Rational(num, den);
    }
    if (const auto dot = text.find('.'); dot != std::string_view::npos) {
        const auto whole_text = text.substr(0, dot);
        const auto frac_text = text.substr(dot + 1);
        if (frac_text.empty() || frac_text.size() > 15) {
            throw std::invalid_argument("bad decimal: '" + std::string(text) + "'");
        }
        const bool negative = !whole_text.empty() && whole_text.front() == '-';
        const std::int64_t whole =
            (whole_text.empty() || whole_text == "-") ? 0 : parse_int(whole_text);
        const std::int64_t frac = parse_int(frac_text);
        if (frac < 0) throw std::invalid_argument("bad decimal: '" + std::string(text) + "'");
        std::int64_t scale = 1;
        for (std::size_t i = 0; i < frac_text.size(); ++i) scale *= 10;
        Rational value = Rational(whole) + Rational(negative ? -frac : frac, scale);
        return value;
    }
    return Rational(parse_int(text));
}

Rational rational_from_double(double value, std::int64_t max_denominator) {
    if (!std::isfinite(value)) throw std::invalid_argument("non-finite value");
    for (std::int64_t den = 1; den <= max_denominator; ++den) {
        const double scaled = value * static_cast<double>(den);
        const double rounded = std::round(scaled);
        if (std::abs(scaled - rounded) <= 1e-9 * std::max(1.0, std::abs(scaled))) {
            return Rational(static_cast<std::int64_t>(rounded), den);
        }
    }
    throw std::invalid_argument("value " + std::to_string(value) +
                                " is not a simple fraction; write it as \"p/q\"");
}

std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace atb
