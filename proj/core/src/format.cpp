#include "hedgeql/format.hpp"

#include <cstdio>

namespace hedgeql {

std::string format_number(double value, int max_decimals) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*f", max_decimals, value);
    std::string out(buffer);
    if (out.find('.') != std::string::npos) {
        while (out.back() == '0') out.pop_back();
        if (out.back() == '.') out.pop_back();
    }
    if (out == "-0") out = "0";
    return out;
}

std::string format_interval(const FuzzyInterval& interval, const DomainScale* scale,
                            int max_decimals) {
    const double lo = scale ? scale_to_domain(*scale, interval.lower) : interval.lower;
    const double hi = scale ? scale_to_domain(*scale, interval.upper) : interval.upper;
    std::string out = interval.closed_lower ? "[" : "(";
    out += format_number(lo, max_decimals);
    out += ", ";
    out += format_number(hi, max_decimals);
    out += "]";
    return out;
}

} // namespace hedgeql
