#include "patchsim/repclass.hpp"

#include "patchsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <numeric>

namespace patchsim {

namespace {

using Wide = __int128;

std::int64_t narrow(Wide v) {
    if (v > std::numeric_limits<std::int64_t>::max() ||
        v < std::numeric_limits<std::int64_t>::min()) {
        throw RangeError("rational arithmetic overflows 64 bits");
    }
    return static_cast<std::int64_t>(v);
}

Wide wide_gcd(Wide a, Wide b) {
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b != 0) {
        Wide t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Rational make_reduced(Wide num, Wide den) {
    if (den == 0) {
        throw ContractError("rational denominator is zero");
    }
    if (den < 0) {
        num = -num;
        den = -den;
    }
    Wide g = wide_gcd(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return Rational(narrow(num), narrow(den));
}

} // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) {
        throw ContractError("rational denominator is zero");
    }
    if (den < 0) {
        if (num == std::numeric_limits<std::int64_t>::min() ||
            den == std::numeric_limits<std::int64_t>::min()) {
            throw RangeError("rational arithmetic overflows 64 bits");
        }
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    num_ = g > 1 ? num / g : num;
    den_ = g > 1 ? den / g : den;
}

Rational Rational::operator+(const Rational& o) const {
    return make_reduced(Wide(num_) * o.den_ + Wide(o.num_) * den_, Wide(den_) * o.den_);
}

Rational Rational::operator-(const Rational& o) const {
    return make_reduced(Wide(num_) * o.den_ - Wide(o.num_) * den_, Wide(den_) * o.den_);
}

Rational Rational::operator*(const Rational& o) const {
    return make_reduced(Wide(num_) * o.num_, Wide(den_) * o.den_);
}

double Rational::to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
}

std::string Rational::to_string() const {
    std::string s = std::to_string(num_);
    if (den_ != 1) {
        s += "/" + std::to_string(den_);
    }
    return s;
}

RepScheme::RepScheme(std::vector<std::pair<double, double>> p, double r)
    : pairs(std::move(p)), resolution(r) {
    if (pairs.size() < 2) {
        throw ContractError("scheme needs at least two (Q, P) pairs");
    }
    if (!(resolution >= 0.0)) {
        throw ContractError("resolution must be >= 0");
    }
    for (const auto& [q, pm] : pairs) {
        if (!std::isfinite(q) || !std::isfinite(pm)) {
            throw ContractError("scheme pairs must be finite");
        }
    }
}

const char* verdict_tag_name(VerdictTag tag) {
    switch (tag) {
        case VerdictTag::AnalogIncreasing: return "analog_increasing";
        case VerdictTag::AnalogDecreasing: return "analog_decreasing";
        case VerdictTag::NotAnalog: return "not_analog";
    }
    return "not_analog";
}

Verdict classify(const RepScheme& scheme) {
    std::vector<double> qs, ps;
    qs.reserve(scheme.pairs.size());
    ps.reserve(scheme.pairs.size());
    for (const auto& [q, p] : scheme.pairs) {
        qs.push_back(q);
        ps.push_back(p);
    }
    const auto report = kernels::pairwise_check(qs, ps, scheme.resolution);

    if (!report.illformed.empty()) {
        const auto [i, j] = report.illformed.front();
        throw ContractError("ill-formed scheme: pairs " + std::to_string(i) + " and " +
                            std::to_string(j) +
                            " share one quantity but their magnitudes differ by at least the "
                            "resolution");
    }

    Verdict verdict;
    if (report.constrained_pairs == 0) {
        verdict.degenerate = true;
        return verdict;  // vacuously monotone; report the increasing tag
    }
    if (report.inc_violations.empty()) {
        return verdict;
    }
    if (report.dec_violations.empty()) {
        verdict.tag = VerdictTag::AnalogDecreasing;
        return verdict;
    }
    verdict.tag = VerdictTag::NotAnalog;
    verdict.witnesses.reserve(report.inc_violations.size() + report.dec_violations.size());
    verdict.witnesses = report.inc_violations;
    verdict.witnesses.insert(verdict.witnesses.end(), report.dec_violations.begin(),
                             report.dec_violations.end());
    std::sort(verdict.witnesses.begin(), verdict.witnesses.end());
    verdict.witnesses.erase(std::unique(verdict.witnesses.begin(), verdict.witnesses.end()),
                            verdict.witnesses.end());
    return verdict;
}

RepScheme affine_transform(const RepScheme& scheme, double a, double c) {
    if (a == 0.0) {
        throw ContractError("affine transform needs a != 0");
    }
    std::vector<std::pair<double, double>> mapped;
    mapped.reserve(scheme.pairs.size());
    for (const auto& [q, p] : scheme.pairs) {
        mapped.emplace_back(q, a * p + c);
    }
    return RepScheme(std::move(mapped), std::abs(a) * scheme.resolution);
}

NumeralString::NumeralString(std::vector<int> d, int b, std::optional<std::size_t> pt)
    : digits(std::move(d)), base(b), point(pt) {
    if (digits.empty()) {
        throw ContractError("numeral needs at least one digit");
    }
    if (base < 1) {
        throw ContractError("base must be >= 1");
    }
    if (point && *point > digits.size()) {
        throw ContractError("radix point index exceeds digit count");
    }
    for (int digit : digits) {
        if (base == 1) {
            if (digit != 1) {
                throw MalformedDigitError("unary digits must all be 1");
            }
        } else if (digit < 0 || digit >= base) {
            throw MalformedDigitError("digit " + std::to_string(digit) +
                                      " outside base " + std::to_string(base));
        }
    }
}

namespace {

std::int64_t checked_pow(int base, std::size_t exp) {
    Wide v = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        v *= base;
        if (v > std::numeric_limits<std::int64_t>::max()) {
            throw RangeError("place value overflows 64 bits");
        }
    }
    return static_cast<std::int64_t>(v);
}

} // namespace

Rational digital_value(const NumeralString& numeral) {
    const std::size_t n = numeral.digits.size();
    const std::size_t left = numeral.point.value_or(n);
    Rational sum(0);
    for (std::size_t i = 0; i < n; ++i) {
        const int digit = numeral.digits[i];
        // Exponent of digit i is left - 1 - i; negative right of the point.
        if (i < left) {
            sum = sum + Rational(digit) * Rational(checked_pow(numeral.base, left - 1 - i));
        } else {
            sum = sum + Rational(digit, checked_pow(numeral.base, i - left + 1));
        }
    }
    return sum;
}

bool unary_point_invariance(std::size_t digit_count,
                            std::span<const std::size_t> point_positions) {
    if (digit_count == 0) {
        throw ContractError("numeral needs at least one digit");
    }
    const std::vector<int> ones(digit_count, 1);
    const Rational reference = digital_value(NumeralString(ones, 1));
    auto matches = [&](std::size_t pos) {
        return digital_value(NumeralString(ones, 1, pos)) == reference;
    };
    if (point_positions.empty()) {
        for (std::size_t pos = 0; pos <= digit_count; ++pos) {
            if (!matches(pos)) {
                return false;
            }
        }
        return true;
    }
    return std::all_of(point_positions.begin(), point_positions.end(), matches);
}

RepScheme read_scheme_csv(std::istream& in, double resolution) {
    std::string line;
    int line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (!line.empty()) {
                return true;
            }
        }
        return false;
    };

    if (!next_line()) {
        throw ParseError(1, 1, "empty scheme file");
    }
    if (line != "Q,P") {
        throw ParseError(line_no, 1, "expected header 'Q,P'");
    }

    auto parse_field = [&](const std::string& text, int col) {
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
            throw ParseError(line_no, col, "bad number '" + text + "'");
        }
        return v;
    };

    std::vector<std::pair<double, double>> pairs;
    while (next_line()) {
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw ParseError(line_no, 1, "expected exactly two fields");
        }
        const double q = parse_field(line.substr(0, comma), 1);
        const double p = parse_field(line.substr(comma + 1), static_cast<int>(comma) + 2);
        pairs.emplace_back(q, p);
    }
    if (pairs.size() < 2) {
        throw ParseError(line_no > 0 ? line_no : 1, 1, "scheme needs at least two data rows");
    }
    return RepScheme(std::move(pairs), resolution);
}

} // namespace patchsim
