#pragma once

#include "patchsim/kernels.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace patchsim {

/// Exact rational over 64-bit numerator and positive denominator, always
/// reduced. Arithmetic that would leave 64 bits throws RangeError.
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;

    bool operator==(const Rational&) const = default;

    double to_double() const;
    /// "314" for integers, "297/10" otherwise.
    std::string to_string() const;

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// A finite sample of a representation: pairs of (represented quantity Q,
/// representing magnitude P) plus the resolution below which magnitude
/// differences carry no meaning.
struct RepScheme {
    std::vector<std::pair<double, double>> pairs;  // (Q, P)
    double resolution = 0.0;

    RepScheme() = default;
    RepScheme(std::vector<std::pair<double, double>> pairs, double resolution);
};

enum class VerdictTag { AnalogIncreasing, AnalogDecreasing, NotAnalog };

const char* verdict_tag_name(VerdictTag tag);

/// Outcome of the monotonicity test. Witnesses are the index couples that
/// break both orderings; they are empty exactly when the tag is analog.
/// On a finite sample an analog tag means "consistent with analog", not a
/// proof over all quantities.
struct Verdict {
    VerdictTag tag = VerdictTag::AnalogIncreasing;
    std::vector<kernels::IndexPair> witnesses;
    bool degenerate = false;  ///< no pair imposed any constraint
};

/// Monotonicity check over every unordered pair: whenever two magnitudes
/// differ by at least the resolution, the smaller magnitude must go with
/// the strictly smaller quantity (increasing) or the strictly larger one
/// (decreasing). Ill-formed schemes (equal Q, magnitudes >= resolution
/// apart) throw ContractError.
Verdict classify(const RepScheme& scheme);

/// New scheme with every magnitude mapped to a * P + c and the resolution
/// scaled to |a| * resolution. a must be nonzero.
RepScheme affine_transform(const RepScheme& scheme, double a, double c);

/// Digit string in base b >= 1, most significant first. `point` is the
/// count of digits left of the radix point; digits right of it carry
/// negative powers. Unary (b = 1) digits must all be 1, and the point is
/// meaningless there.
struct NumeralString {
    std::vector<int> digits;
    int base = 10;
    std::optional<std::size_t> point;

    NumeralString(std::vector<int> digits, int base,
                  std::optional<std::size_t> point = std::nullopt);
};

/// Exact place-value sum of the numeral.
Rational digital_value(const NumeralString& numeral);

/// Check that a unary all-ones string evaluates identically under the
/// given radix-point placements (all placements when none are given).
/// True by construction; exposed so the theorem is testable.
bool unary_point_invariance(std::size_t digit_count,
                            std::span<const std::size_t> point_positions = {});

/// Read a scheme file: header "Q,P", then one Q,P row per pair.
/// Throws ParseError on malformed input.
RepScheme read_scheme_csv(std::istream& in, double resolution);

} // namespace patchsim
