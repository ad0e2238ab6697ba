#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <complex>
#include <string>
#include <string_view>

#include "qpa/error.hpp"

namespace qpa {

using Complex = std::complex<double>;

/// A transition weight together with the literal it was written as.
///
/// Accepted literal forms:
///   1   -1   0.25   3e-1        decimal numbers
///   1/3  -2/7                    ratios
///   sqrt(2/7)  -sqrt(1/2)        square roots of a decimal or ratio
///   (re,im)                      complex pair, each part any real form above
///
/// The literal is kept so documents can be written back unchanged.
class Amplitude {
  public:
    Amplitude() : value_(1.0), literal_("1") {}

    static Amplitude parse(std::string_view text);

    /// Amplitude from a value; the literal is the shortest decimal that
    /// round-trips the value (complex values use the pair form).
    static Amplitude from_value(Complex value);

    const Complex &value() const { return value_; }
    const std::string &literal() const { return literal_; }

  private:
    Amplitude(Complex value, std::string literal) : value_(value), literal_(std::move(literal)) {}

    Complex value_;
    std::string literal_;
};

namespace detail {

class LiteralParser {
  public:
    explicit LiteralParser(std::string_view text) : text_(text) {}

    Complex parse() {
        skip_ws();
        Complex result;
        if (peek() == '(') {
            ++pos_;
            double re = real();
            expect(',');
            double im = real();
            expect(')');
            result = Complex(re, im);
        } else {
            result = Complex(real(), 0.0);
        }
        skip_ws();
        if (pos_ != text_.size()) {
            fail("trailing characters");
        }
        return result;
    }

  private:
    double real() {
        skip_ws();
        double sign = 1.0;
        if (peek() == '-' || peek() == '+') {
            sign = peek() == '-' ? -1.0 : 1.0;
            ++pos_;
            skip_ws();
        }
        if (text_.substr(pos_, 4) == "sqrt") {
            pos_ += 4;
            expect('(');
            double inner = ratio();
            expect(')');
            if (inner < 0) {
                fail("square root of a negative number");
            }
            return sign * std::sqrt(inner);
        }
        return sign * ratio();
    }

    double ratio() {
        double num = number();
        skip_ws();
        if (peek() == '/') {
            ++pos_;
            double den = number();
            if (den == 0.0) {
                fail("division by zero");
            }
            return num / den;
        }
        return num;
    }

    double number() {
        skip_ws();
        size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                text_[pos_] == 'e' || text_[pos_] == 'E' ||
                ((text_[pos_] == '-' || text_[pos_] == '+') && pos_ > start &&
                 (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E')))) {
            ++pos_;
        }
        if (start == pos_) {
            fail("expected a number");
        }
        double out = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, out);
        if (ec != std::errc() || ptr != text_.data() + pos_) {
            fail("bad number '" + std::string(text_.substr(start, pos_ - start)) + "'");
        }
        return out;
    }

    void expect(char c) {
        skip_ws();
        if (peek() != c) {
            fail(std::string("expected '") + c + "'");
        }
        ++pos_;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    [[noreturn]] void fail(const std::string &what) const {
        throw ParseError("amplitude literal '" + std::string(text_) + "': " + what);
    }

    std::string_view text_;
    size_t pos_ = 0;
};

inline std::string shortest_decimal(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace detail

inline Amplitude Amplitude::parse(std::string_view text) {
    Complex v = detail::LiteralParser(text).parse();
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw ParseError("amplitude literal '" + std::string(text) + "' is not finite");
    }
    return Amplitude(v, std::string(text));
}

inline Amplitude Amplitude::from_value(Complex value) {
    if (value.imag() == 0.0) {
        return Amplitude(value, detail::shortest_decimal(value.real()));
    }
    return Amplitude(
        value,
        "(" + detail::shortest_decimal(value.real()) + "," + detail::shortest_decimal(value.imag()) + ")");
}

}  // namespace qpa
