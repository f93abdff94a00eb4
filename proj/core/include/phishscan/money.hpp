#pragma once

#include <compare>
#include <string>
#include <string_view>

#include "phishscan/types.hpp"

namespace phishscan {

/// Non-negative decimal with 18 fractional digits (prices, ratios).
class Decimal {
public:
  static constexpr unsigned kScale = 18;

  Decimal() = default;
  /// Accepts "12", "12.5", "0.0001"; at most 18 fractional digits.
  static Decimal parse(std::string_view text);
  static Decimal from_scaled(BigInt scaled);
  static Decimal from_integer(const BigInt& whole);

  [[nodiscard]] const BigInt& scaled() const noexcept { return scaled_; }
  [[nodiscard]] std::string str() const;
  [[nodiscard]] bool is_zero() const { return scaled_ == 0; }

  friend bool operator==(const Decimal&, const Decimal&) = default;
  friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
    return a.scaled_ == b.scaled_ ? std::strong_ordering::equal
           : a.scaled_ < b.scaled_ ? std::strong_ordering::less
                                   : std::strong_ordering::greater;
  }

private:
  BigInt scaled_ = 0;
};

/// USD amount in whole cents.
class Usd {
public:
  Usd() = default;
  static Usd from_cents(BigInt cents);
  /// Accepts "123", "123.4", "123.45". More than two fractional digits is an error.
  static Usd parse(std::string_view text);

  /// Rounds an exact 18-decimal USD value half-up to cents.
  static Usd round_from(const Decimal& exact);

  [[nodiscard]] const BigInt& cents() const noexcept { return cents_; }
  [[nodiscard]] std::string str() const;
  [[nodiscard]] double to_double() const;

  Usd& operator+=(const Usd& o) {
    cents_ += o.cents_;
    return *this;
  }
  friend Usd operator+(Usd a, const Usd& b) { return a += b; }
  friend bool operator==(const Usd&, const Usd&) = default;
  friend std::strong_ordering operator<=>(const Usd& a, const Usd& b) {
    return a.cents_ == b.cents_ ? std::strong_ordering::equal
           : a.cents_ < b.cents_ ? std::strong_ordering::less
                                 : std::strong_ordering::greater;
  }

private:
  BigInt cents_ = 0;
};

/// Exact USD value (18 decimals) of `amount` raw units priced at `usd_per_unit` per whole token.
Decimal usd_value_exact(const U256& amount, unsigned decimals, const Decimal& usd_per_unit);

/// Wei rendered as ETH, trailing zeros trimmed ("0.001").
std::string format_eth(const BigInt& wei);

}  // namespace phishscan
