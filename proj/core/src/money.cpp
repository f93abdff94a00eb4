#include "phishscan/money.hpp"

#include <cmath>

namespace phishscan {

namespace {

BigInt pow10(unsigned n) {
  BigInt out = 1;
  for (unsigned i = 0; i < n; ++i) out *= 10;
  return out;
}

const BigInt& scale_factor() {
  static const BigInt f = pow10(Decimal::kScale);
  return f;
}

// Parses "int[.frac]" into an integer scaled by 10^scale; rejects extra precision.
BigInt parse_fixed(std::string_view text, unsigned scale, const char* what) {
  if (text.empty()) throw ParseError(std::string("empty ") + what);
  const auto dot = text.find('.');
  const auto whole = text.substr(0, dot);
  const auto frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() && frac.empty()) throw ParseError(std::string("bad ") + what + " '" + std::string(text) + "'");
  if (frac.size() > scale)
    throw ParseError(std::string(what) + " has more than " + std::to_string(scale) + " fractional digits: '" +
                     std::string(text) + "'");
  BigInt out = 0;
  for (char c : whole) {
    if (c < '0' || c > '9') throw ParseError(std::string("bad ") + what + " '" + std::string(text) + "'");
    out = out * 10 + (c - '0');
  }
  for (unsigned i = 0; i < scale; ++i) {
    int d = 0;
    if (i < frac.size()) {
      const char c = frac[i];
      if (c < '0' || c > '9') throw ParseError(std::string("bad ") + what + " '" + std::string(text) + "'");
      d = c - '0';
    }
    out = out * 10 + d;
  }
  return out;
}

std::string render_fixed(const BigInt& scaled, unsigned scale, bool trim) {
  const BigInt f = pow10(scale);
  const BigInt whole = scaled / f;
  std::string frac = BigInt(scaled % f).str();
  frac.insert(0, scale - frac.size(), '0');
  if (trim) {
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
  }
  std::string out = whole.str();
  if (!frac.empty()) out += "." + frac;
  return out;
}

}  // namespace

Decimal Decimal::parse(std::string_view text) { return from_scaled(parse_fixed(text, kScale, "decimal")); }

Decimal Decimal::from_scaled(BigInt scaled) {
  if (scaled < 0) throw ValidationError("decimal must be non-negative");
  Decimal d;
  d.scaled_ = std::move(scaled);
  return d;
}

Decimal Decimal::from_integer(const BigInt& whole) { return from_scaled(whole * scale_factor()); }

std::string Decimal::str() const { return render_fixed(scaled_, kScale, true); }

Usd Usd::from_cents(BigInt cents) {
  if (cents < 0) throw ValidationError("USD amount must be non-negative");
  Usd u;
  u.cents_ = std::move(cents);
  return u;
}

Usd Usd::parse(std::string_view text) { return from_cents(parse_fixed(text, 2, "USD amount")); }

Usd Usd::round_from(const Decimal& exact) {
  static const BigInt kDivisor = pow10(Decimal::kScale - 2);
  BigInt cents = exact.scaled() / kDivisor;
  if (BigInt(exact.scaled() % kDivisor) * 2 >= kDivisor) cents += 1;
  return from_cents(std::move(cents));
}

std::string Usd::str() const { return render_fixed(cents_, 2, false); }

double Usd::to_double() const { return cents_.convert_to<double>() / 100.0; }

Decimal usd_value_exact(const U256& amount, unsigned decimals, const Decimal& usd_per_unit) {
  BigInt product = BigInt(amount) * usd_per_unit.scaled();
  return Decimal::from_scaled(product / pow10(decimals));
}

std::string format_eth(const BigInt& wei) {
  const std::string s = render_fixed(wei, 18, true);
  return s;
}

}  // namespace phishscan
