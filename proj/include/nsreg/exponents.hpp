#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsreg {

/// Exact rational number with a positive denominator.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1) : num_(num), den_(den) {  // NOLINT(implicit)
    if (den_ == 0) throw std::invalid_argument("rational with zero denominator");
    normalize();
  }

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
  Rational reciprocal() const { return {den_, num_}; }

  friend Rational operator+(Rational a, Rational b) { return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_}; }
  friend Rational operator-(Rational a, Rational b) { return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_}; }
  friend Rational operator*(Rational a, Rational b) { return {a.num_ * b.num_, a.den_ * b.den_}; }
  friend Rational operator/(Rational a, Rational b) { return {a.num_ * b.den_, a.den_ * b.num_}; }
  friend bool operator==(Rational a, Rational b) noexcept { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend auto operator<=>(Rational a, Rational b) noexcept { return a.num_ * b.den_ <=> b.num_ * a.den_; }

  std::string str() const { return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_); }

  /// Continued-fraction recovery of a rational from a double; nullopt when no
  /// denominator up to 10^6 reproduces it to 1e-12 relative.
  static std::optional<Rational> from_double(double x) {
    if (!std::isfinite(x)) return std::nullopt;
    std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double rest = x;
    for (int iter = 0; iter < 40; ++iter) {
      const double fl = std::floor(rest);
      const auto a = static_cast<std::int64_t>(fl);
      const std::int64_t h2 = a * h1 + h0, k2 = a * k1 + k0;
      if (k2 > 1'000'000) break;
      h0 = h1, h1 = h2, k0 = k1, k1 = k2;
      const double approx = static_cast<double>(h1) / static_cast<double>(k1);
      if (std::abs(approx - x) <= 1e-12 * std::max(1.0, std::abs(x))) return Rational(h1, k1);
      const double frac = rest - fl;
      if (frac == 0.0) break;
      rest = 1.0 / frac;
    }
    return std::nullopt;
  }

 private:
  void normalize() {
    if (den_ < 0) num_ = -num_, den_ = -den_;
    const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) num_ /= g, den_ /= g;
  }
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Lebesgue exponent in [1, inf], stored through its exact reciprocal.
class Exponent {
 public:
  static Exponent infinity() { return Exponent(Rational(0)); }
  static Exponent from_reciprocal(Rational r) {
    if (r < Rational(0)) throw std::invalid_argument("negative reciprocal exponent " + r.str());
    return Exponent(r);
  }
  static Exponent of(Rational value) {
    if (value <= Rational(0)) throw std::invalid_argument("exponent must be positive");
    return Exponent(value.reciprocal());
  }
  static Exponent of(double value) {
    if (std::isinf(value) && value > 0) return infinity();
    const auto r = Rational::from_double(value);
    if (!r) throw std::invalid_argument("exponent " + std::to_string(value) + " is not a recognizable rational");
    return of(*r);
  }
  /// Accepts "inf", "infinity", integers, "a/b" fractions and decimals.
  static Exponent parse(const std::string& text) {
    if (text == "inf" || text == "infinity" || text == "Inf" || text == "INF" || text == "∞") return infinity();
    const auto slash = text.find('/');
    try {
      std::size_t pos = 0;
      if (slash != std::string::npos) {
        const long long a = std::stoll(text.substr(0, slash), &pos);
        if (pos != slash) throw std::invalid_argument("");
        const std::string rhs = text.substr(slash + 1);
        const long long b = std::stoll(rhs, &pos);
        if (pos != rhs.size() || b == 0) throw std::invalid_argument("");
        return of(Rational(a, b));
      }
      const double v = std::stod(text, &pos);
      if (pos != text.size()) throw std::invalid_argument("");
      return of(v);
    } catch (const std::logic_error&) {
      throw std::invalid_argument("cannot parse exponent '" + text + "'");
    }
  }

  bool is_infinite() const noexcept { return reciprocal_.num() == 0; }
  Rational reciprocal() const noexcept { return reciprocal_; }
  double value() const noexcept {
    return is_infinite() ? std::numeric_limits<double>::infinity() : 1.0 / reciprocal_.value();
  }
  std::string str() const { return is_infinite() ? "inf" : reciprocal_.reciprocal().str(); }
  friend bool operator==(const Exponent&, const Exponent&) = default;

 private:
  explicit Exponent(Rational reciprocal) : reciprocal_(reciprocal) {}
  Rational reciprocal_;
};

struct ConstraintCheck {
  std::string name;   // e.g. "2/p+3/q <= 1/2"
  bool satisfied;
  std::string detail; // e.g. "2/p+3/q = 1 > 1/2"
};

/// Time/space exponents (p, q) for div(u/|u|) in L^p_t(L^q_x).
struct CriterionSpec {
  Exponent p = Exponent::infinity();
  Exponent q = Exponent::of(Rational(6));
};

struct AdmissibilityReport {
  CriterionSpec spec;
  std::vector<ConstraintCheck> checks;
  bool admissible() const {
    for (const auto& c : checks) {
      if (!c.satisfied) return false;
    }
    return true;
  }
  /// The first violated constraint, rendered as its evaluation.
  std::string first_violation() const {
    for (const auto& c : checks) {
      if (!c.satisfied) return c.detail;
    }
    return {};
  }
};

/// Regularity criterion constraints: 2/p + 3/q <= 1/2, q >= 6, p >= 4.
inline AdmissibilityReport check_admissibility(const CriterionSpec& spec) {
  AdmissibilityReport report{spec, {}};
  const Rational scaling = Rational(2) * spec.p.reciprocal() + Rational(3) * spec.q.reciprocal();
  const Rational half(1, 2);
  const bool scaling_ok = scaling <= half;
  report.checks.push_back({"2/p+3/q <= 1/2", scaling_ok,
                           "2/p+3/q = " + scaling.str() + (scaling_ok ? " <= 1/2" : " > 1/2")});
  const bool q_ok = spec.q.reciprocal() <= Rational(1, 6);
  report.checks.push_back({"q >= 6", q_ok, "q = " + spec.q.str() + (q_ok ? " >= 6" : " < 6")});
  const bool p_ok = spec.p.reciprocal() <= Rational(1, 4);
  report.checks.push_back({"p >= 4", p_ok, "p = " + spec.p.str() + (p_ok ? " >= 4" : " < 4")});
  return report;
}

class InadmissibleCriterion : public std::invalid_argument {
 public:
  explicit InadmissibleCriterion(AdmissibilityReport report)
      : std::invalid_argument("inadmissible criterion exponents (p, q) = (" + report.spec.p.str() + ", " +
                              report.spec.q.str() + "): " + report.first_violation()),
        report_(std::move(report)) {}
  const AdmissibilityReport& report() const noexcept { return report_; }

 private:
  AdmissibilityReport report_;
};

/// Exponent bookkeeping of the L^3 estimate: velocity exponents (a, b) on the
/// line 2/a + 3/b = 3/2, product exponents (p_bar, q_bar), pressure pairing r
/// and interpolation weight theta. All reciprocal identities are exact.
struct ExponentBudget {
  Exponent p = Exponent::infinity(), q = Exponent::infinity();
  Exponent a = Exponent::infinity(), b = Exponent::infinity();
  Exponent p_bar = Exponent::infinity(), q_bar = Exponent::infinity();
  Exponent r = Exponent::infinity();
  Rational theta;
  std::vector<ConstraintCheck> checks;

  bool valid() const {
    for (const auto& c : checks) {
      if (!c.satisfied) return false;
    }
    return true;
  }
  /// 1/theta, the time power of the weighted criterion norm in the Gronwall factor.
  double gronwall_power() const { return theta.reciprocal().value(); }
};

/// Computes the budget and its checks without requiring (p, q) to be admissible.
inline ExponentBudget assemble_budget(const Exponent& p, const Exponent& q, const Exponent& b) {
  const Rational inv_b = b.reciprocal();
  if (inv_b < Rational(1, 6) || inv_b > Rational(1, 2)) {
    throw std::invalid_argument("velocity exponent b = " + b.str() + " outside [2, 6]");
  }

  ExponentBudget out;
  out.p = p, out.q = q, out.b = b;
  // 2/a + 3/b = 3/2
  out.a = Exponent::from_reciprocal((Rational(3, 2) - Rational(3) * inv_b) / Rational(2));
  const Rational inv_pbar = p.reciprocal() + out.a.reciprocal();
  const Rational inv_qbar = q.reciprocal() + inv_b;
  out.p_bar = Exponent::from_reciprocal(inv_pbar);
  out.q_bar = Exponent::from_reciprocal(inv_qbar);
  // 2/r + 1/q_bar = 1
  const Rational inv_r = (Rational(1) - inv_qbar) / Rational(2);
  if (inv_r < Rational(0)) throw std::invalid_argument("q_bar = " + inv_qbar.reciprocal().str() + " < 1 leaves no pressure exponent r");
  out.r = Exponent::from_reciprocal(inv_r);
  out.theta = Rational(3) * inv_r - Rational(1, 2);
  const Rational theta_alt = (Rational(2) - Rational(3) * inv_qbar) / Rational(2);

  auto add = [&out](std::string name, bool ok, std::string detail) {
    out.checks.push_back({std::move(name), ok, std::move(detail)});
  };
  const Rational serrin_line = Rational(2) * out.a.reciprocal() + Rational(3) * inv_b;
  add("2/a+3/b = 3/2", serrin_line == Rational(3, 2), "2/a+3/b = " + serrin_line.str());
  add("1/p_bar = 1/p + 1/a", out.p_bar.reciprocal() == p.reciprocal() + out.a.reciprocal(),
      "1/p_bar = " + inv_pbar.str());
  add("1/q_bar = 1/q + 1/b", out.q_bar.reciprocal() == q.reciprocal() + inv_b, "1/q_bar = " + inv_qbar.str());
  const bool qbar_low = inv_qbar <= Rational(1, 2);
  const bool qbar_high = inv_qbar > Rational(1, 6);
  add("2 <= q_bar < 6", qbar_low && qbar_high,
      "q_bar = " + out.q_bar.str() + (qbar_low && qbar_high ? " in [2, 6)" : " outside [2, 6)"));
  const Rational scaling = Rational(2) * inv_pbar + Rational(3) * inv_qbar;
  add("2/p_bar+3/q_bar <= 2", scaling <= Rational(2),
      "2/p_bar+3/q_bar = " + scaling.str() + (scaling <= Rational(2) ? " <= 2" : " > 2"));
  add("2/r + 1/q_bar = 1", Rational(2) * inv_r + inv_qbar == Rational(1), "r = " + out.r.str());
  add("theta = 3/r - 1/2 = (2 - 3/q_bar)/2", out.theta == theta_alt,
      "theta = " + out.theta.str() + ", (2 - 3/q_bar)/2 = " + theta_alt.str());
  const bool theta_range = out.theta > Rational(0) && out.theta <= Rational(1);
  add("0 < theta <= 1", theta_range, "theta = " + out.theta.str());
  // 1/theta <= p_bar  <=>  1/p_bar <= theta
  const bool power_ok = theta_range && inv_pbar <= out.theta;
  add("1/theta <= p_bar", power_ok,
      "1/theta = " + (theta_range ? out.theta.reciprocal().str() : std::string("undefined")) + ", p_bar = " +
          out.p_bar.str());
  return out;
}

inline ExponentBudget exponent_budget(const Exponent& p, const Exponent& q, const Exponent& b) {
  auto admissibility = check_admissibility({p, q});
  if (!admissibility.admissible()) throw InadmissibleCriterion(std::move(admissibility));
  return assemble_budget(p, q, b);
}

}  // namespace nsreg
