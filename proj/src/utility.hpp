#ifndef WDRO_UTILITY_HPP
#define WDRO_UTILITY_HPP

#include <optional>
#include <string>
#include <vector>

#include "common.hpp"

namespace wdro {

enum class UtilityKind { bounded_exp_power, log_linear, linear_power, custom_piecewise };

// One closed-form piece of a custom utility, valid on (lower of previous, upper].
// affine:      a + b*x
// logarithm:   a + b*log(x + c)
// power:       a + b*(c - x)^e
// exponential: a + b*exp(c*x)
struct PieceAtom {
  enum class Form { affine, logarithm, power, exponential };
  Form form = Form::affine;
  double a = 0.0, b = 0.0, c = 0.0, e = 1.0;
  double upper = 0.0;  // right end of validity interval; last piece uses +inf
};

// Concave non-decreasing utility on all of R, with the growth metadata
// (p, C1, x_lower) that the inner solver's dual guard relies on. The metadata
// is user-supplied; check_admissibility certifies consistency on a grid but
// never rewrites it.
class UtilityFn {
public:
  static UtilityFn bounded_exp_power(double q, double p_growth = 0.0, double c1 = 0.0,
                                     double x_lower = 1.0);
  static UtilityFn log_linear(double p_growth = 1.0, double c1 = 1.0, double x_lower = 1.0);
  static UtilityFn linear_power(double q, double p_growth = 0.0, double c1 = 0.0,
                                double x_lower = 1.0);
  static UtilityFn custom_piecewise(std::vector<PieceAtom> pieces, double p_growth, double c1,
                                    double x_lower);

  double value(double x) const;
  double derivative(double x) const;  // left derivative at piece breakpoints

  UtilityKind kind() const { return kind_; }
  double family_exponent() const { return q_; }
  double p_growth() const { return p_growth_; }
  double c1() const { return c1_; }
  double x_lower() const { return x_lower_; }
  std::string kind_name() const;

private:
  UtilityFn() = default;

  UtilityKind kind_ = UtilityKind::log_linear;
  double q_ = 1.0;
  double p_growth_ = 1.0;
  double c1_ = 1.0;
  double x_lower_ = 1.0;
  std::vector<PieceAtom> pieces_;
};

// Symmetric probe grid: log-spaced magnitudes up to x_max, mirrored around 0.
struct GridSpec {
  double x_max = 1e6;
  int points = 2048;

  std::vector<double> generate() const;
};

struct AdmissibilityReport {
  bool pass = false;
  bool monotone_ok = false;
  bool concave_ok = false;
  bool negative_at_x_lower = false;
  bool growth_ok = false;
  double first_violation_x = 0.0;  // valid when !pass
  std::string violation;           // empty when pass
};

enum class AeSide { plus_infinity, minus_infinity };

struct AeEstimate {
  double value = 0.0;
  bool stabilized = false;  // max oscillation over the final 3 probes < 1e-3
};

enum class AeCase { bounded_above, rae_minus, rae_plus, inadmissible };

struct AeReport {
  double ae_plus = 0.0;
  double ae_minus = 0.0;
  AeCase case_tag = AeCase::inadmissible;
  double gamma_lower = 0.0;  // <= 1
  double gamma_upper = 1.0;  // >= 1
  double envelope_c = 0.0;   // U^-(-x_lower) + U^+(x_upper)
  double x_upper = 1.0;      // with U(x_upper) > 0
  bool has_x_upper = false;
};

const char* ae_case_name(AeCase c);

AdmissibilityReport check_admissibility(const UtilityFn& u, const GridSpec& probe = {});

AeEstimate estimate_ae(const UtilityFn& u, AeSide side, std::span<const double> probes);

// Classifies the utility into the three well-posedness cases and fills the
// gamma envelope constants. Probe horizons default to the admissibility grid's.
AeReport analyze_ae(const UtilityFn& u, double horizon = 1e8);

// Returns C_hat = (2 U(x_up) + U^-(-x_low)) / x_up^gamma_hat + U(x_up) and
// asserts U(x) <= C_hat (|x|^gamma_hat + 1) on the probe grid.
double growth_envelope(const UtilityFn& u, const AeReport& report, const GridSpec& probe = {});

// Fit helper for the growth metadata: proposes (c1, x_lower) consistent with
// the declared p on the probe grid. Advisory only; callers decide whether to
// adopt it.
struct GrowthFit {
  double c1 = 0.0;
  double x_lower = 0.0;
  bool found = false;
};
GrowthFit suggest_growth_metadata(const UtilityFn& u, double p, const GridSpec& probe = {});

}  // namespace wdro

#endif
