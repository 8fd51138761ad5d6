#include "utility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wdro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double piece_value(const PieceAtom& p, double x) {
  switch (p.form) {
    case PieceAtom::Form::affine:
      return p.a + p.b * x;
    case PieceAtom::Form::logarithm:
      return p.a + p.b * std::log(x + p.c);
    case PieceAtom::Form::power:
      return p.a + p.b * std::pow(p.c - x, p.e);
    case PieceAtom::Form::exponential:
      return p.a + p.b * std::exp(p.c * x);
  }
  return 0.0;
}

double piece_derivative(const PieceAtom& p, double x) {
  switch (p.form) {
    case PieceAtom::Form::affine:
      return p.b;
    case PieceAtom::Form::logarithm:
      return p.b / (x + p.c);
    case PieceAtom::Form::power:
      return -p.b * p.e * std::pow(p.c - x, p.e - 1.0);
    case PieceAtom::Form::exponential:
      return p.b * p.c * std::exp(p.c * x);
  }
  return 0.0;
}

double default_tail_c1(double q) {
  // -(1/q)((1-x)^q - 1) >= -C1 (1 + |x|^q) holds with C1 = max(1, 2^{q-1}/q).
  return std::max(1.0, std::pow(2.0, q - 1.0) / q);
}

}  // namespace

UtilityFn UtilityFn::bounded_exp_power(double q, double p_growth, double c1, double x_lower) {
  require(std::isfinite(q) && q >= 1.0, Errc::invalid_argument,
          "bounded_exp_power: exponent must be >= 1");
  UtilityFn u;
  u.kind_ = UtilityKind::bounded_exp_power;
  u.q_ = q;
  u.p_growth_ = p_growth > 0.0 ? p_growth : q;
  u.c1_ = c1 > 0.0 ? c1 : default_tail_c1(q);
  u.x_lower_ = x_lower;
  require(u.x_lower_ > 0.0, Errc::invalid_argument, "x_lower must be positive");
  return u;
}

UtilityFn UtilityFn::log_linear(double p_growth, double c1, double x_lower) {
  UtilityFn u;
  u.kind_ = UtilityKind::log_linear;
  u.q_ = 1.0;
  u.p_growth_ = p_growth;
  u.c1_ = c1;
  u.x_lower_ = x_lower;
  require(u.p_growth_ >= 1.0 && u.c1_ > 0.0 && u.x_lower_ > 0.0, Errc::invalid_argument,
          "log_linear: bad growth metadata");
  return u;
}

UtilityFn UtilityFn::linear_power(double q, double p_growth, double c1, double x_lower) {
  require(std::isfinite(q) && q >= 1.0, Errc::invalid_argument,
          "linear_power: exponent must be >= 1");
  UtilityFn u;
  u.kind_ = UtilityKind::linear_power;
  u.q_ = q;
  u.p_growth_ = p_growth > 0.0 ? p_growth : q;
  u.c1_ = c1 > 0.0 ? c1 : default_tail_c1(q);
  u.x_lower_ = x_lower;
  require(u.x_lower_ > 0.0, Errc::invalid_argument, "x_lower must be positive");
  return u;
}

UtilityFn UtilityFn::custom_piecewise(std::vector<PieceAtom> pieces, double p_growth, double c1,
                                      double x_lower) {
  require(!pieces.empty(), Errc::invalid_argument, "custom_piecewise: no pieces");
  require(p_growth >= 1.0 && c1 > 0.0 && x_lower > 0.0, Errc::invalid_argument,
          "custom_piecewise: bad growth metadata");
  // The last piece's upper bound is ignored (taken as +inf).
  for (std::size_t i = 0; i + 2 < pieces.size(); ++i)
    require(pieces[i].upper < pieces[i + 1].upper, Errc::invalid_argument,
            "custom_piecewise: breakpoints must be strictly increasing");
  pieces.back().upper = kInf;

  UtilityFn u;
  u.kind_ = UtilityKind::custom_piecewise;
  u.q_ = 0.0;
  u.p_growth_ = p_growth;
  u.c1_ = c1;
  u.x_lower_ = x_lower;
  u.pieces_ = std::move(pieces);

  // The domain must be all of R: probe each piece inside its interval and
  // reject half-line definitions (e.g. a bare logarithm) up front.
  double lo = -1e7;
  for (const auto& p : u.pieces_) {
    const double hi = std::min(p.upper, 1e7);
    const double mid = (std::isfinite(lo) ? lo : -1e7) * 0.5 + hi * 0.5;
    for (double x : {std::min(lo + 1e-9, hi), mid, hi}) {
      // NaN means the formula leaves its domain (e.g. a bare logarithm): the
      // reformulated problem needs U on all of R, so reject at construction.
      // Overflow to +-inf is tolerated; the admissibility scan judges it.
      const double v = piece_value(p, x);
      require(!std::isnan(v), Errc::invalid_argument,
              "custom_piecewise: piece undefined on its interval (utilities must be defined on "
              "all of R)");
    }
    lo = p.upper;
  }
  return u;
}

double UtilityFn::value(double x) const {
  require(std::isfinite(x), Errc::invalid_argument, "utility: non-finite input");
  switch (kind_) {
    case UtilityKind::bounded_exp_power:
      if (x > 0.0) return 1.0 - std::exp(-x);
      return -(std::pow(1.0 - x, q_) - 1.0) / q_;
    case UtilityKind::log_linear:
      if (x > 1.0) return std::log(x);
      return x - 1.0;
    case UtilityKind::linear_power:
      if (x > 0.0) return x;
      return -(std::pow(1.0 - x, q_) - 1.0) / q_;
    case UtilityKind::custom_piecewise:
      for (const auto& p : pieces_)
        if (x <= p.upper) return piece_value(p, x);
      return piece_value(pieces_.back(), x);
  }
  return 0.0;
}

double UtilityFn::derivative(double x) const {
  require(std::isfinite(x), Errc::invalid_argument, "utility: non-finite input");
  switch (kind_) {
    case UtilityKind::bounded_exp_power:
      if (x > 0.0) return std::exp(-x);
      return std::pow(1.0 - x, q_ - 1.0);
    case UtilityKind::log_linear:
      if (x > 1.0) return 1.0 / x;
      return 1.0;
    case UtilityKind::linear_power:
      if (x > 0.0) return 1.0;
      return std::pow(1.0 - x, q_ - 1.0);
    case UtilityKind::custom_piecewise:
      for (const auto& p : pieces_)
        if (x <= p.upper) return piece_derivative(p, x);
      return piece_derivative(pieces_.back(), x);
  }
  return 0.0;
}

std::string UtilityFn::kind_name() const {
  switch (kind_) {
    case UtilityKind::bounded_exp_power:
      return "bounded_exp_power";
    case UtilityKind::log_linear:
      return "log_linear";
    case UtilityKind::linear_power:
      return "linear_power";
    case UtilityKind::custom_piecewise:
      return "custom_piecewise";
  }
  return "?";
}

std::vector<double> GridSpec::generate() const {
  require(x_max > 0.0 && points >= 8, Errc::invalid_argument, "GridSpec: bad grid");
  const int half = points / 2;
  const double lo = std::min(1e-6, x_max * 0.5);
  std::vector<double> xs;
  xs.reserve(2 * half + 1);
  for (int j = half - 1; j >= 0; --j)
    xs.push_back(-lo * std::pow(x_max / lo, static_cast<double>(j) / (half - 1)));
  xs.push_back(0.0);
  for (int j = 0; j < half; ++j)
    xs.push_back(lo * std::pow(x_max / lo, static_cast<double>(j) / (half - 1)));
  return xs;
}

const char* ae_case_name(AeCase c) {
  switch (c) {
    case AeCase::bounded_above:
      return "bounded_above";
    case AeCase::rae_minus:
      return "rae_minus";
    case AeCase::rae_plus:
      return "rae_plus";
    case AeCase::inadmissible:
      return "inadmissible";
  }
  return "?";
}

AdmissibilityReport check_admissibility(const UtilityFn& u, const GridSpec& probe) {
  require(probe.x_max >= 10.0 * u.x_lower(), Errc::invalid_argument,
          "check_admissibility: grid must cover [-X,X] with X >= 10 x_lower");
  const std::vector<double> xs = probe.generate();

  AdmissibilityReport rep;
  rep.monotone_ok = true;
  rep.concave_ok = true;
  rep.growth_ok = true;

  auto record = [&](bool& flag, double x, const char* what) {
    if (rep.violation.empty()) {
      rep.first_violation_x = x;
      rep.violation = what;
    }
    flag = false;
  };

  std::vector<double> vals(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) vals[i] = u.value(xs[i]);

  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double scale = 1.0 + std::max(std::fabs(vals[i]), std::fabs(vals[i + 1]));
    if (vals[i + 1] < vals[i] - 1e-10 * scale) {
      record(rep.monotone_ok, xs[i + 1], "monotonicity");
      break;
    }
  }

  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double mid = 0.5 * (xs[i] + xs[i + 1]);
    const double vm = u.value(mid);
    const double chord = 0.5 * (vals[i] + vals[i + 1]);
    const double scale = 1.0 + std::max({std::fabs(vals[i]), std::fabs(vals[i + 1]), std::fabs(vm)});
    if (vm < chord - 1e-10 * scale) {
      record(rep.concave_ok, mid, "concavity");
      break;
    }
  }

  rep.negative_at_x_lower = u.value(-u.x_lower()) < 0.0;
  if (!rep.negative_at_x_lower) record(rep.negative_at_x_lower, -u.x_lower(), "U(-x_lower) < 0");

  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] > -u.x_lower()) break;
    const double bound = -u.c1() * (1.0 + std::pow(std::fabs(xs[i]), u.p_growth()));
    if (vals[i] < bound - 1e-9 * (1.0 + std::fabs(bound))) {
      record(rep.growth_ok, xs[i], "growth bound");
      break;
    }
  }

  rep.pass = rep.monotone_ok && rep.concave_ok && rep.negative_at_x_lower && rep.growth_ok;
  return rep;
}

AeEstimate estimate_ae(const UtilityFn& u, AeSide side, std::span<const double> probes) {
  require(probes.size() >= 3, Errc::invalid_argument, "estimate_ae: need at least 3 probes");
  const double floor = side == AeSide::plus_infinity ? 0.0 : u.x_lower();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    require(probes[i] > floor, Errc::invalid_argument, "estimate_ae: probes must exceed x_lower");
    if (i > 0)
      require(probes[i] > probes[i - 1], Errc::invalid_argument,
              "estimate_ae: probes must be strictly increasing");
  }

  std::vector<double> ratios;
  ratios.reserve(probes.size());
  for (double m : probes) {
    const double x = side == AeSide::plus_infinity ? m : -m;
    const double ux = u.value(x);
    require(std::fabs(ux) > 1e-300, Errc::degenerate_probe, "estimate_ae: U vanishes at a probe");
    ratios.push_back(x * u.derivative(x) / ux);
  }

  AeEstimate est;
  est.value = ratios.back();
  const std::size_t n = ratios.size();
  const double osc = std::max(std::fabs(ratios[n - 1] - ratios[n - 2]),
                              std::fabs(ratios[n - 2] - ratios[n - 3]));
  est.stabilized = osc < 1e-3;
  return est;
}

namespace {

std::vector<double> default_probes(double start, double horizon) {
  std::vector<double> ps;
  double x = start;
  while (x < horizon) {
    ps.push_back(x);
    x *= 4.0;
  }
  ps.push_back(horizon);
  return ps;
}

// Smallest x > 0 with U(x) > 0, by doubling; not every utility has one.
std::optional<double> find_x_upper(const UtilityFn& u) {
  double x = 1.0;
  for (int i = 0; i < 200; ++i) {
    if (u.value(x) > 0.0) return x;
    x *= 2.0;
  }
  return std::nullopt;
}

}  // namespace

AeReport analyze_ae(const UtilityFn& u, double horizon) {
  AeReport rep;
  const auto plus_probes = default_probes(std::max(2.0, 2.0 * u.x_lower()), horizon);
  const auto minus_probes = default_probes(std::max(2.0, 2.0 * u.x_lower()), horizon);
  rep.ae_plus = estimate_ae(u, AeSide::plus_infinity, plus_probes).value;
  rep.ae_minus = estimate_ae(u, AeSide::minus_infinity, minus_probes).value;

  const auto x_up = find_x_upper(u);
  rep.has_x_upper = x_up.has_value();
  rep.x_upper = x_up.value_or(1.0);

  // Bounded above: flat on a doubling far probe and derivative vanishing.
  const bool bounded = u.value(2.0 * horizon) - u.value(horizon) < 1e-9 * (1.0 + std::fabs(u.value(horizon))) &&
                       u.derivative(2.0 * horizon) < 1e-12;

  if (bounded) {
    rep.case_tag = AeCase::bounded_above;
    rep.gamma_lower = rep.has_x_upper ? 0.5 * (std::clamp(rep.ae_plus, 0.0, 0.999) + 1.0) : 0.5;
    rep.gamma_upper = 1.0;
  } else if (rep.ae_minus > 1.0 + 1e-9) {
    rep.case_tag = AeCase::rae_minus;
    rep.gamma_lower = 1.0;
    // AE_{-inf} is only the supremum of admissible exponents, so stay
    // strictly inside (1, AE).
    rep.gamma_upper = 0.5 * (1.0 + std::min(rep.ae_minus, u.p_growth()));
  } else if (rep.ae_plus < 1.0 - 1e-9 && rep.has_x_upper) {
    rep.case_tag = AeCase::rae_plus;
    rep.gamma_lower = 0.5 * (std::max(rep.ae_plus, 0.0) + 1.0);
    rep.gamma_upper = 1.0;
  } else {
    rep.case_tag = AeCase::inadmissible;
    rep.gamma_lower = 0.5;
    rep.gamma_upper = 1.0;
  }

  const double u_minus = std::max(0.0, -u.value(-u.x_lower()));
  const double u_plus = rep.has_x_upper ? std::max(0.0, u.value(rep.x_upper)) : 0.0;
  rep.envelope_c = u_minus + u_plus;
  return rep;
}

double growth_envelope(const UtilityFn& u, const AeReport& report, const GridSpec& probe) {
  require(report.case_tag == AeCase::rae_minus || report.case_tag == AeCase::rae_plus,
          Errc::invalid_argument, "growth_envelope: needs an RAE case");
  require(report.has_x_upper, Errc::invalid_argument, "growth_envelope: no x_upper with U > 0");

  const double gamma_hat =
      report.case_tag == AeCase::rae_minus ? report.gamma_upper : report.gamma_lower;
  const double u_up = u.value(report.x_upper);
  const double u_minus = std::max(0.0, -u.value(-u.x_lower()));
  const double c_hat = (2.0 * u_up + u_minus) / std::pow(report.x_upper, gamma_hat) + u_up;

  for (double x : probe.generate()) {
    const double rhs = c_hat * (std::pow(std::fabs(x), gamma_hat) + 1.0);
    if (u.value(x) > rhs + 1e-9 * (1.0 + std::fabs(rhs)))
      fail(Errc::inconsistent_metadata, "growth_envelope: U exceeds the envelope on the grid");
  }
  return c_hat;
}

GrowthFit suggest_growth_metadata(const UtilityFn& u, double p, const GridSpec& probe) {
  require(p >= 1.0, Errc::invalid_argument, "suggest_growth_metadata: p must be >= 1");
  GrowthFit fit;
  // x_lower: first magnitude with U(-x) < 0.
  double xl = 0.0;
  for (double x : probe.generate()) {
    if (x <= 0.0) continue;
    if (u.value(-x) < 0.0) {
      xl = x;
      break;
    }
  }
  if (xl == 0.0) return fit;

  double c1 = 0.0;
  for (double x : probe.generate()) {
    if (x > -xl) continue;
    const double need = -u.value(x) / (1.0 + std::pow(std::fabs(x), p));
    c1 = std::max(c1, need);
  }
  if (!std::isfinite(c1)) return fit;
  fit.c1 = std::max(c1 * (1.0 + 1e-6), 1e-12);
  fit.x_lower = xl;
  fit.found = true;
  return fit;
}

}  // namespace wdro
