#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stochmech/action_functionals.hpp"
#include "stochmech/madelung.hpp"

namespace stochmech {

/// Random compactly supported density perturbation g = dG/dx, where G is a sum
/// of `modes` smooth bumps inside the spatial support times a smooth window in
/// time. `amplitude` is relative: |g| <= amplitude * rho pointwise, with
/// equality somewhere, so amplitude < 1 keeps rho + y g > 0 for |y| <= 1.
struct PerturbationSpec {
  std::uint64_t seed = 1;
  double support_lo = -3.0;
  double support_hi = 3.0;
  double window_lo = 0.1;
  double window_hi = 0.9;
  double amplitude = 0.5;
  std::size_t modes = 3;

  /// Amplitudes in [kMaxAmplitude, 1) are clamped to kMaxAmplitude, which keeps
  /// rho + y g >= 0.1 rho; amplitudes >= 1 are infeasible.
  static constexpr double kMaxAmplitude = 0.9;

  void validate(const GridSpec& grid) const;
};

/// g together with its correction flux at y = 1, u = -(d/dt (window G) + g v),
/// which vanishes identically outside the support of g.
struct Perturbation {
  ScalarField g;
  VectorField flux;
};

Perturbation build_perturbation(const PerturbationSpec& spec, const FluidCouple& base);
ScalarField make_perturbation(const PerturbationSpec& spec, const FluidCouple& base);

/// Correction flux at y = 1 for an arbitrary compactly supported g:
/// u = -antiderivative(g_t + (g v)_x), integrated in real space from x_min and
/// set to zero outside the hull of the integrand's support. Throws SupportLeak
/// if the integrand does not have zero mass.
VectorField correction_flux(const FluidCouple& base, const ScalarField& g);

/// X_y = y u / (rho + y g), so that (rho + y g, v + X_y) satisfies the
/// continuity equation whenever the base does.
VectorField solve_velocity_correction(const FluidCouple& base, const ScalarField& g, double y);

/// The family rho'_y = rho + y g, v'_y = v + X_y. The flux u is linear in y and
/// stored once at y = 1.
class CompetitorFamily {
 public:
  CompetitorFamily(FluidCouple base, ScalarField g, std::vector<double> y_grid);
  CompetitorFamily(FluidCouple base, Perturbation p, std::vector<double> y_grid);

  const FluidCouple& base() const { return base_; }
  const ScalarField& g() const { return g_; }
  const VectorField& flux() const { return u_; }
  const std::vector<double>& y_grid() const { return y_grid_; }

  FluidCouple couple_at(double y) const;

  static std::vector<double> default_y_grid();

 private:
  FluidCouple base_;
  ScalarField g_;
  VectorField u_;
  std::vector<double> y_grid_;
};

struct ProfilePoint {
  double y = 0.0;
  double value = 0.0;
  double error_radius = 0.0;
};

std::vector<ProfilePoint> evaluate_family(const CompetitorFamily& family);

struct VerifyOptions {
  std::vector<double> y_grid = CompetitorFamily::default_y_grid();
  double h = 0.125;               ///< step of the centered y-derivative (also run at h/2)
  double violation_factor = 3.0;  ///< band, in combined error radii, reported as inconclusive
  double stationarity_factor = 10.0;
};

enum class Verdict { Pass, Inconclusive, Violated, NotStationary, FailedToConstruct };
std::string_view to_string(Verdict v);

struct SpecOutcome {
  PerturbationSpec spec;
  Verdict verdict = Verdict::Pass;
  std::string error;  ///< construction failure message, if any
  std::vector<ProfilePoint> profile;
  double value_at_0 = 0.0;
  double error_at_0 = 0.0;
  double derivative_h = 0.0;       ///< centered difference at h
  double derivative_half_h = 0.0;  ///< centered difference at h/2
  double derivative_ratio = 0.0;   ///< derivative_h / derivative_half_h
  double min_margin = 0.0;         ///< min_y A(y) - A(0)
  double min_margin_tolerance = 0.0;
  double min_second_difference = 0.0;
  double second_difference_tolerance = 0.0;
  bool minimum_ok = true;
  bool convexity_ok = true;
  bool stationary = true;
};

struct TheoremReport {
  std::vector<SpecOutcome> outcomes;
  std::size_t passed = 0;
  std::size_t inconclusive = 0;
  std::size_t violated = 0;
  std::size_t not_stationary = 0;
  std::size_t failed_to_construct = 0;

  /// No spec violated the inequality (construction failures do not count).
  bool inequality_holds() const { return violated == 0; }
};

/// For each spec: stationarity of A^Q at y = 0, A^Q(base) <= A^Q(couple_y) up
/// to the tolerance band, and nonnegative second differences of the profile.
TheoremReport verify_theorem1(const FluidCouple& base, std::span<const PerturbationSpec> specs,
                              const VerifyOptions& options = {});

/// CSV "spec,y,value,error_radius".
void write_profiles_csv(std::ostream& out, const TheoremReport& report);

}  // namespace stochmech
