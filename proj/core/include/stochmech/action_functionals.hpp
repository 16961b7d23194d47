#pragma once

#include <string_view>

#include "stochmech/madelung.hpp"

namespace stochmech {

enum class ActionKind { Quantum, Classical, Drift, FiniteAction };
std::string_view to_string(ActionKind kind);

/// A functional value with an error radius: |value(grid) - value(coarsened grid)|
/// for quadrature evaluations, or a Monte-Carlo confidence radius.
struct ActionReport {
  double value = 0.0;
  double error_radius = 0.0;
  ActionKind kind = ActionKind::Quantum;
  GridSpec grid;
};

/// A^Q(rho, v) = int_0^1 int (v^2 - (grad log rho / 2)^2) rho dx dt.
ActionReport quantum_action(const FluidCouple& couple);

/// A(rho, v) = int_0^1 int v^2 rho dx dt.
ActionReport classical_action(const FluidCouple& couple);

/// int_0^1 int (v^2 + (grad log rho / 2)^2) rho dx dt.
ActionReport finite_action_norm(const FluidCouple& couple);

/// int_0^1 int (b^2 + div b) rho dx dt. Equals quantum_action of the couple
/// when b = drift(couple) and rho = couple.rho() (integration by parts).
ActionReport drift_action(const DriftField& b, const ScalarField& rho);

/// Fisher term int (grad log rho / 2)^2 rho dx = int (sqrt(rho)_x)^2 dx at one node.
double osmotic_energy(const ScalarField& rho, std::size_t j);

/// sup over interior nodes of |rho_t + (rho v)_x|.
double continuity_residual(const FluidCouple& couple);

}  // namespace stochmech
